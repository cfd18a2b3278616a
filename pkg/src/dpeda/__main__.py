import sys

from dpeda.cli import main

sys.exit(main())
