"""Append-only session journal.

One JSON object per line. Two record types:

  {"type": "session", "session_id", "dataset_id", "budget",
   "eps_i_default", "created_at"}
  {"type": "charge", "session_id", "label", "epsilon", "composition",
   "released"?}

Charges are journaled only after the accountant accepts them, so replaying
the file on startup reconstructs every ledger exactly; a restart can never
forget spent budget. Quantile charges carry their released value so the
outlier prerequisite stays usable across restarts. Synthetic datasets are
in-memory only and are not replayed; their charges are."""

from __future__ import annotations

import json
import threading
from pathlib import Path


class Journal:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, record: dict) -> None:
        line = json.dumps(record, separators=(",", ":"))
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")
                handle.flush()

    def load(self) -> list[dict]:
        if not self.path.exists():
            return []
        records = []
        with open(self.path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records
