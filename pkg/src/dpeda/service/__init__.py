"""HTTP face of the query engine: sessions, metered queries, ledger reads,
and synthesis, with refusals carrying the remaining budget."""

from dpeda.service.app import create_app

__all__ = ["create_app"]
