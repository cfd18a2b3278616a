"""In-memory state of the running service: registered datasets and sessions.

Sessions are isolated: one ledger, one rng stream, one quantile cache, and
one synthetic-dataset shelf each. All mutation of a session happens under
its lock; the accountant adds its own atomic check-and-debit underneath.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

import numpy as np

from dpeda.accountant import Ledger, open_session
from dpeda.core import Dataset
from dpeda.errors import NotFound


def fresh_id(prefix: str) -> str:
    return f"{prefix}-{uuid.uuid4().hex[:12]}"


@dataclass
class Session:
    id: str
    dataset_id: str
    ledger: Ledger
    eps_i_default: float
    created_at: str
    rng: np.random.Generator
    quantiles: dict[str, tuple[float, float]] = field(default_factory=dict)
    synthetic: dict[str, Dataset] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


class DatasetRegistry:
    """Operator-registered source data; analysts can read metadata only."""

    def __init__(self, datasets: dict[str, Dataset]):
        self._datasets = dict(datasets)

    def ids(self) -> list[str]:
        return list(self._datasets)

    def get(self, dataset_id: str) -> Dataset:
        try:
            return self._datasets[dataset_id]
        except KeyError:
            raise NotFound(f"no dataset {dataset_id!r}") from None


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(
        self,
        dataset_id: str,
        budget: float,
        eps_i_default: float,
        created_at: str,
        rng: np.random.Generator,
        session_id: str | None = None,
    ) -> Session:
        session = Session(
            id=session_id or fresh_id("ses"),
            dataset_id=dataset_id,
            ledger=open_session(budget),
            eps_i_default=eps_i_default,
            created_at=created_at,
            rng=rng,
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise NotFound(f"no session {session_id!r}") from None
