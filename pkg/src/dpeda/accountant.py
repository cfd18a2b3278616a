"""Privacy-budget accounting: an append-only ledger with atomic check-and-debit.

Epsilons are tracked internally as exact Fractions (floats are converted
through their shortest decimal representation), so one hundred charges of
0.01 sum to exactly 1.00 and budget exhaustion happens at exactly the right
step with no float drift. Float views are offered everywhere for reporting.

Composition rules:
  sequential     - epsilons of charges add up
  parallel-group - one charge covers a set of subqueries over disjoint slices
                   of the input; the debit is the max of their equal epsilons,
                   i.e. the per-subquery epsilon once
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from dpeda.errors import BudgetExhausted, ParamError

SEQUENTIAL = "sequential"
PARALLEL_GROUP = "parallel-group"

# absorbs representation rounding at the comparison; refusal on strict excess
BUDGET_TOLERANCE = Fraction(1, 10**12)


def exact_fraction(value) -> Fraction:
    """Decimal-faithful conversion: the float 0.01 becomes Fraction(1, 100)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        return Fraction(Decimal(value))
    raise ParamError(f"cannot interpret {value!r} as an epsilon")


_exact = exact_fraction


@dataclass(frozen=True)
class Charge:
    """One accepted debit. index is the 1-based ordinal within the ledger."""

    index: int
    label: str
    eps_exact: Fraction
    composition: str

    @property
    def epsilon(self) -> float:
        return float(self.eps_exact)


@dataclass(frozen=True)
class ReportRow:
    index: int
    label: str
    epsilon: float
    cumulative: float


class Ledger:
    """Single budget pool for one analysis session.

    charge() is the serialization point: it atomically checks and debits under
    a lock, so concurrent callers can never drive spent past the budget.
    Refused charges leave the ledger untouched.
    """

    def __init__(self, budget):
        budget_exact = _exact(budget)
        if budget_exact <= 0:
            raise ParamError(f"budget must be > 0, got {budget}")
        self._budget = budget_exact
        self._spent = Fraction(0)
        self._charges: list[Charge] = []
        self._lock = threading.Lock()

    # -- float views --

    @property
    def budget(self) -> float:
        return float(self._budget)

    @property
    def spent(self) -> float:
        return float(self._spent)

    @property
    def remaining(self) -> float:
        return float(self.remaining_exact)

    # -- exact views --

    @property
    def budget_exact(self) -> Fraction:
        return self._budget

    @property
    def spent_exact(self) -> Fraction:
        return self._spent

    @property
    def remaining_exact(self) -> Fraction:
        left = self._budget - self._spent
        return left if left > 0 else Fraction(0)

    @property
    def charges(self) -> tuple[Charge, ...]:
        with self._lock:
            return tuple(self._charges)

    # -- debiting --

    def charge(self, epsilon, label: str, composition: str = SEQUENTIAL) -> Charge:
        """Atomically debit one epsilon; raises BudgetExhausted on refusal."""
        return self.charge_group([(epsilon, label, composition)])[0]

    def charge_group(self, items) -> list[Charge]:
        """Atomically debit several epsilons: all accepted or none.

        items is a sequence of (epsilon, label, composition) triples. Used by
        releases that are specified as a block of charges (the five-statistic
        numeric summary) so a refusal cannot leave a partial release behind.
        """
        if not items:
            raise ParamError("charge_group needs at least one item")
        prepared = []
        for epsilon, label, composition in items:
            eps_exact = _exact(epsilon)
            if eps_exact <= 0:
                raise ParamError(f"epsilon must be > 0, got {epsilon}")
            if composition not in (SEQUENTIAL, PARALLEL_GROUP):
                raise ParamError(f"unknown composition {composition!r}")
            prepared.append((eps_exact, str(label), composition))
        total = sum(eps for eps, _, _ in prepared)
        with self._lock:
            if self._spent + total > self._budget + BUDGET_TOLERANCE:
                raise BudgetExhausted(
                    requested=float(total), remaining=float(self.remaining_exact)
                )
            accepted = []
            for eps_exact, label, composition in prepared:
                entry = Charge(
                    index=len(self._charges) + 1,
                    label=label,
                    eps_exact=eps_exact,
                    composition=composition,
                )
                self._charges.append(entry)
                self._spent += eps_exact
                accepted.append(entry)
            return accepted

    def can_absorb(self, epsilon) -> bool:
        with self._lock:
            return self._spent + _exact(epsilon) <= self._budget + BUDGET_TOLERANCE

    def replay(self, epsilon, label: str, composition: str) -> Charge:
        """Re-apply a journaled charge without the budget check.

        Only for rebuilding state from a journal of charges that were already
        accepted once; never exposed to query paths.
        """
        eps_exact = _exact(epsilon)
        with self._lock:
            entry = Charge(
                index=len(self._charges) + 1,
                label=str(label),
                eps_exact=eps_exact,
                composition=composition,
            )
            self._charges.append(entry)
            self._spent += eps_exact
            return entry

    # -- reporting --

    def cumulative_exact(self) -> list[Fraction]:
        out, running = [], Fraction(0)
        for charge in self.charges:
            running += charge.eps_exact
            out.append(running)
        return out

    def report(self) -> list[ReportRow]:
        """Ordered cumulative view: one row per accepted charge."""
        rows, running = [], Fraction(0)
        for charge in self.charges:
            running += charge.eps_exact
            rows.append(
                ReportRow(
                    index=charge.index,
                    label=charge.label,
                    epsilon=charge.epsilon,
                    cumulative=float(running),
                )
            )
        return rows


def open_session(total_budget) -> Ledger:
    """Start a fresh ledger; ParamError unless total_budget > 0."""
    return Ledger(total_budget)
