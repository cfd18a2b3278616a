"""The interactive exploratory query set, each answer metered via the ledger.

Query inventory (the closed-form budget below mirrors it exactly):
  DIST  numeric column  -> min, max, Q1, Q2, Q3; five sequential charges,
                           each Laplace with sensitivity upper - lower
  DIST  categorical col -> histogram over domain + missing; cells are disjoint
                           so one parallel-group charge covers the column
  MISS  numeric column  -> noisy count of missing cells, sensitivity 1
  OUTL  numeric column  -> noisy count outside 1.5 IQR cutoffs built from the
                           previously released noisy Q1/Q3 of the same column
  CORR  numeric pair    -> Spearman rho from a noised binned joint table
  CORR  categorical pair-> Cramer's V from a noised contingency table

The debit always precedes the computation; a refused charge yields nothing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from dpeda.accountant import (
    BUDGET_TOLERANCE,
    PARALLEL_GROUP,
    SEQUENTIAL,
    Ledger,
    exact_fraction,
)
from dpeda.core import CATEGORICAL, MISSING_LABEL, NUMERIC, Dataset
from dpeda.errors import (
    BudgetExhausted,
    DegenerateColumn,
    EmptyColumn,
    KindError,
    MissingPrerequisite,
    ParamError,
)
from dpeda.mechanisms import (
    MechanismParams,
    NoisyValue,
    exponential_quantile,
    laplace_mechanism,
    sample_laplace,
)

IQR_FACTOR = 1.5        # outlier cutoff rule: Q1 - 1.5*IQR, Q3 + 1.5*IQR
CORRELATION_BINS = 16   # equal-width bins per numeric column in joint tables

LAPLACE_QUANTILES = "laplace"
EXPONENTIAL_QUANTILES = "exponential"


# ==== release policies ====


@dataclass(frozen=True)
class ReleasePolicy:
    """How a query run treats noise, true values, and the ledger.

    noise      - add calibrated noise (the production behaviour)
    keep_true  - retain exact statistics on results (test mode only)
    charge     - debit the ledger (off only for post-processing of synthetic
                 data, which is free by the post-processing property)
    """

    noise: bool = True
    keep_true: bool = False
    charge: bool = True

    def __post_init__(self):
        if not self.noise and not self.keep_true:
            # a noise-free run is test tooling; forbid it masquerading as production
            raise ParamError("noise=False requires keep_true=True (test mode)")


PRODUCTION = ReleasePolicy()
TEST_MODE = ReleasePolicy(noise=True, keep_true=True)
NOISE_OFF = ReleasePolicy(noise=False, keep_true=True)
POST_PROCESS = ReleasePolicy(noise=False, keep_true=True, charge=False)


def _require_ledger(ledger: Ledger | None, policy: ReleasePolicy) -> None:
    if policy.charge and ledger is None:
        raise ParamError("a ledger is required when the policy charges")


# ==== result containers ====


@dataclass(frozen=True)
class DistNumericResult:
    column: str
    minimum: NoisyValue
    maximum: NoisyValue
    q1: NoisyValue
    q2: NoisyValue
    q3: NoisyValue

    PARTS = ("min", "max", "q1", "q2", "q3")

    def parts(self) -> dict[str, NoisyValue]:
        return {
            "min": self.minimum,
            "max": self.maximum,
            "q1": self.q1,
            "q2": self.q2,
            "q3": self.q3,
        }


@dataclass(frozen=True)
class HistogramResult:
    column: str
    categories: tuple[str, ...]       # declared domain plus the missing cell
    counts: tuple[NoisyValue, ...]    # raw noisy counts; may be negative
    epsilon: float

    @property
    def counts_nonneg(self) -> tuple[float, ...]:
        """Post-processed view with negatives clamped to zero."""
        return tuple(max(0.0, nv.value) for nv in self.counts)

    def as_dict(self) -> dict[str, float]:
        return {c: nv.value for c, nv in zip(self.categories, self.counts)}


@dataclass(frozen=True)
class CorrelationResult:
    columns: tuple[str, str]          # canonically ordered
    method: str                       # "spearman" | "cramers_v"
    coefficient: float | None         # None when undefined
    undefined: bool
    epsilon: float
    true_coefficient: float | None = None


@dataclass(frozen=True)
class EdaEntry:
    function: str
    columns: tuple[str, ...]
    epsilon: float
    sensitivity: float | None
    payload: object


@dataclass
class EdaReport:
    entries: list[EdaEntry] = field(default_factory=list)

    def add(self, entry: EdaEntry) -> None:
        self.entries.append(entry)

    def get(self, function: str, *columns: str) -> EdaEntry:
        for entry in self.entries:
            if entry.function == function and entry.columns == tuple(columns):
                return entry
        raise KeyError((function, columns))

    def to_records(self) -> list[dict]:
        """Released values only; exact statistics never appear here."""
        records = []
        for entry in self.entries:
            record = {
                "function": entry.function,
                "columns": list(entry.columns),
                "epsilon": entry.epsilon,
                "sensitivity": entry.sensitivity,
            }
            payload = entry.payload
            if isinstance(payload, DistNumericResult):
                record["values"] = {k: nv.value for k, nv in payload.parts().items()}
            elif isinstance(payload, HistogramResult):
                record["values"] = payload.as_dict()
            elif isinstance(payload, NoisyValue):
                record["values"] = {"count": payload.value}
            elif isinstance(payload, CorrelationResult):
                record["values"] = {
                    "method": payload.method,
                    "coefficient": payload.coefficient,
                    "undefined": payload.undefined,
                }
            records.append(record)
        return records

    def to_json(self) -> str:
        return json.dumps(self.to_records(), indent=2)


# ==== labels ====


def dist_label(column: str, part: str | None = None) -> str:
    return f"DIST/{column}/{part}" if part else f"DIST/{column}"


def miss_label(column: str) -> str:
    return f"MISS/{column}"


def outl_label(column: str) -> str:
    return f"OUTL/{column}"


def corr_label(a: str, b: str) -> str:
    first, second = sorted((a, b))
    return f"CORR/{first}~{second}"


# ==== plain statistics (shared by noisy and exact paths) ====


def _quantile_linear(sorted_values: np.ndarray, q: float) -> float:
    """Linear-interpolation quantile on an already sorted array."""
    n = len(sorted_values)
    if n == 0:
        raise EmptyColumn("quantile of an empty column")
    if n == 1:
        return float(sorted_values[0])
    position = q * (n - 1)
    low = int(math.floor(position))
    high = min(low + 1, n - 1)
    weight = position - low
    return float(sorted_values[low] * (1.0 - weight) + sorted_values[high] * weight)


def five_number_summary(values: np.ndarray) -> dict[str, float]:
    data = np.sort(np.asarray(values, dtype=float))
    if len(data) == 0:
        raise EmptyColumn("summary of an empty column")
    return {
        "min": float(data[0]),
        "max": float(data[-1]),
        "q1": _quantile_linear(data, 0.25),
        "q2": _quantile_linear(data, 0.50),
        "q3": _quantile_linear(data, 0.75),
    }


def bin_index(values: np.ndarray, bounds: tuple[float, float], bins: int) -> np.ndarray:
    """Equal-width bin index in [0, bins-1]; the upper bound folds into the last bin."""
    lower, upper = bounds
    width = (upper - lower) / bins
    idx = np.floor((np.asarray(values, dtype=float) - lower) / width).astype(int)
    return np.clip(idx, 0, bins - 1)


def joint_numeric_table(
    ds: Dataset, col_a: str, col_b: str, bins: int
) -> np.ndarray:
    """bins x bins joint count table over rows where both cells are present."""
    spec_a, spec_b = ds.schema.column(col_a), ds.schema.column(col_b)
    raw_a, raw_b = ds.column_values(col_a), ds.column_values(col_b)
    pairs = [(x, y) for x, y in zip(raw_a, raw_b) if x is not None and y is not None]
    table = np.zeros((bins, bins))
    if pairs:
        xs = bin_index(np.array([p[0] for p in pairs]), spec_a.bounds, bins)
        ys = bin_index(np.array([p[1] for p in pairs]), spec_b.bounds, bins)
        np.add.at(table, (xs, ys), 1.0)
    return table


def contingency_table(ds: Dataset, col_a: str, col_b: str) -> np.ndarray:
    """|domain_a| x |domain_b| count table over rows where both are present."""
    spec_a, spec_b = ds.schema.column(col_a), ds.schema.column(col_b)
    index_a = {level: i for i, level in enumerate(spec_a.domain)}
    index_b = {level: i for i, level in enumerate(spec_b.domain)}
    table = np.zeros((len(spec_a.domain), len(spec_b.domain)))
    for x, y in zip(ds.column_values(col_a), ds.column_values(col_b)):
        if x is not None and y is not None:
            table[index_a[x], index_b[y]] += 1.0
    return table


def midrank_pearson(table: np.ndarray) -> float | None:
    """Spearman rho of a (possibly fractional) joint mass table.

    Bin indices get midranks weighted by marginal mass; the result is the
    mass-weighted Pearson correlation of those midranks. None when either
    marginal carries all its mass in a single bin (the statistic is undefined).
    """
    table = np.asarray(table, dtype=float)
    total = table.sum()
    if total <= 0:
        return None
    row_mass = table.sum(axis=1)
    col_mass = table.sum(axis=0)

    def midranks(mass: np.ndarray) -> np.ndarray:
        cumulative = np.concatenate(([0.0], np.cumsum(mass)))
        return cumulative[:-1] + (mass + 1.0) / 2.0

    rank_a, rank_b = midranks(row_mass), midranks(col_mass)
    mean_a = float(row_mass @ rank_a) / total
    mean_b = float(col_mass @ rank_b) / total
    dev_a, dev_b = rank_a - mean_a, rank_b - mean_b
    var_a = float(row_mass @ dev_a**2)
    var_b = float(col_mass @ dev_b**2)
    if var_a <= 0.0 or var_b <= 0.0:
        return None
    covariance = float(dev_a @ table @ dev_b)
    rho = covariance / math.sqrt(var_a * var_b)
    return float(min(1.0, max(-1.0, rho)))


EXPECTED_COUNT_FLOOR = 1e-6


def cramers_v_from_table(table: np.ndarray) -> float:
    """Cramer's V of a nonnegative contingency table.

    Expected counts come from the table's own marginals; cells whose expected
    count falls below EXPECTED_COUNT_FLOOR are skipped, and the grand total in
    the normalization is floored at one so near-empty noisy tables stay finite.
    """
    table = np.asarray(table, dtype=float)
    rows, cols = table.shape
    if rows < 2 or cols < 2:
        raise DegenerateColumn("Cramer's V needs at least two levels per column")
    total = table.sum()
    m_hat = max(total, 1.0)
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / m_hat
    mask = expected >= EXPECTED_COUNT_FLOOR
    if not mask.any():
        return 0.0
    chi_square = float((((table - expected) ** 2)[mask] / expected[mask]).sum())
    v = math.sqrt(chi_square / (m_hat * min(rows - 1, cols - 1)))
    return float(min(1.0, max(0.0, v)))


# ==== metered queries ====


def dist_numeric(
    ds: Dataset,
    column: str,
    eps_i,
    ledger: Ledger | None,
    rng: np.random.Generator,
    policy: ReleasePolicy = PRODUCTION,
    quantile_mode: str = LAPLACE_QUANTILES,
) -> DistNumericResult:
    """Release min, max, Q1, Q2, Q3 of a numeric column.

    Exactly five sequential charges of eps_i each, accepted atomically: a
    budget refusal releases nothing. Every statistic is a location in
    [lower, upper], so the Laplace sensitivity of each is upper - lower.
    quantile_mode="exponential" swaps the three quantiles to the
    interval-selection exponential mechanism (same per-statistic epsilon; its
    recorded sensitivity is the rank-utility sensitivity 1).
    """
    spec = ds.schema.column(column)
    if spec.kind != NUMERIC:
        raise KindError(f"DIST five-number summary needs a numeric column, not {column!r}")
    if quantile_mode not in (LAPLACE_QUANTILES, EXPONENTIAL_QUANTILES):
        raise ParamError(f"unknown quantile_mode {quantile_mode!r}")
    _require_ledger(ledger, policy)
    values = ds.present_numeric(column)
    if len(values) == 0:
        raise EmptyColumn(f"column {column!r} has no present values")

    if policy.charge:
        ledger.charge_group(
            [(eps_i, dist_label(column, part), SEQUENTIAL) for part in DistNumericResult.PARTS]
        )

    exact = five_number_summary(values)
    eps_float = float(exact_fraction(eps_i))
    location_params = MechanismParams(sensitivity=spec.width, epsilon=eps_float)

    def laplace_release(true_value: float) -> NoisyValue:
        return laplace_mechanism(
            true_value, location_params, rng,
            keep_true=policy.keep_true, noise=policy.noise,
        )

    released: dict[str, NoisyValue] = {}
    for part, q in (("min", None), ("max", None), ("q1", 0.25), ("q2", 0.50), ("q3", 0.75)):
        true_value = exact[part]
        if q is not None and quantile_mode == EXPONENTIAL_QUANTILES and policy.noise:
            value = exponential_quantile(values, q, spec.bounds, eps_float, rng)
            released[part] = NoisyValue(
                value=value,
                params=MechanismParams(sensitivity=1.0, epsilon=eps_float),
                true_value=true_value if policy.keep_true else None,
            )
        else:
            released[part] = laplace_release(true_value)

    return DistNumericResult(
        column=column,
        minimum=released["min"],
        maximum=released["max"],
        q1=released["q1"],
        q2=released["q2"],
        q3=released["q3"],
    )


def dist_categorical(
    ds: Dataset,
    column: str,
    eps_i,
    ledger: Ledger | None,
    rng: np.random.Generator,
    policy: ReleasePolicy = PRODUCTION,
) -> HistogramResult:
    """Release the full histogram of a categorical column in one charge.

    Cells (domain levels plus the missing cell) partition the records, so by
    parallel composition one charge of eps_i covers the whole histogram; each
    cell count has sensitivity 1 and gets independent Laplace(1/eps_i) noise.
    Raw noisy counts may be negative; see HistogramResult.counts_nonneg.
    """
    spec = ds.schema.column(column)
    if spec.kind != CATEGORICAL:
        raise KindError(f"histograms need a categorical column, not {column!r}")
    _require_ledger(ledger, policy)
    if policy.charge:
        ledger.charge(eps_i, dist_label(column), PARALLEL_GROUP)

    eps_float = float(exact_fraction(eps_i))
    params = MechanismParams(sensitivity=1.0, epsilon=eps_float)
    counts = ds.category_counts(column)
    categories = tuple(spec.domain) + (MISSING_LABEL,)
    released = tuple(
        laplace_mechanism(
            float(counts[category]), params, rng,
            keep_true=policy.keep_true, noise=policy.noise,
        )
        for category in categories
    )
    return HistogramResult(
        column=column, categories=categories, counts=released, epsilon=eps_float
    )


def missing_count(
    ds: Dataset,
    column: str,
    eps_i,
    ledger: Ledger | None,
    rng: np.random.Generator,
    policy: ReleasePolicy = PRODUCTION,
) -> NoisyValue:
    """Noisy number of missing cells in a numeric column (sensitivity 1).

    Categorical columns already expose absence through their histogram's
    missing cell, so asking here is a KindError.
    """
    spec = ds.schema.column(column)
    if spec.kind != NUMERIC:
        raise KindError(f"missing_count covers numeric columns; {column!r} is categorical")
    _require_ledger(ledger, policy)
    if policy.charge:
        ledger.charge(eps_i, miss_label(column), SEQUENTIAL)
    params = MechanismParams(sensitivity=1.0, epsilon=float(exact_fraction(eps_i)))
    return laplace_mechanism(
        float(ds.missing_in(column)), params, rng,
        keep_true=policy.keep_true, noise=policy.noise,
    )


def iqr_cutoffs(q1: float, q3: float) -> tuple[float, float]:
    spread = q3 - q1
    return q1 - IQR_FACTOR * spread, q3 + IQR_FACTOR * spread


def outlier_count(
    ds: Dataset,
    column: str,
    eps_i,
    ledger: Ledger | None,
    rng: np.random.Generator,
    q1: float,
    q3: float,
    policy: ReleasePolicy = PRODUCTION,
) -> NoisyValue:
    """Noisy count of present values outside [q1 - 1.5 IQR, q3 + 1.5 IQR].

    q1 and q3 must be the noisy quantiles this session already paid for via
    the column's DIST release; cutoffs derived from released values are
    post-processing, so only the count itself (sensitivity 1) is charged.
    Raises MissingPrerequisite when the ledger shows no such release.
    """
    spec = ds.schema.column(column)
    if spec.kind != NUMERIC:
        raise KindError(f"outlier counts need a numeric column, not {column!r}")
    _require_ledger(ledger, policy)
    if policy.charge:
        needed = dist_label(column, "q1")
        if not any(charge.label == needed for charge in ledger.charges):
            raise MissingPrerequisite(dist_label(column))
        ledger.charge(eps_i, outl_label(column), SEQUENTIAL)
    low, high = iqr_cutoffs(float(q1), float(q3))
    values = ds.present_numeric(column)
    true_count = float(np.count_nonzero((values < low) | (values > high)))
    params = MechanismParams(sensitivity=1.0, epsilon=float(exact_fraction(eps_i)))
    return laplace_mechanism(
        true_count, params, rng, keep_true=policy.keep_true, noise=policy.noise
    )


def spearman_dp(
    ds: Dataset,
    col_a: str,
    col_b: str,
    eps_i,
    ledger: Ledger | None,
    rng: np.random.Generator,
    policy: ReleasePolicy = PRODUCTION,
    bins: int = CORRELATION_BINS,
) -> CorrelationResult:
    """Spearman rank correlation of two numeric columns under one charge.

    Rows with both cells present are binned into a bins x bins equal-width
    joint table whose cells partition the records; one parallel-group charge
    of eps_i covers per-cell Laplace(1/eps_i) noise. Negative noisy cells are
    clamped to zero and rho is the weighted midrank Pearson of the table,
    clamped to [-1, 1]. If a noisy marginal collapses into a single bin the
    result is an explicit undefined marker; the charge stays debited.
    """
    if bins < 2:
        raise ParamError("need at least two bins")
    for name in (col_a, col_b):
        if ds.schema.column(name).kind != NUMERIC:
            raise KindError(f"Spearman needs numeric columns; {name!r} is not")
    if col_a == col_b:
        raise ParamError("correlation needs two distinct columns")
    first, second = sorted((col_a, col_b))
    _require_ledger(ledger, policy)
    if policy.charge:
        ledger.charge(eps_i, corr_label(first, second), PARALLEL_GROUP)

    eps_float = float(exact_fraction(eps_i))
    table = joint_numeric_table(ds, first, second, bins)
    true_rho = midrank_pearson(table) if policy.keep_true else None
    if policy.noise:
        noisy = table + sample_laplace(1.0 / eps_float, rng, size=table.size).reshape(
            table.shape
        )
        noisy = np.clip(noisy, 0.0, None)
    else:
        noisy = table
    rho = midrank_pearson(noisy)
    return CorrelationResult(
        columns=(first, second),
        method="spearman",
        coefficient=rho,
        undefined=rho is None,
        epsilon=eps_float,
        true_coefficient=true_rho,
    )


def cramers_v_dp(
    ds: Dataset,
    col_a: str,
    col_b: str,
    eps_i,
    ledger: Ledger | None,
    rng: np.random.Generator,
    policy: ReleasePolicy = PRODUCTION,
) -> CorrelationResult:
    """Cramer's V association of two categorical columns under one charge.

    The declared-domain contingency table of rows with both cells present is
    noised cell-wise (parallel composition, one eps_i charge), clamped at
    zero, and fed through the chi-square formula with expected counts from the
    noisy marginals. Domains with fewer than two levels make the statistic
    undefined a priori, which is a DegenerateColumn error raised before any
    charge since it depends only on public metadata.
    """
    specs = []
    for name in (col_a, col_b):
        spec = ds.schema.column(name)
        if spec.kind != CATEGORICAL:
            raise KindError(f"Cramer's V needs categorical columns; {name!r} is not")
        specs.append(spec)
    if col_a == col_b:
        raise ParamError("correlation needs two distinct columns")
    if min(len(specs[0].domain), len(specs[1].domain)) < 2:
        raise DegenerateColumn("both domains need at least two levels")
    first, second = sorted((col_a, col_b))
    _require_ledger(ledger, policy)
    if policy.charge:
        ledger.charge(eps_i, corr_label(first, second), PARALLEL_GROUP)

    eps_float = float(exact_fraction(eps_i))
    table = contingency_table(ds, first, second)
    true_v = cramers_v_from_table(table) if policy.keep_true else None
    if policy.noise:
        noisy = table + sample_laplace(1.0 / eps_float, rng, size=table.size).reshape(
            table.shape
        )
        noisy = np.clip(noisy, 0.0, None)
    else:
        noisy = table
    v = cramers_v_from_table(noisy)
    return CorrelationResult(
        columns=(first, second),
        method="cramers_v",
        coefficient=v,
        undefined=False,
        epsilon=eps_float,
        true_coefficient=true_v,
    )


# ==== closed-form budget and the full pass ====


@dataclass(frozen=True)
class BudgetBreakdown:
    """Closed-form privacy price of one full basic-EDA pass.

    With n numeric and c categorical columns at per-query eps_i:
      dist = eps_i * (5n + c)   five summary statistics per numeric column,
                                one histogram charge per categorical column
      miss = eps_i * n
      outl = eps_i * n
      corr = eps_i * (C(n,2) + C(c,2))
    """

    dist_exact: Fraction
    miss_exact: Fraction
    outl_exact: Fraction
    corr_exact: Fraction

    @property
    def total_exact(self) -> Fraction:
        return self.dist_exact + self.miss_exact + self.outl_exact + self.corr_exact

    @property
    def dist(self) -> float:
        return float(self.dist_exact)

    @property
    def miss(self) -> float:
        return float(self.miss_exact)

    @property
    def outl(self) -> float:
        return float(self.outl_exact)

    @property
    def corr(self) -> float:
        return float(self.corr_exact)

    @property
    def total(self) -> float:
        return float(self.total_exact)


def budget_closed_form(num_numeric: int, num_categorical: int, eps_i) -> BudgetBreakdown:
    if num_numeric < 0 or num_categorical < 0:
        raise ParamError("column counts must be >= 0")
    eps = exact_fraction(eps_i)
    if eps <= 0:
        raise ParamError("eps_i must be > 0")
    return BudgetBreakdown(
        dist_exact=eps * (5 * num_numeric + num_categorical),
        miss_exact=eps * num_numeric,
        outl_exact=eps * num_numeric,
        corr_exact=eps
        * (math.comb(num_numeric, 2) + math.comb(num_categorical, 2)),
    )


def run_basic_eda(
    ds: Dataset,
    eps_i,
    ledger: Ledger | None,
    rng: np.random.Generator,
    policy: ReleasePolicy = PRODUCTION,
    bins: int = CORRELATION_BINS,
    quantile_mode: str = LAPLACE_QUANTILES,
) -> EdaReport:
    """Run the whole fixed query set in its canonical order.

    Order: DIST over numeric columns (schema order), DIST over categorical
    columns (schema order), MISS, OUTL, then CORR over numeric pairs and
    categorical pairs, each pair list sorted lexicographically. The total
    price is checked against the ledger up front so a run that cannot finish
    is refused before its first release.
    """
    schema = ds.schema
    numeric = schema.numeric_names
    categorical = schema.categorical_names
    eps_float = float(exact_fraction(eps_i))

    if policy.charge:
        _require_ledger(ledger, policy)
        price = budget_closed_form(len(numeric), len(categorical), eps_i)
        if price.total_exact > ledger.remaining_exact + BUDGET_TOLERANCE:
            raise BudgetExhausted(
                requested=price.total, remaining=ledger.remaining
            )

    report = EdaReport()
    dist_results: dict[str, DistNumericResult] = {}

    for column in numeric:
        result = dist_numeric(
            ds, column, eps_i, ledger, rng, policy, quantile_mode=quantile_mode
        )
        dist_results[column] = result
        report.add(
            EdaEntry(
                function="DIST",
                columns=(column,),
                epsilon=5 * eps_float,
                sensitivity=schema.column(column).width,
                payload=result,
            )
        )
    for column in categorical:
        histogram = dist_categorical(ds, column, eps_i, ledger, rng, policy)
        report.add(
            EdaEntry(
                function="DIST",
                columns=(column,),
                epsilon=eps_float,
                sensitivity=1.0,
                payload=histogram,
            )
        )
    for column in numeric:
        count = missing_count(ds, column, eps_i, ledger, rng, policy)
        report.add(
            EdaEntry(
                function="MISS",
                columns=(column,),
                epsilon=eps_float,
                sensitivity=1.0,
                payload=count,
            )
        )
    for column in numeric:
        summary = dist_results[column]
        count = outlier_count(
            ds, column, eps_i, ledger, rng,
            q1=summary.q1.value, q3=summary.q3.value, policy=policy,
        )
        report.add(
            EdaEntry(
                function="OUTL",
                columns=(column,),
                epsilon=eps_float,
                sensitivity=1.0,
                payload=count,
            )
        )
    for first, second in combinations(sorted(numeric), 2):
        result = spearman_dp(
            ds, first, second, eps_i, ledger, rng, policy, bins=bins
        )
        report.add(
            EdaEntry(
                function="CORR",
                columns=(first, second),
                epsilon=eps_float,
                sensitivity=1.0,
                payload=result,
            )
        )
    for first, second in combinations(sorted(categorical), 2):
        result = cramers_v_dp(ds, first, second, eps_i, ledger, rng, policy)
        report.add(
            EdaEntry(
                function="CORR",
                columns=(first, second),
                epsilon=eps_float,
                sensitivity=1.0,
                payload=result,
            )
        )
    return report
