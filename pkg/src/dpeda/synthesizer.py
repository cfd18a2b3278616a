"""Private synthetic data via a degree-k Bayesian network.

Pipeline: discretize the dataset to finite codes, learn a network structure
greedily with the exponential mechanism over mutual-information scores, noise
one joint count table per variable into conditional distributions, and sample
synthetic rows ancestrally. The total privacy charge is split half/half
between structure and parameters; the caller meters it against a ledger.

Statistics computed on the synthetic output are post-processing and cost no
further budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from dpeda.core import CATEGORICAL, NUMERIC, ColumnSpec, Dataset, Schema
from dpeda.errors import ParamError
from dpeda.mechanisms import exponential_mechanism, sample_laplace

DEFAULT_BINS = 20

# Score sensitivity for the exponential mechanism over mutual-information
# scores. Plug-in MI between two finite variables can jump by at most log 2
# on every add-one neighbor pair the exhaustive oracle in the test suite can
# reach; we ship twice that bound as a safety margin. Callers with a tighter
# analytic bound can pass their own value.
DEFAULT_MI_SENSITIVITY = 2.0 * math.log(2.0)

# Candidate parent sets whose joint table would exceed this many cells are
# skipped during structure search; the empty parent set always survives, so
# every variable keeps at least one candidate.
DEFAULT_MAX_CELLS = 2_000_000

MISSING_CODE_LABEL = "<missing>"


def column_arity(spec: ColumnSpec, bins: int) -> int:
    """Code count for a column in the discrete view; the last code is missing."""
    if spec.kind == NUMERIC:
        return bins + 1
    return len(spec.domain) + 1


@dataclass(frozen=True)
class DiscreteView:
    """Integer-coded rendering of a dataset.

    Numeric columns become equal-width bin indices over their declared
    bounds; categorical columns become domain indices. Missing is the last
    code of every column, so no row is dropped and missingness survives
    synthesis as a regular symbol.
    """

    schema: Schema
    codes: dict[str, np.ndarray]
    bins: int

    def arity(self, name: str) -> int:
        return column_arity(self.schema.column(name), self.bins)

    @property
    def num_rows(self) -> int:
        if not self.schema.names:
            return 0
        return len(self.codes[self.schema.names[0]])


def discretize(ds: Dataset, bins: int = DEFAULT_BINS) -> DiscreteView:
    """Map every column of ds to integer codes.

    Numeric values land in floor((x - L) / width) with the upper bound folded
    into the last bin; categorical values take their domain index. Missing
    maps to the column's final code.
    """
    if bins < 2:
        raise ParamError(f"bins must be >= 2, got {bins}")
    codes: dict[str, np.ndarray] = {}
    for spec in ds.schema.columns:
        values = ds.column_values(spec.name)
        if spec.kind == NUMERIC:
            lower, upper = spec.bounds
            width = (upper - lower) / bins
            missing_code = bins
            column = np.full(len(values), missing_code, dtype=np.int64)
            present = [i for i, v in enumerate(values) if v is not None]
            if present:
                data = np.array([values[i] for i in present], dtype=float)
                binned = np.floor((data - lower) / width).astype(np.int64)
                column[present] = np.clip(binned, 0, bins - 1)
        else:
            index = {level: i for i, level in enumerate(spec.domain)}
            missing_code = len(spec.domain)
            column = np.array(
                [missing_code if v is None else index[v] for v in values],
                dtype=np.int64,
            )
        codes[spec.name] = column
    return DiscreteView(ds.schema, codes, bins)


def mutual_information_codes(x: np.ndarray, parents: list[np.ndarray]) -> float:
    """Plug-in mutual information, in nats, between x and the joint of parents.

    Empty parent list or empty data scores 0. Computed on observed code
    combinations only, so sparse high-arity joints stay cheap.
    """
    m = len(x)
    if m == 0 or not parents:
        return 0.0
    stacked = np.column_stack(parents)
    _, parent_ids = np.unique(stacked, axis=0, return_inverse=True)
    _, x_ids = np.unique(x, return_inverse=True)
    joint_ids = parent_ids * (x_ids.max() + 1) + x_ids
    joint_counts = np.bincount(joint_ids).astype(float)
    joint_counts = joint_counts[joint_counts > 0]
    x_counts = np.bincount(x_ids).astype(float)
    p_counts = np.bincount(parent_ids).astype(float)
    h_x = -np.sum((x_counts / m) * np.log(x_counts / m))
    h_p = -np.sum((p_counts / m) * np.log(p_counts / m))
    h_joint = -np.sum((joint_counts / m) * np.log(joint_counts / m))
    return max(0.0, h_x + h_p - h_joint)


@dataclass(frozen=True)
class NetworkNode:
    name: str
    parents: tuple[str, ...]


@dataclass(frozen=True)
class BayesianNetwork:
    """Variable order plus per-variable parent sets, acyclic by construction."""

    nodes: tuple[NetworkNode, ...]
    degree: int

    def __post_init__(self):
        seen: set[str] = set()
        for node in self.nodes:
            if len(node.parents) > self.degree:
                raise ParamError(
                    f"{node.name} has {len(node.parents)} parents, degree is {self.degree}"
                )
            for parent in node.parents:
                if parent not in seen:
                    raise ParamError(f"parent {parent} of {node.name} does not precede it")
            seen.add(node.name)

    def parents_of(self, name: str) -> tuple[str, ...]:
        for node in self.nodes:
            if node.name == name:
                return node.parents
        raise ParamError(f"no node named {name}")


def learn_structure(
    view: DiscreteView,
    degree: int,
    eps1: float,
    rng: np.random.Generator,
    privacy: bool = True,
    mi_sensitivity: float = DEFAULT_MI_SENSITIVITY,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> BayesianNetwork:
    """Greedy network construction.

    The first variable is drawn uniformly. Each later step scores every
    (unplaced variable, parent subset of placed variables with size <= degree)
    pair by mutual information and selects with the exponential mechanism,
    spending eps1 / (d - 1) per step. With privacy=False the argmax is taken
    instead and eps1 is not consumed; the caller must flag the result as
    non-private.

    Parent subsets whose conditional table would exceed max_cells are skipped
    to keep the downstream CPD materialization tractable; the empty subset is
    never skipped.
    """
    if degree < 1:
        raise ParamError(f"degree must be >= 1, got {degree}")
    names = list(view.schema.names)
    d = len(names)
    if d == 0:
        raise ParamError("cannot learn a network over zero variables")
    if privacy and d > 1 and not (eps1 > 0):
        raise ParamError(f"eps1 must be > 0, got {eps1}")
    first = names[int(rng.choice(d))]
    order = [first]
    nodes = [NetworkNode(first, ())]
    remaining = [n for n in names if n != first]
    step_epsilon = eps1 / (d - 1) if d > 1 else None
    while remaining:
        candidates: list[tuple[str, tuple[str, ...]]] = []
        scores: list[float] = []
        for name in remaining:
            arity = view.arity(name)
            for size in range(0, min(degree, len(order)) + 1):
                for parents in combinations(order, size):
                    cells = arity
                    for parent in parents:
                        cells *= view.arity(parent)
                    if size > 0 and cells > max_cells:
                        continue
                    candidates.append((name, parents))
                    scores.append(
                        mutual_information_codes(
                            view.codes[name], [view.codes[p] for p in parents]
                        )
                    )
        if privacy:
            chosen = exponential_mechanism(
                candidates, scores, mi_sensitivity, step_epsilon, rng
            )
        else:
            chosen = candidates[int(np.argmax(scores))]
        name, parents = chosen
        order.append(name)
        nodes.append(NetworkNode(name, parents))
        remaining.remove(name)
    return BayesianNetwork(tuple(nodes), degree)


@dataclass(frozen=True)
class NoisyCPD:
    """Per-variable conditional distributions over the discrete view.

    tables[name] has one row per parent configuration (row-major in the
    node's parent order) and one column per code of the variable; every row
    is a probability vector.
    """

    tables: dict[str, np.ndarray]

    def __post_init__(self):
        for name, table in self.tables.items():
            if (table < 0).any():
                raise ParamError(f"negative probability in CPD for {name}")
            if not np.allclose(table.sum(axis=1), 1.0, atol=1e-9):
                raise ParamError(f"unnormalized CPD row for {name}")


def _parent_shape(view_arities: dict[str, int], parents: tuple[str, ...]) -> tuple[int, ...]:
    return tuple(view_arities[p] for p in parents)


def estimate_cpds(
    view: DiscreteView,
    network: BayesianNetwork,
    eps2: float,
    rng: np.random.Generator,
    noise: bool = True,
) -> NoisyCPD:
    """Noisy conditional distribution tables for every network node.

    Each node owns one joint count table of (parents, variable). A table is a
    histogram over disjoint row partitions, so noising all its cells costs
    eps2 / d once; d tables compose sequentially to eps2 total. Noise scale
    is therefore d / eps2 per cell. Negative cells clamp to zero and rows
    normalize to probabilities; rows left all-zero become uniform.
    """
    if noise and not (eps2 > 0):
        raise ParamError(f"eps2 must be > 0, got {eps2}")
    d = len(network.nodes)
    arities = {name: view.arity(name) for name in view.schema.names}
    scale = d / eps2 if noise else 0.0
    tables: dict[str, np.ndarray] = {}
    for node in network.nodes:
        arity = arities[node.name]
        shape = _parent_shape(arities, node.parents)
        rows = int(np.prod(shape, dtype=np.int64)) if shape else 1
        counts = np.zeros((rows, arity), dtype=float)
        child = view.codes[node.name]
        if view.num_rows:
            if node.parents:
                config = np.ravel_multi_index(
                    tuple(view.codes[p] for p in node.parents), shape
                )
            else:
                config = np.zeros(len(child), dtype=np.int64)
            np.add.at(counts, (config, child), 1.0)
        if scale:
            counts += sample_laplace(scale, rng, size=counts.size).reshape(counts.shape)
        counts = np.clip(counts, 0.0, None)
        totals = counts.sum(axis=1, keepdims=True)
        empty = totals[:, 0] == 0.0
        counts[empty] = 1.0 / arity
        totals[empty] = 1.0
        tables[node.name] = counts / totals
    return NoisyCPD(tables)


def sample_rows(
    network: BayesianNetwork,
    cpds: NoisyCPD,
    m: int,
    rng: np.random.Generator,
    schema: Schema,
    bins: int = DEFAULT_BINS,
) -> Dataset:
    """Draw m rows ancestrally and decode them to schema values.

    Numeric codes are materialized as uniform draws inside their bin; the
    missing code decodes to a missing cell for either kind.
    """
    if m < 0:
        raise ParamError(f"m must be >= 0, got {m}")
    arities = {name: column_arity(schema.column(name), bins) for name in schema.names}
    sampled: dict[str, np.ndarray] = {}
    for node in network.nodes:
        table = cpds.tables[node.name]
        arity = arities[node.name]
        draws = np.empty(m, dtype=np.int64)
        if node.parents:
            shape = _parent_shape(arities, node.parents)
            config = np.ravel_multi_index(tuple(sampled[p] for p in node.parents), shape)
            for row in np.unique(config):
                members = np.flatnonzero(config == row)
                draws[members] = rng.choice(arity, size=len(members), p=table[row])
        else:
            draws[:] = rng.choice(arity, size=m, p=table[0])
        sampled[node.name] = draws
    columns: dict[str, list] = {}
    for spec in schema.columns:
        codes = sampled[spec.name]
        if spec.kind == NUMERIC:
            lower, upper = spec.bounds
            width = (upper - lower) / bins
            offsets = rng.uniform(0.0, 1.0, size=m)
            values = lower + (codes + offsets) * width
            values = np.minimum(values, upper)
            missing_code = bins
            columns[spec.name] = [
                None if codes[i] == missing_code else float(values[i]) for i in range(m)
            ]
        else:
            levels = spec.domain
            missing_code = len(levels)
            columns[spec.name] = [
                None if c == missing_code else levels[c] for c in codes
            ]
    return Dataset(schema, columns)


@dataclass(frozen=True)
class SynthesisRecord:
    """Provenance of one synthesize call: the budget split and the network."""

    epsilon: float
    eps1: float
    eps2: float
    degree: int
    bins: int
    num_rows: int
    structure_private: bool
    noise: bool
    mi_sensitivity: float
    network: tuple[tuple[str, tuple[str, ...]], ...]

    def to_json(self) -> str:
        payload = {
            "epsilon": self.epsilon,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "degree": self.degree,
            "bins": self.bins,
            "num_rows": self.num_rows,
            "structure_private": self.structure_private,
            "noise": self.noise,
            "mi_sensitivity": self.mi_sensitivity,
            "network": [
                {"name": name, "parents": list(parents)} for name, parents in self.network
            ],
        }
        return json.dumps(payload, indent=2)


def synthesize(
    ds: Dataset,
    epsilon: float,
    degree: int,
    rng: np.random.Generator,
    bins: int = DEFAULT_BINS,
    num_rows: int | None = None,
    structure_privacy: bool = True,
    noise: bool = True,
    mi_sensitivity: float = DEFAULT_MI_SENSITIVITY,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> tuple[Dataset, SynthesisRecord]:
    """Full pipeline at total privacy cost epsilon, split half structure,
    half parameters.

    The function itself does not touch a ledger; the caller charges epsilon
    once (sequential) before invoking it. Statistics computed on the returned
    dataset are post-processing and must not be charged.
    """
    if not (epsilon > 0) or not math.isfinite(epsilon):
        raise ParamError(f"epsilon must be finite and > 0, got {epsilon}")
    eps1 = epsilon / 2.0
    eps2 = epsilon / 2.0
    view = discretize(ds, bins)
    network = learn_structure(
        view, degree, eps1, rng,
        privacy=structure_privacy,
        mi_sensitivity=mi_sensitivity,
        max_cells=max_cells,
    )
    cpds = estimate_cpds(view, network, eps2, rng, noise=noise)
    m = ds.num_rows if num_rows is None else num_rows
    synthetic = sample_rows(network, cpds, m, rng, ds.schema, bins=bins)
    record = SynthesisRecord(
        epsilon=epsilon,
        eps1=eps1,
        eps2=eps2,
        degree=degree,
        bins=bins,
        num_rows=m,
        structure_private=structure_privacy,
        noise=noise,
        mi_sensitivity=mi_sensitivity,
        network=tuple((node.name, node.parents) for node in network.nodes),
    )
    return synthetic, record
