"""Noise primitives: Laplace and exponential mechanisms, plus a brute-force
sensitivity oracle used by the test suite to validate declared sensitivities.

All randomness flows through an explicit numpy Generator so that a fixed seed
reproduces every released value bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable, Sequence

import numpy as np

from dpeda.errors import ParamError, TooLarge


@dataclass(frozen=True)
class MechanismParams:
    """Calibration of one Laplace release: sensitivity, epsilon, derived scale."""

    sensitivity: float
    epsilon: float

    def __post_init__(self):
        if not (self.sensitivity > 0) or not math.isfinite(self.sensitivity):
            raise ParamError(f"sensitivity must be finite and > 0, got {self.sensitivity}")
        if not (self.epsilon > 0) or not math.isfinite(self.epsilon):
            raise ParamError(f"epsilon must be finite and > 0, got {self.epsilon}")

    @property
    def scale(self) -> float:
        # exactly sensitivity / epsilon; the single calibration rule of the package
        return self.sensitivity / self.epsilon


@dataclass(frozen=True)
class NoisyValue:
    """A released value plus its calibration.

    true_value is populated only when the caller ran in test mode; production
    releases carry None there and never serialize the exact statistic.
    """

    value: float
    params: MechanismParams | None
    true_value: float | None = None


def sample_laplace(scale: float, rng: np.random.Generator, size: int | None = None):
    """Draw Laplace(0, scale) noise by inverse-CDF transform of uniform draws.

    scale == 0 returns exactly 0.0 (the degenerate noiseless case); negative
    scale is a ParamError. With size=None a scalar float is returned,
    otherwise an ndarray of that length.
    """
    if scale < 0:
        raise ParamError(f"scale must be >= 0, got {scale}")
    if size is None:
        if scale == 0:
            return 0.0
        u = rng.random() - 0.5
        while u == -0.5:  # avoid log(0); probability ~2**-53
            u = rng.random() - 0.5
        return -scale * math.copysign(1.0, u) * math.log1p(-2.0 * abs(u))
    if scale == 0:
        return np.zeros(int(size))
    u = rng.random(int(size)) - 0.5
    bad = u == -0.5
    while np.any(bad):
        u[bad] = rng.random(int(np.count_nonzero(bad))) - 0.5
        bad = u == -0.5
    return -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def laplace_mechanism(
    true_value: float,
    params: MechanismParams,
    rng: np.random.Generator,
    keep_true: bool = False,
    noise: bool = True,
) -> NoisyValue:
    """Release true_value + Laplace(sensitivity/epsilon) noise.

    noise=False skips the draw (test mode); the calibration is still recorded.
    """
    draw = sample_laplace(params.scale, rng) if noise else 0.0
    return NoisyValue(
        value=float(true_value) + draw,
        params=params,
        true_value=float(true_value) if keep_true else None,
    )


def exponential_mechanism(
    candidates: Sequence,
    scores: Sequence[float],
    score_sensitivity: float,
    epsilon: float,
    rng: np.random.Generator,
):
    """Select one candidate with probability proportional to
    exp(epsilon * score / (2 * score_sensitivity)).

    Scores are shifted by their maximum before exponentiation so the weights
    stay finite for any epsilon.
    """
    if len(candidates) == 0:
        raise ParamError("exponential_mechanism needs at least one candidate")
    if len(candidates) != len(scores):
        raise ParamError("candidates and scores must have equal length")
    if not (score_sensitivity > 0):
        raise ParamError("score_sensitivity must be > 0")
    if not (epsilon > 0):
        raise ParamError("epsilon must be > 0")
    logits = (epsilon / (2.0 * score_sensitivity)) * np.asarray(scores, dtype=float)
    logits -= logits.max()
    weights = np.exp(logits)
    probabilities = weights / weights.sum()
    index = rng.choice(len(candidates), p=probabilities)
    return candidates[int(index)]


def exponential_quantile(
    values: Sequence[float],
    q: float,
    bounds: tuple[float, float],
    epsilon: float,
    rng: np.random.Generator,
) -> float:
    """Optional quantile release via interval selection.

    The sorted, clamped values split [lower, upper] into n+1 gaps; gap i is
    weighted by width_i * exp(epsilon * u_i / 2) where u_i = -|i - q*n| is the
    rank utility (sensitivity 1 under add/remove of one record), then a point
    is drawn uniformly inside the winning gap. Kept behind a configuration
    switch for accuracy comparisons against the Laplace route.
    """
    if not (0.0 <= q <= 1.0):
        raise ParamError("q must lie in [0, 1]")
    if not (epsilon > 0):
        raise ParamError("epsilon must be > 0")
    lower, upper = float(bounds[0]), float(bounds[1])
    if lower >= upper:
        raise ParamError("bounds must satisfy lower < upper")
    data = np.clip(np.asarray(values, dtype=float), lower, upper)
    data.sort()
    edges = np.concatenate(([lower], data, [upper]))
    widths = np.diff(edges)
    n = len(data)
    utilities = -np.abs(np.arange(n + 1) - q * n)
    with np.errstate(divide="ignore"):
        log_weights = np.log(widths) + (epsilon / 2.0) * utilities
    log_weights -= log_weights.max()
    weights = np.exp(log_weights)
    total = weights.sum()
    if not (total > 0):
        raise ParamError("degenerate bounds: every gap has zero width")
    index = int(rng.choice(n + 1, p=weights / total))
    return float(rng.uniform(edges[index], edges[index + 1]))


def max_sensitivity_oracle(
    query: Callable[[list], float],
    universe: Sequence,
    max_m: int,
    max_evals: int = 2_000_000,
) -> float:
    """Exhaustively measure the add/remove-one sensitivity of a query.

    Enumerates every multiset over `universe` of size 0..max_m and every
    neighbor reachable by adding one universe element, returning the largest
    |query(D) - query(D')| observed. Remove-one neighbors are covered for
    free because each (D, D + [u]) pair is also a removal pair. The query must
    be total on every list it is handed, the empty list included. Raises
    TooLarge if the enumeration would exceed max_evals query evaluations.
    """
    if max_m < 0:
        raise ParamError("max_m must be >= 0")
    if not universe:
        raise ParamError("universe must be non-empty")
    k = len(set(universe))
    if k != len(universe):
        raise ParamError("universe must not repeat values")
    datasets = 0
    for m in range(max_m + 1):
        datasets += math.comb(k + m - 1, m)
    if datasets * (1 + k) > max_evals:
        raise TooLarge(
            f"{datasets * (1 + k)} evaluations exceed the {max_evals} limit"
        )
    worst = 0.0
    for m in range(max_m + 1):
        for combo in combinations_with_replacement(universe, m):
            base = float(query(list(combo)))
            for u in universe:
                delta = abs(float(query(list(combo) + [u])) - base)
                if delta > worst:
                    worst = delta
    return worst
