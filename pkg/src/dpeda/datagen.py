"""Built-in synthetic source datasets.

Two generators, both fully determined by their seed:

* make_desk_dataset: a 5000-row service-desk ticket log with three numeric
  and three long-tailed categorical columns (around one hundred declared
  levels each, a handful of which never occur). The shape is what the
  experiment harness runs on by default.
* make_demo_dataset: a small cafe sales log with friendly domains, used by
  the demo service and the console walkthrough.
"""

from __future__ import annotations

import numpy as np

from dpeda.core import CATEGORICAL, NUMERIC, ColumnSpec, Dataset, Schema

DESK_SEED = 777
DEMO_SEED = 4242


def _zipf_weights(count: int, offset: float, power: float) -> np.ndarray:
    weights = 1.0 / np.power(np.arange(count) + offset, power)
    return weights / weights.sum()


def _coded_levels(prefix: str, count: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i:03d}" for i in range(1, count + 1))


def make_desk_dataset(seed: int = DESK_SEED, num_rows: int = 5000) -> Dataset:
    """Service-desk tickets: handling time, requester age, satisfaction,
    plus branch, product, and agent codes drawn from Zipf-shaped tails.

    Each categorical domain declares a few codes beyond what the draw can
    produce, so zero-count levels exist by construction.
    """
    rng = np.random.default_rng(seed)
    plan = (
        # name, declared levels, never-drawn levels
        ("branch", 100, 4),
        ("product", 90, 5),
        ("agent", 110, 6),
    )
    columns = [
        ColumnSpec("handle_minutes", NUMERIC, bounds=(0, 480)),
        ColumnSpec("requester_age", NUMERIC, bounds=(18, 75)),
        ColumnSpec("satisfaction", NUMERIC, bounds=(0, 10)),
    ]
    data: dict[str, list] = {
        "handle_minutes": np.clip(rng.lognormal(3.2, 0.9, num_rows), 0, 480).tolist(),
        "requester_age": np.clip(rng.normal(41, 12, num_rows), 18, 75).tolist(),
        "satisfaction": np.clip(rng.normal(7.4, 1.8, num_rows), 0, 10).tolist(),
    }
    for name, declared, dead in plan:
        levels = _coded_levels(name[0], declared)
        active = declared - dead
        draws = rng.choice(active, size=num_rows, p=_zipf_weights(active, 10.0, 1.0))
        data[name] = [levels[d] for d in draws]
        columns.append(ColumnSpec(name, CATEGORICAL, domain=levels))
    return Dataset(Schema(tuple(columns)), data)


def make_demo_dataset(seed: int = DEMO_SEED, num_rows: int = 2000) -> Dataset:
    """Cafe sales: order total, wait time, drink, and cup size."""
    rng = np.random.default_rng(seed)
    drinks = ("espresso", "latte", "cappuccino", "filter", "mocha", "tea")
    sizes = ("small", "regular", "large")
    drink_weights = np.array([0.25, 0.30, 0.15, 0.14, 0.06, 0.10])
    size_weights = np.array([0.20, 0.55, 0.25])
    columns = (
        ColumnSpec("total", NUMERIC, bounds=(0, 50)),
        ColumnSpec("wait_minutes", NUMERIC, bounds=(0, 30)),
        ColumnSpec("drink", CATEGORICAL, domain=drinks),
        ColumnSpec("size", CATEGORICAL, domain=sizes),
    )
    data = {
        "total": np.clip(rng.gamma(3.0, 3.0, num_rows), 0, 50).tolist(),
        "wait_minutes": np.clip(rng.exponential(6.0, num_rows), 0, 30).tolist(),
        "drink": [drinks[i] for i in rng.choice(6, num_rows, p=drink_weights)],
        "size": [sizes[i] for i in rng.choice(3, num_rows, p=size_weights)],
    }
    return Dataset(Schema(columns), data)
