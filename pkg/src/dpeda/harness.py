"""Experiment runner: the cumulative-budget trace and the interactive-versus-
synthetic accuracy comparison, emitted as comma-separated result tables.

Output files (one directory per run, documented column by column in the
repository README):

budget_ledger.csv   one row per accepted charge of a full basic-EDA pass
                    {schema, index, label, epsilon, cumulative}
budget_summary.csv  one row per schema
                    {schema, num_numeric, num_categorical, eps_i, dist, miss,
                     outl, corr, closed_form_total, ledger_total, exhausted}
errors.csv          one row per (query, seed, mode)
                    {schema, function, column, mode, seed, epsilon, error,
                     error_rangenorm}
accuracy_summary.csv five-number summary of the error column
                    {schema, function, mode, count, min, q1, median, q3, max}
released.csv        written only with test_mode=True
                    {schema, query, mode, seed, true_value, released_value}

All randomness derives from the configured seeds, so identical configurations
produce byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from dpeda.accountant import open_session
from dpeda.core import Dataset, load_dataset, load_schema, inject_missing
from dpeda.eda import (
    NOISE_OFF,
    POST_PROCESS,
    PRODUCTION,
    TEST_MODE,
    DistNumericResult,
    EdaReport,
    HistogramResult,
    CorrelationResult,
    budget_closed_form,
    dist_label,
    corr_label,
    five_number_summary,
    miss_label,
    outl_label,
    run_basic_eda,
)
from dpeda.errors import BudgetExhausted, DpError, ParamError
from dpeda.mechanisms import NoisyValue
from dpeda.synthesizer import DEFAULT_BINS, synthesize

INTERACTIVE = "interactive"
SYNTHETIC = "synthetic"
BOTH = "both"

MISSING_FIELD = ""  # CSV cell for an undefined error (degenerate correlation)


def relative_error(true_value: float, noisy_value: float, floor: float = 1.0) -> float:
    """|noisy - true| / max(|true|, floor); the floor keeps near-zero truths
    from blowing the ratio up to infinity."""
    if not (floor > 0):
        raise ParamError(f"floor must be > 0, got {floor}")
    return abs(noisy_value - true_value) / max(abs(true_value), floor)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run needs; validation names the bad field."""

    data_path: str | Path
    schema_path: str | Path
    out_dir: str | Path
    seeds: tuple[int, ...] = (0,)
    eps_i: float = 0.01
    total_budget: float | None = None       # None: the closed-form price
    mode: str = BOTH
    synth_epsilon: float | None = None      # None: the CORR closed-form budget
    degree: int = 4
    bins: int = DEFAULT_BINS
    label: str | None = None                # None: data file stem
    missing_column: str | None = None       # None: first numeric column
    missing_fraction: float = 0.10
    test_mode: bool = False
    noise: bool = True                      # False: calibration runs (error 0)

    def __post_init__(self):
        if not self.seeds:
            raise ParamError("seeds: need at least one seed")
        if not (self.eps_i > 0):
            raise ParamError(f"eps_i: must be > 0, got {self.eps_i}")
        if self.mode not in (INTERACTIVE, SYNTHETIC, BOTH):
            raise ParamError(f"mode: unknown mode {self.mode!r}")
        if self.degree < 1:
            raise ParamError(f"degree: must be >= 1, got {self.degree}")
        if self.bins < 2:
            raise ParamError(f"bins: must be >= 2, got {self.bins}")
        if self.synth_epsilon is not None and not (self.synth_epsilon > 0):
            raise ParamError(f"synth_epsilon: must be > 0, got {self.synth_epsilon}")
        if self.total_budget is not None and not (self.total_budget > 0):
            raise ParamError(f"total_budget: must be > 0, got {self.total_budget}")
        if not (0 <= self.missing_fraction < 1):
            raise ParamError(
                f"missing_fraction: must be in [0, 1), got {self.missing_fraction}"
            )

    @property
    def schema_label(self) -> str:
        return self.label if self.label is not None else Path(self.data_path).stem

    def load(self) -> Dataset:
        schema = load_schema(self.schema_path)
        return load_dataset(self.data_path, schema)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [repr(v) if isinstance(v, float) else v for v in row]
            )


def run_budget_experiment(configs: list[ExperimentConfig]) -> dict:
    """Trace the cumulative privacy loss of one full basic-EDA pass per schema.

    Every config contributes one charge series; all configs must share the
    same output directory. A budget below the closed-form price is reported
    as an exhausted run with an empty series instead of crashing.
    """
    if not configs:
        raise ParamError("configs: need at least one")
    out_dirs = {str(c.out_dir) for c in configs}
    if len(out_dirs) > 1:
        raise ParamError(f"out_dir: configs disagree ({sorted(out_dirs)})")
    out = Path(configs[0].out_dir)
    out.mkdir(parents=True, exist_ok=True)

    ledger_rows: list[list] = []
    summary_rows: list[list] = []
    series: dict[str, list] = {}
    for config in configs:
        ds = config.load()
        num_n = len(ds.schema.numeric_names)
        num_c = len(ds.schema.categorical_names)
        price = budget_closed_form(num_n, num_c, config.eps_i)
        budget = config.total_budget if config.total_budget is not None else price.total
        ledger = open_session(budget)
        rng = np.random.default_rng(config.seeds[0])
        exhausted = False
        try:
            run_basic_eda(ds, config.eps_i, ledger, rng, PRODUCTION)
        except BudgetExhausted:
            exhausted = True
        if not exhausted and ledger.spent_exact != price.total_exact:
            raise DpError(
                f"ledger total {ledger.spent} does not match the closed form {price.total}"
            )
        label = config.schema_label
        rows = ledger.report()
        series[label] = rows
        for row in rows:
            ledger_rows.append(
                [label, row.index, row.label, row.epsilon, row.cumulative]
            )
        summary_rows.append(
            [
                label, num_n, num_c, float(config.eps_i),
                price.dist, price.miss, price.outl, price.corr,
                price.total, ledger.spent, exhausted,
            ]
        )
    _write_csv(
        out / "budget_ledger.csv",
        ["schema", "index", "label", "epsilon", "cumulative"],
        ledger_rows,
    )
    _write_csv(
        out / "budget_summary.csv",
        [
            "schema", "num_numeric", "num_categorical", "eps_i",
            "dist", "miss", "outl", "corr",
            "closed_form_total", "ledger_total", "exhausted",
        ],
        summary_rows,
    )
    return {"series": series, "summary": summary_rows}


# ---- accuracy experiment ----


@dataclass(frozen=True)
class ErrorRecord:
    schema: str
    function: str
    column: str
    mode: str
    seed: int
    epsilon: float
    error: float | None            # None when the statistic was undefined
    error_rangenorm: float | None
    query: str = ""                # charge-style label, for the test-mode file
    true_value: float | None = None
    released_value: float | None = None


def _dist_part_queries(column: str) -> list[str]:
    return [dist_label(column, part) for part in DistNumericResult.PARTS]


def _entry_errors(
    released: EdaReport,
    reference: EdaReport,
    num_rows: int,
    schema_label: str,
    mode: str,
    seed: int,
    epsilon: float,
) -> list[ErrorRecord]:
    """One record per query, comparing a released report against the exact
    reference on the same source dataset.

    Location statistics also get a range-normalized error (divided by U - L);
    counts normalize by the row count and correlations by the width of their
    codomain, so the second column is comparable across families.
    """
    records: list[ErrorRecord] = []

    def emit(function, column, query, true_value, released_value, value_range):
        if true_value is None or released_value is None:
            records.append(
                ErrorRecord(
                    schema_label, function, column, mode, seed, epsilon,
                    None, None, query, true_value, released_value,
                )
            )
            return
        err = relative_error(true_value, released_value)
        rangenorm = abs(released_value - true_value) / value_range
        records.append(
            ErrorRecord(
                schema_label, function, column, mode, seed, epsilon,
                err, rangenorm, query, true_value, released_value,
            )
        )

    for rel_entry, ref_entry in zip(released.entries, reference.entries):
        if (rel_entry.function, rel_entry.columns) != (
            ref_entry.function,
            ref_entry.columns,
        ):
            raise DpError("released and reference reports disagree on the inventory")
        function = rel_entry.function
        column = "~".join(rel_entry.columns)
        payload, truth = rel_entry.payload, ref_entry.payload
        if isinstance(payload, DistNumericResult):
            width = truth.maximum.params.sensitivity
            for part, query in zip(DistNumericResult.PARTS, _dist_part_queries(column)):
                emit(
                    function, column, query,
                    truth.parts()[part].value, payload.parts()[part].value, width,
                )
        elif isinstance(payload, HistogramResult):
            # one parallel charge, one record: cell errors enter as their mean
            diffs = [
                abs(rel_nv.value - ref_nv.value)
                for rel_nv, ref_nv in zip(payload.counts, truth.counts)
            ]
            cell_errors = [
                d / max(abs(ref_nv.value), 1.0)
                for d, ref_nv in zip(diffs, truth.counts)
            ]
            records.append(
                ErrorRecord(
                    schema_label, function, column, mode, seed, epsilon,
                    float(np.mean(cell_errors)),
                    float(np.mean(diffs)) / max(num_rows, 1),
                    dist_label(column),
                )
            )
        elif isinstance(payload, NoisyValue):
            query = miss_label(column) if function == "MISS" else outl_label(column)
            emit(function, column, query, truth.value, payload.value, max(num_rows, 1))
        elif isinstance(payload, CorrelationResult):
            span = 2.0 if payload.method == "spearman" else 1.0
            emit(
                function, column, corr_label(*rel_entry.columns),
                truth.coefficient, payload.coefficient, span,
            )
        else:
            raise DpError(f"unknown payload type {type(payload)!r}")
    return records


def _summarize(records: list[ErrorRecord]) -> list[list]:
    groups: dict[tuple[str, str, str], list[float]] = {}
    for record in records:
        if record.error is None:
            continue
        groups.setdefault((record.schema, record.function, record.mode), []).append(
            record.error
        )
    rows = []
    for (schema_label, function, mode), errors in groups.items():
        summary = five_number_summary(np.array(errors))
        rows.append(
            [
                schema_label, function, mode, len(errors),
                summary["min"], summary["q1"], summary["q2"],
                summary["q3"], summary["max"],
            ]
        )
    return rows


def run_accuracy_experiment(config: ExperimentConfig) -> list[ErrorRecord]:
    """Per-query relative errors, interactive versus synthetic, over seeds.

    Per seed: inject missing values into the designated numeric column, take
    an exact reference pass, answer the full query set interactively in test
    mode, synthesize at the matched budget and profile the synthetic rows for
    free. Writes errors.csv and accuracy_summary.csv (plus released.csv in
    test mode) into the output directory and returns the records.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = config.load()
    num_n = len(base.schema.numeric_names)
    num_c = len(base.schema.categorical_names)
    price = budget_closed_form(num_n, num_c, config.eps_i)
    budget = config.total_budget if config.total_budget is not None else price.total
    synth_epsilon = (
        config.synth_epsilon if config.synth_epsilon is not None else price.corr
    )
    if config.missing_column is not None:
        target = config.missing_column
        if target not in base.schema.numeric_names:
            raise ParamError(f"missing_column: {target!r} is not a numeric column")
    else:
        target = base.schema.numeric_names[0] if base.schema.numeric_names else None

    label = config.schema_label
    records: list[ErrorRecord] = []
    for seed in config.seeds:
        if target is not None and config.missing_fraction > 0:
            injected = inject_missing(
                base, target, config.missing_fraction, seed=seed
            )
        else:
            injected = base
        reference = run_basic_eda(
            injected, config.eps_i, None,
            np.random.default_rng([seed, 0]), POST_PROCESS, bins=config.bins,
        )
        if config.mode in (INTERACTIVE, BOTH):
            ledger = open_session(budget)
            policy = TEST_MODE if config.noise else NOISE_OFF
            released = run_basic_eda(
                injected, config.eps_i, ledger,
                np.random.default_rng([seed, 1]), policy, bins=config.bins,
            )
            if ledger.spent_exact != price.total_exact:
                raise DpError("interactive ledger does not match the closed form")
            records.extend(
                _entry_errors(
                    released, reference, injected.num_rows,
                    label, INTERACTIVE, seed, float(config.eps_i),
                )
            )
        if config.mode in (SYNTHETIC, BOTH):
            rng = np.random.default_rng([seed, 2])
            synthetic, _ = synthesize(
                injected, synth_epsilon, config.degree, rng,
                bins=config.bins, noise=config.noise,
            )
            synth_report = run_basic_eda(
                synthetic, config.eps_i, None, rng, POST_PROCESS, bins=config.bins
            )
            records.extend(
                _entry_errors(
                    synth_report, reference, injected.num_rows,
                    label, SYNTHETIC, seed, float(synth_epsilon),
                )
            )

    error_rows = [
        [
            r.schema, r.function, r.column, r.mode, r.seed, r.epsilon,
            MISSING_FIELD if r.error is None else r.error,
            MISSING_FIELD if r.error_rangenorm is None else r.error_rangenorm,
        ]
        for r in records
    ]
    _write_csv(
        out / "errors.csv",
        ["schema", "function", "column", "mode", "seed", "epsilon",
         "error", "error_rangenorm"],
        error_rows,
    )
    _write_csv(
        out / "accuracy_summary.csv",
        ["schema", "function", "mode", "count", "min", "q1", "median", "q3", "max"],
        _summarize(records),
    )
    if config.test_mode:
        released_rows = [
            [
                r.schema, r.query, r.mode, r.seed,
                MISSING_FIELD if r.true_value is None else r.true_value,
                MISSING_FIELD if r.released_value is None else r.released_value,
            ]
            for r in records
        ]
        _write_csv(
            out / "released.csv",
            ["schema", "query", "mode", "seed", "true_value", "released_value"],
            released_rows,
        )
    return records
