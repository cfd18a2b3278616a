"""Experiment runner: budget traces, accuracy tables, determinism, and the
built-in source datasets."""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

import oracles
from dpeda.core import CATEGORICAL, NUMERIC, ColumnSpec, Dataset, Schema
from dpeda.datagen import make_demo_dataset, make_desk_dataset
from dpeda.errors import ParamError
from dpeda.harness import (
    BOTH,
    INTERACTIVE,
    SYNTHETIC,
    ExperimentConfig,
    relative_error,
    run_accuracy_experiment,
    run_budget_experiment,
)


def materialize(ds: Dataset, directory: Path, name: str) -> tuple[Path, Path]:
    data_path = directory / f"{name}.csv"
    schema_path = directory / f"{name}.schema.json"
    ds.to_csv(data_path)
    schema_path.write_text(ds.schema.to_json(), encoding="utf-8")
    return data_path, schema_path


def adult_shaped(num_rows=40, seed=0) -> Dataset:
    rng = np.random.default_rng(seed)
    columns: list[ColumnSpec] = []
    data: dict[str, list] = {}
    for i in range(6):
        columns.append(ColumnSpec(f"n{i}", NUMERIC, bounds=(0, 100)))
        data[f"n{i}"] = rng.uniform(0, 100, num_rows).tolist()
    for i in range(9):
        columns.append(ColumnSpec(f"c{i}", CATEGORICAL, domain=("u", "v", "w")))
        data[f"c{i}"] = rng.choice(["u", "v", "w"], num_rows).tolist()
    return Dataset(Schema(tuple(columns)), data)


def small_mixed(num_rows=120, seed=1) -> Dataset:
    rng = np.random.default_rng(seed)
    schema = Schema(
        (
            ColumnSpec("amount", NUMERIC, bounds=(0, 50)),
            ColumnSpec("rating", NUMERIC, bounds=(1, 5)),
            ColumnSpec("region", CATEGORICAL, domain=("north", "south", "east")),
            ColumnSpec("tier", CATEGORICAL, domain=("basic", "plus")),
        )
    )
    return Dataset(
        schema,
        {
            "amount": rng.gamma(2.0, 8.0, num_rows).clip(0, 50).tolist(),
            "rating": rng.uniform(1, 5, num_rows).tolist(),
            "region": rng.choice(["north", "south", "east"], num_rows).tolist(),
            "tier": rng.choice(["basic", "plus"], num_rows).tolist(),
        },
    )


def read_csv(path: Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


class TestRelativeError:
    def test_plain_ratio(self):
        assert relative_error(100.0, 110.0) == pytest.approx(0.1)

    def test_floor_handles_zero_truth(self):
        assert relative_error(0.0, 5.0) == 5.0

    def test_floor_validation(self):
        with pytest.raises(ParamError):
            relative_error(1.0, 2.0, floor=0.0)

    def test_error_vector_reduces_to_five_number_summary(self):
        from dpeda.eda import five_number_summary

        errors = [relative_error(t, t + d) for t, d in zip(range(1, 30), range(30, 1, -1))]
        ours = five_number_summary(np.array(errors))
        theirs = oracles.five_numbers(errors)
        for key in ("min", "max", "q1", "q2", "q3"):
            assert ours[key] == pytest.approx(theirs[key], rel=1e-12)


class TestExperimentConfig:
    def base_kwargs(self, tmp_path):
        return dict(
            data_path=tmp_path / "d.csv",
            schema_path=tmp_path / "d.schema.json",
            out_dir=tmp_path / "out",
        )

    def test_field_named_in_validation_error(self, tmp_path):
        cases = [
            (dict(seeds=()), "seeds"),
            (dict(eps_i=0.0), "eps_i"),
            (dict(mode="offline"), "mode"),
            (dict(degree=0), "degree"),
            (dict(bins=1), "bins"),
            (dict(synth_epsilon=-1.0), "synth_epsilon"),
            (dict(total_budget=0.0), "total_budget"),
            (dict(missing_fraction=1.0), "missing_fraction"),
        ]
        for overrides, fieldname in cases:
            with pytest.raises(ParamError) as err:
                ExperimentConfig(**self.base_kwargs(tmp_path), **overrides)
            assert fieldname in str(err.value)

    def test_schema_label_defaults_to_stem(self, tmp_path):
        config = ExperimentConfig(**self.base_kwargs(tmp_path))
        assert config.schema_label == "d"
        labeled = ExperimentConfig(**self.base_kwargs(tmp_path), label="desk")
        assert labeled.schema_label == "desk"


class TestBudgetExperiment:
    def test_adult_shaped_trace(self, tmp_path):
        data, schema = materialize(adult_shaped(), tmp_path, "office")
        config = ExperimentConfig(data, schema, tmp_path / "out", seeds=(3,))
        result = run_budget_experiment([config])
        rows = read_csv(tmp_path / "out" / "budget_ledger.csv")
        assert len(rows) == 102
        assert rows[-1]["cumulative"] == "1.02"
        # exact linear growth, checked on the exact series behind the floats
        series = result["series"]["office"]
        cumulative = [Fraction(r.cumulative).limit_denominator(10**9) for r in series]
        assert all(
            b - a == Fraction(1, 100) for a, b in zip(cumulative, cumulative[1:])
        )
        summary = read_csv(tmp_path / "out" / "budget_summary.csv")[0]
        assert summary["closed_form_total"] == "1.02"
        assert summary["ledger_total"] == "1.02"
        assert summary["corr"] == "0.51"
        assert summary["exhausted"] == "False"

    def test_underfunded_run_reported_not_crashed(self, tmp_path):
        data, schema = materialize(adult_shaped(), tmp_path, "office")
        config = ExperimentConfig(
            data, schema, tmp_path / "out", seeds=(3,), total_budget=0.5
        )
        result = run_budget_experiment([config])
        assert result["series"]["office"] == []
        summary = read_csv(tmp_path / "out" / "budget_summary.csv")[0]
        assert summary["exhausted"] == "True"
        assert summary["ledger_total"] == "0.0"

    def test_two_schemas_one_table(self, tmp_path):
        d1, s1 = materialize(adult_shaped(), tmp_path, "office")
        d2, s2 = materialize(small_mixed(), tmp_path, "shop")
        out = tmp_path / "out"
        run_budget_experiment(
            [
                ExperimentConfig(d1, s1, out, seeds=(0,)),
                ExperimentConfig(d2, s2, out, seeds=(0,)),
            ]
        )
        rows = read_csv(out / "budget_ledger.csv")
        assert {r["schema"] for r in rows} == {"office", "shop"}
        shop_rows = [r for r in rows if r["schema"] == "shop"]
        assert len(shop_rows) == 18  # 5*2 + 2 + 2 + 2 + 1 + 1

    def test_out_dir_must_agree(self, tmp_path):
        d1, s1 = materialize(small_mixed(), tmp_path, "shop")
        with pytest.raises(ParamError):
            run_budget_experiment(
                [
                    ExperimentConfig(d1, s1, tmp_path / "a"),
                    ExperimentConfig(d1, s1, tmp_path / "b"),
                ]
            )

    def test_byte_identical_reruns(self, tmp_path):
        data, schema = materialize(small_mixed(), tmp_path, "shop")
        for sub in ("one", "two"):
            run_budget_experiment(
                [ExperimentConfig(data, schema, tmp_path / sub, seeds=(9,))]
            )
        assert (tmp_path / "one" / "budget_ledger.csv").read_bytes() == (
            tmp_path / "two" / "budget_ledger.csv"
        ).read_bytes()


class TestAccuracyExperiment:
    def run(self, tmp_path, sub="out", **overrides) -> tuple[Path, list]:
        data, schema = materialize(small_mixed(), tmp_path, "shop")
        kwargs = dict(seeds=(0, 1), mode=BOTH)
        kwargs.update(overrides)
        config = ExperimentConfig(data, schema, tmp_path / sub, **kwargs)
        records = run_accuracy_experiment(config)
        return tmp_path / sub, records

    def test_one_row_per_query_seed_mode(self, tmp_path):
        out, records = self.run(tmp_path)
        rows = read_csv(out / "errors.csv")
        # inventory for 2 numeric + 2 categorical: 10 + 2 + 2 + 2 + 2 = 18
        assert len(rows) == 18 * 2 * 2
        per_mode = {m: 0 for m in (INTERACTIVE, SYNTHETIC)}
        for row in rows:
            per_mode[row["mode"]] += 1
        assert per_mode == {INTERACTIVE: 36, SYNTHETIC: 36}

    def test_noise_off_interactive_errors_all_zero(self, tmp_path):
        out, records = self.run(tmp_path, noise=False)
        interactive = [r for r in records if r.mode == INTERACTIVE]
        assert interactive and all(r.error == 0.0 for r in interactive)

    def test_synth_epsilon_defaults_to_corr_budget(self, tmp_path):
        out, records = self.run(tmp_path)
        synth = [r for r in records if r.mode == SYNTHETIC]
        assert {r.epsilon for r in synth} == {0.02}  # C(2,2)+C(2,2) = 2 queries
        rows = read_csv(out / "errors.csv")
        assert {r["epsilon"] for r in rows if r["mode"] == SYNTHETIC} == {"0.02"}

    def test_interactive_epsilon_is_eps_i(self, tmp_path):
        out, _ = self.run(tmp_path)
        rows = read_csv(out / "errors.csv")
        assert {r["epsilon"] for r in rows if r["mode"] == INTERACTIVE} == {"0.01"}

    def test_missing_injection_hits_designated_column(self, tmp_path):
        out, records = self.run(tmp_path, test_mode=True, mode=INTERACTIVE)
        injected = [
            r for r in records if r.function == "MISS" and r.column == "amount"
        ]
        assert injected and all(r.true_value == 12.0 for r in injected)  # 10% of 120
        untouched = [
            r for r in records if r.function == "MISS" and r.column == "rating"
        ]
        assert untouched and all(r.true_value == 0.0 for r in untouched)

    def test_missing_column_override_and_validation(self, tmp_path):
        out, records = self.run(
            tmp_path, test_mode=True, mode=INTERACTIVE, missing_column="rating"
        )
        hits = [r for r in records if r.function == "MISS" and r.column == "rating"]
        assert all(r.true_value == 12.0 for r in hits)
        with pytest.raises(ParamError) as err:
            self.run(tmp_path, sub="bad", missing_column="region")
        assert "missing_column" in str(err.value)

    def test_released_file_only_in_test_mode(self, tmp_path):
        out, _ = self.run(tmp_path, sub="plain")
        assert not (out / "released.csv").exists()
        out, _ = self.run(tmp_path, sub="verbose", test_mode=True)
        rows = read_csv(out / "released.csv")
        assert rows and {"true_value", "released_value"} <= set(rows[0])

    def test_errors_csv_never_carries_true_values(self, tmp_path):
        out, _ = self.run(tmp_path)
        header = (out / "errors.csv").read_text(encoding="utf-8").splitlines()[0]
        assert header == "schema,function,column,mode,seed,epsilon,error,error_rangenorm"

    def test_byte_identical_reruns(self, tmp_path):
        out1, _ = self.run(tmp_path, sub="one")
        out2, _ = self.run(tmp_path, sub="two")
        for name in ("errors.csv", "accuracy_summary.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_summary_matches_independent_five_numbers(self, tmp_path):
        out, records = self.run(tmp_path)
        errors = [
            r.error
            for r in records
            if r.function == "DIST" and r.mode == INTERACTIVE and r.error is not None
        ]
        expected = oracles.five_numbers(errors)
        summary = {
            (r["schema"], r["function"], r["mode"]): r
            for r in read_csv(out / "accuracy_summary.csv")
        }
        row = summary[("shop", "DIST", INTERACTIVE)]
        assert float(row["median"]) == pytest.approx(expected["q2"], rel=1e-12)
        assert int(row["count"]) == len(errors)

    def test_interactive_only_mode(self, tmp_path):
        out, records = self.run(tmp_path, sub="ionly", mode=INTERACTIVE, seeds=(4,))
        assert {r.mode for r in records} == {INTERACTIVE}
        assert len(records) == 18


class TestDatagen:
    def test_desk_shape(self):
        ds = make_desk_dataset()
        assert ds.num_rows == 5000
        assert ds.schema.numeric_names == ("handle_minutes", "requester_age", "satisfaction")
        assert ds.schema.categorical_names == ("branch", "product", "agent")
        sizes = {n: len(ds.schema.column(n).domain) for n in ds.schema.categorical_names}
        assert sizes == {"branch": 100, "product": 90, "agent": 110}

    def test_desk_has_zero_count_levels_and_long_tail(self):
        ds = make_desk_dataset()
        for name in ds.schema.categorical_names:
            counts = ds.category_counts(name)
            level_counts = [counts[lvl] for lvl in ds.schema.column(name).domain]
            assert min(level_counts) == 0
            assert max(level_counts) > 150
            assert float(np.median(level_counts)) < 60

    def test_desk_deterministic(self):
        import io

        a, b = io.StringIO(), io.StringIO()
        make_desk_dataset(seed=5).to_csv(a)
        make_desk_dataset(seed=5).to_csv(b)
        assert a.getvalue() == b.getvalue()

    def test_demo_shape(self):
        ds = make_demo_dataset()
        assert ds.num_rows == 2000
        assert ds.schema.numeric_names == ("total", "wait_minutes")
        assert ds.schema.categorical_names == ("drink", "size")
        assert all(v is not None for v in ds.column_values("drink"))
