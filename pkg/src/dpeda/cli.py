"""Command-line front door.

Subcommands:
  budget     trace the cumulative privacy loss of one basic-EDA pass per schema
  accuracy   compare interactive vs synthetic relative errors across seeds
  demo       write the built-in example datasets to CSV + schema files
  serve      run the HTTP query service
"""

from __future__ import annotations

import argparse
import statistics
import sys
from pathlib import Path

from dpeda.datagen import make_demo_dataset, make_desk_dataset
from dpeda.errors import DpError
from dpeda.harness import (
    BOTH,
    INTERACTIVE,
    SYNTHETIC,
    ExperimentConfig,
    run_accuracy_experiment,
    run_budget_experiment,
)


def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"seeds must be comma-separated integers, got {text!r}"
        ) from None


def _add_common_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eps-i", type=float, default=0.01,
                        help="per-query epsilon (default 0.01)")
    parser.add_argument("--budget", type=float, default=None,
                        help="total budget; default is the closed-form price of one pass")
    parser.add_argument("--seeds", type=_parse_seeds, default=(0,),
                        help="comma-separated seeds, e.g. 0,1,2 (default 0)")
    parser.add_argument("--out", required=True, help="output directory for result tables")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpeda",
        description="Budget-metered differentially private EDA: experiments and service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    budget = sub.add_parser(
        "budget", help="cumulative privacy-loss trace per schema"
    )
    budget.add_argument("--data", action="append", required=True,
                        help="dataset CSV; repeat to compare several schemas")
    budget.add_argument("--schema", action="append", required=True,
                        help="schema JSON; one per --data, in order")
    budget.add_argument("--label", action="append", default=None,
                        help="series label; one per --data (default: file stem)")
    _add_common_experiment_flags(budget)

    accuracy = sub.add_parser(
        "accuracy", help="interactive vs synthetic relative-error comparison"
    )
    accuracy.add_argument("--data", required=True, help="dataset CSV")
    accuracy.add_argument("--schema", required=True, help="schema JSON")
    accuracy.add_argument("--mode", choices=(INTERACTIVE, SYNTHETIC, BOTH),
                          default=BOTH)
    accuracy.add_argument("--synth-eps", type=float, default=None,
                          help="synthesizer budget; default is the CORR closed-form share")
    accuracy.add_argument("--degree", type=int, default=4,
                          help="max parents per node in the synthesizer (default 4)")
    accuracy.add_argument("--bins", type=int, default=20,
                          help="numeric discretization bins (default 20)")
    accuracy.add_argument("--missing-column", default=None,
                          help="column to inject missingness into (default: first numeric)")
    accuracy.add_argument("--missing-fraction", type=float, default=0.10)
    accuracy.add_argument("--test-mode", action="store_true",
                          help="also write released.csv with true values (never in production)")
    accuracy.add_argument("--no-noise", action="store_true",
                          help="calibration run: mechanisms release exact values")
    _add_common_experiment_flags(accuracy)

    demo = sub.add_parser("demo", help="write the built-in example datasets")
    demo.add_argument("--out", required=True, help="directory for CSV + schema files")

    serve = sub.add_parser("serve", help="run the HTTP query service")
    serve.add_argument("--demo", action="store_true",
                       help="register the built-in desk and cafe datasets")
    serve.add_argument("--data", action="append", default=[],
                       help="dataset CSV to register; repeatable")
    serve.add_argument("--schema", action="append", default=[],
                       help="schema JSON; one per --data, in order")
    serve.add_argument("--name", action="append", default=[],
                       help="registry id; one per --data (default: file stem)")
    serve.add_argument("--journal", default=None,
                       help="append-only charge journal; replayed on restart")
    serve.add_argument("--max-eps-i", type=float, default=1.0,
                       help="operator cap on per-query epsilon (default 1.0)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--seed", type=int, default=None,
                       help="service noise seed (tests only; omit in production)")
    serve.add_argument("--console", default=None,
                       help="directory of built console assets to serve at /")
    return parser


def cmd_budget(args) -> int:
    if len(args.schema) != len(args.data):
        print("error: need one --schema per --data", file=sys.stderr)
        return 2
    labels = args.label or [None] * len(args.data)
    if len(labels) != len(args.data):
        print("error: need one --label per --data", file=sys.stderr)
        return 2
    configs = [
        ExperimentConfig(
            data_path=data, schema_path=schema, out_dir=args.out,
            seeds=args.seeds, eps_i=args.eps_i, total_budget=args.budget,
            label=label,
        )
        for data, schema, label in zip(args.data, args.schema, labels)
    ]
    result = run_budget_experiment(configs)
    for row in result["summary"]:
        label, _, _, _, _, _, _, _, closed_form, ledger_total, exhausted = row
        status = "EXHAUSTED" if exhausted else f"ledger total {ledger_total}"
        print(f"{label}: closed-form total {closed_form}, {status}")
    print(f"wrote {Path(args.out) / 'budget_ledger.csv'}")
    print(f"wrote {Path(args.out) / 'budget_summary.csv'}")
    return 0


def cmd_accuracy(args) -> int:
    config = ExperimentConfig(
        data_path=args.data, schema_path=args.schema, out_dir=args.out,
        seeds=args.seeds, eps_i=args.eps_i, total_budget=args.budget,
        mode=args.mode, synth_epsilon=args.synth_eps, degree=args.degree,
        bins=args.bins, missing_column=args.missing_column,
        missing_fraction=args.missing_fraction, test_mode=args.test_mode,
        noise=not args.no_noise,
    )
    records = run_accuracy_experiment(config)
    by_group: dict[tuple[str, str], list[float]] = {}
    for record in records:
        if record.error is not None:
            by_group.setdefault((record.function, record.mode), []).append(record.error)
    for (function, mode), errors in sorted(by_group.items()):
        median = statistics.median(errors)
        print(f"{function:4s} {mode:11s} n={len(errors):4d} median relative error {median:.4f}")
    print(f"wrote {Path(args.out) / 'errors.csv'}")
    print(f"wrote {Path(args.out) / 'accuracy_summary.csv'}")
    if args.test_mode:
        print(f"wrote {Path(args.out) / 'released.csv'}")
    return 0


def cmd_demo(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, dataset in (("desk", make_desk_dataset()), ("cafe", make_demo_dataset())):
        data_path = out / f"{name}.csv"
        schema_path = out / f"{name}.schema.json"
        dataset.to_csv(data_path)
        schema_path.write_text(dataset.schema.to_json(), encoding="utf-8")
        print(f"wrote {data_path} ({dataset.num_rows} rows) and {schema_path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from dpeda.core import load_dataset, load_schema
    from dpeda.service import create_app

    if len(args.schema) != len(args.data):
        print("error: need one --schema per --data", file=sys.stderr)
        return 2
    names = args.name or [None] * len(args.data)
    if len(names) != len(args.data):
        print("error: need one --name per --data", file=sys.stderr)
        return 2

    datasets = {}
    if args.demo:
        datasets["desk"] = make_desk_dataset()
        datasets["cafe"] = make_demo_dataset()
    for data, schema, name in zip(args.data, args.schema, names):
        dataset_id = name if name is not None else Path(data).stem
        datasets[dataset_id] = load_dataset(data, load_schema(schema))
    if not datasets:
        print("error: register at least one dataset (--demo or --data/--schema)",
              file=sys.stderr)
        return 2

    app = create_app(
        datasets,
        journal_path=args.journal,
        max_eps_i=args.max_eps_i,
        rng_seed=args.seed,
    )
    if args.console is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=args.console, html=True), name="console")
    print(f"registered datasets: {', '.join(sorted(datasets))}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


COMMANDS = {
    "budget": cmd_budget,
    "accuracy": cmd_accuracy,
    "demo": cmd_demo,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
