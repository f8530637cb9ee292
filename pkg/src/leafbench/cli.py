"""Command-line entry point: corrupt / evaluate / report / validate.

Exit codes: 0 success, 1 validation failure, 2 I/O failure (missing or
unreadable paths), 3 incomplete metric grid.  Every run prints its fully
resolved configuration so results can be reproduced from the log alone.
The default global seed comes from $LEAFBENCH_SEED when --seed is absent.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .dataset import DatasetError, build_corrupted_dataset, scan_dataset
from .metrics import (
    DegenerateReferenceError,
    LogValidationError,
    MissingCellError,
    RobustnessSummary,
    build_surface,
    load_logs,
    summarize,
)
from .reports import emit_all
from .severity import CORRUPTION_KINDS, SEVERITIES, SeverityTableError, load_severity_table

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INCOMPLETE = 3

SEED_ENV_VAR = "LEAFBENCH_SEED"


@dataclass
class RunConfig:
    """Resolved invocation, printed (and persisted via manifests) for provenance."""

    subcommand: str
    input_path: str = ""
    output_path: str = ""
    kinds: tuple[str, ...] = ()
    severities: tuple[int, ...] = ()
    global_seed: int = 0
    workers: int = 1
    reference_model: str = ""
    split: str = "all"
    class_set: tuple[str, ...] = ()
    comma_decimals: bool = False
    severity_table: str = "<bundled>"

    def announce(self) -> None:
        print("run-config " + json.dumps(asdict(self), sort_keys=True))


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR, "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leafbench",
        description="Corruption-robustness benchmark: build corrupted datasets, "
                    "score prediction logs, render report tables and charts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corrupt", help="mirror a clean dataset into corrupted subsets")
    p.add_argument("--in", dest="input", required=True, help="clean class-per-folder root")
    p.add_argument("--out", dest="output", required=True, help="corrupted dataset root")
    p.add_argument("--kinds", default=",".join(CORRUPTION_KINDS),
                   help="comma list of corruption kinds (default: all 19)")
    p.add_argument("--severities", default="1,2,3,4,5", help="comma list of severities")
    p.add_argument("--seed", type=int, default=None, help=f"global seed (default ${SEED_ENV_VAR} or 0)")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--severity-table", default=None, help="override the bundled parameter table")

    p = sub.add_parser("evaluate", help="compute CE/mCE/F1 metrics from prediction logs")
    p.add_argument("--logs", nargs="+", required=True, help="prediction log CSV files")
    p.add_argument("--out", dest="output", required=True, help="summary JSON path")
    p.add_argument("--reference", required=True, help="normalization reference model name")
    p.add_argument("--split", default="all", choices=["train", "val", "test", "all"])
    p.add_argument("--classes", default=None,
                   help="comma list of class labels (default: inferred from true labels)")

    p = sub.add_parser("report", help="render tables, rankings, curves, pareto data")
    p.add_argument("--summary", required=True, help="summary JSON from `evaluate`")
    p.add_argument("--out", dest="output", required=True, help="report directory")
    p.add_argument("--comma-decimals", action="store_true",
                   help="use decimal commas in table cells")

    p = sub.add_parser("validate", help="check dataset trees and/or prediction logs")
    p.add_argument("paths", nargs="+", help="dataset directories or log CSV files")
    p.add_argument("--classes", default=None, help="comma list of class labels for logs")
    return parser


def cmd_corrupt(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    config = RunConfig(
        subcommand="corrupt", input_path=args.input, output_path=args.output,
        kinds=tuple(_csv_list(args.kinds)), severities=tuple(int(s) for s in _csv_list(args.severities)),
        global_seed=seed, workers=args.workers,
        severity_table=args.severity_table or "<bundled>",
    )
    config.announce()
    root = Path(args.input)
    if not root.is_dir():
        print(f"error: input dataset root {root} does not exist", file=sys.stderr)
        return EXIT_IO
    table = load_severity_table(args.severity_table)
    layout = scan_dataset(root)
    manifest = build_corrupted_dataset(
        layout, args.output, kinds=config.kinds, severities=config.severities,
        global_seed=seed, workers=args.workers, table=table,
    )
    subsets = len(manifest.subsets)
    per = manifest.subsets[0]["files"] if manifest.subsets else 0
    print(f"built {subsets} subsets x {per} files "
          f"({len(layout.classes)} classes) under {args.output}")
    if manifest.partial:
        print(f"error: build incomplete: {manifest.note}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    classes = tuple(_csv_list(args.classes)) if args.classes else ()
    config = RunConfig(
        subcommand="evaluate", input_path=";".join(args.logs), output_path=args.output,
        reference_model=args.reference, split=args.split, class_set=classes,
    )
    config.announce()
    for log in args.logs:
        if not Path(log).is_file():
            print(f"error: log file {log} does not exist", file=sys.stderr)
            return EXIT_IO
    records = load_logs(args.logs, class_set=classes or None)
    surface = build_surface(records, split=args.split,
                            class_set=classes or None)
    summary = summarize(surface, args.reference)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(summary.to_json() + "\n", encoding="utf-8")
    for model in sorted(summary.models):
        print(f"mCE {model} {summary.mce[model]:.1f} (relative {summary.relative_mce[model]:.1f})")
    for anomaly in summary.anomalies:
        print(f"warning: {anomaly['corruption']}: {anomaly['reason']}", file=sys.stderr)
    print(f"summary written to {out}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    config = RunConfig(subcommand="report", input_path=args.summary,
                       output_path=args.output, comma_decimals=args.comma_decimals)
    config.announce()
    path = Path(args.summary)
    if not path.is_file():
        print(f"error: summary file {path} does not exist", file=sys.stderr)
        return EXIT_IO
    try:
        summary = RobustnessSummary.from_json(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed summary {path}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    bundle = emit_all(summary, args.output, comma_decimals=args.comma_decimals)
    print(f"wrote {len(bundle.files)} report files under {bundle.directory}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config = RunConfig(subcommand="validate", input_path=";".join(args.paths),
                       class_set=tuple(_csv_list(args.classes)) if args.classes else ())
    config.announce()
    failures = 0
    for raw in args.paths:
        path = Path(raw)
        if not path.exists():
            print(f"{path}: does not exist")
            return EXIT_IO
        try:
            if path.is_dir():
                layout = scan_dataset(path)
                print(f"{path}: ok, {len(layout.classes)} classes, "
                      f"{layout.file_count} images, {len(layout.skipped)} skipped")
            else:
                records = load_logs([path], class_set=config.class_set or None)
                print(f"{path}: ok, {len(records)} records")
        except (DatasetError, LogValidationError, SeverityTableError) as exc:
            print(f"{path}: invalid: {exc}")
            failures += 1
    return EXIT_VALIDATION if failures else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "corrupt": cmd_corrupt,
        "evaluate": cmd_evaluate,
        "report": cmd_report,
        "validate": cmd_validate,
    }[args.command]
    try:
        return handler(args)
    except (DatasetError, LogValidationError, SeverityTableError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (MissingCellError, DegenerateReferenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
