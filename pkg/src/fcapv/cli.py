"""Command-line front end: ``fcapv {mine,lattice,stats,generate}``.

Exit status: 0 success, 2 usage or input error, 1 internal failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass

from . import __version__
from .context import ContextError, ingest
from .generate import Plant, generate_cases
from .io import read_cases, write_csv
from .lattice import enumerate_concepts
from .mining import Thresholds, mine
from .stats import (CONTINGENCY_MODES, CORRECTIONS, ContingencyTable, StatsError,
                    evaluate, format_float)

log = logging.getLogger("fcapv")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    input_path: str
    input_format: str | None = None
    min_support: int = 3
    min_prr: float = 2.0
    min_chi2: float = 4.0
    chi2_correction: str = "yates"
    contingency_mode: str = "conjunction"
    output_path: str | None = None
    output_format: str = "json"
    threads: int | str = 1

    def thresholds(self) -> Thresholds:
        return Thresholds(self.min_support, self.min_prr, self.min_chi2)


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _count(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _threads(text):
    if text == "auto":
        return text
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1 or 'auto'")
    return value


@contextmanager
def _open_output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _load_context(cfg: RunConfig):
    try:
        records = read_cases(cfg.input_path, cfg.input_format)
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.input_path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError as exc:
        raise UsageError(f"cannot decode {cfg.input_path}: {exc}") from None
    return ingest(records)


def cmd_mine(cfg: RunConfig) -> int:
    ctx = _load_context(cfg)
    report = mine(ctx, cfg.thresholds(), correction=cfg.chi2_correction,
                  contingency_mode=cfg.contingency_mode, workers=cfg.threads)
    # the report owns stdout when no output file is given
    summary_stream = sys.stderr if cfg.output_path in (None, "-") else sys.stdout
    with _open_output(cfg.output_path) as fh:
        if cfg.output_format == "csv":
            fh.write(report.to_csv())
        else:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    print("\n".join(report.summary_lines()), file=summary_stream)
    return 0


def cmd_lattice(cfg: RunConfig) -> int:
    ctx = _load_context(cfg)
    concepts = enumerate_concepts(ctx, cfg.min_support, workers=cfg.threads)
    with _open_output(cfg.output_path) as fh:
        json.dump(concepts.to_json_list(), fh, indent=2)
        fh.write("\n")
    return 0


def cmd_stats(a: int, b: int, c: int, d: int, correction: str = "yates") -> int:
    table = ContingencyTable(a, b, c, d)
    result = evaluate(table, support=a, correction=correction)
    print(json.dumps({
        "a": a, "b": b, "c": c, "d": d,
        "prr": format_float(result.prr),
        "chi2": result.chi2,
        "support": result.support,
        "passes_mhra": result.passes_mhra,
    }))
    return 0


def cmd_generate(args) -> int:
    try:
        planted = [Plant.parse(p) for p in args.plant]
        rows = generate_cases(args.cases, args.drugs, args.events, args.density,
                              planted, seed=args.seed, demographics=not args.no_demographics)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _open_output(args.output) as fh:
        write_csv(rows, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fcapv",
        description="Mine drug/adverse-event relationships from case reports with formal concept analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("--input", required=True, help="case-report file (CSV or JSON lines)")
        p.add_argument("--format", choices=("csv", "jsonl"), default=None,
                       help="input format (default: from file suffix)")
        p.add_argument("--output", default=None, help="output file (default: stdout)")
        p.add_argument("--threads", type=_threads, default=1,
                       help="enumeration worker processes or 'auto' (default 1)")

    p = sub.add_parser("mine", help="run the full mining pipeline")
    add_input(p)
    p.add_argument("--min-support", type=_count, default=3)
    p.add_argument("--min-prr", type=_positive_float, default=2.0)
    p.add_argument("--min-chi2", type=_positive_float, default=4.0)
    p.add_argument("--chi2-correction", choices=CORRECTIONS, default="yates")
    p.add_argument("--contingency-mode", choices=CONTINGENCY_MODES, default="conjunction")
    p.add_argument("--output-format", choices=("json", "csv"), default="json")

    p = sub.add_parser("lattice", help="dump the (iceberg) concept lattice as JSON")
    add_input(p)
    p.add_argument("--min-support", type=_count, default=0)

    p = sub.add_parser("stats", help="PRR, chi-square and MHRA verdict for a 2x2 table")
    for name in "abcd":
        p.add_argument(name, type=_count)
    p.add_argument("--chi2-correction", choices=CORRECTIONS, default="yates")

    p = sub.add_parser("generate", help="write a synthetic case-report CSV")
    p.add_argument("--cases", type=int, default=3000)
    p.add_argument("--drugs", type=int, default=500)
    p.add_argument("--events", type=int, default=600)
    p.add_argument("--density", type=float, default=0.01)
    p.add_argument("--plant", action="append", default=[], metavar="DRUG:EVENT:COUNT",
                   help="planted association (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-demographics", action="store_true", help="leave sex and age band empty")
    p.add_argument("--output", default=None, help="output CSV (default: stdout)")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        input_path=args.input,
        input_format=args.format,
        min_support=args.min_support,
        min_prr=getattr(args, "min_prr", 2.0),
        min_chi2=getattr(args, "min_chi2", 4.0),
        chi2_correction=getattr(args, "chi2_correction", "yates"),
        contingency_mode=getattr(args, "contingency_mode", "conjunction"),
        output_path=args.output,
        output_format=getattr(args, "output_format", "json"),
        threads=args.threads,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "mine":
            return cmd_mine(_config(args))
        if args.command == "lattice":
            return cmd_lattice(_config(args))
        if args.command == "stats":
            return cmd_stats(args.a, args.b, args.c, args.d, args.chi2_correction)
        return cmd_generate(args)
    except (UsageError, ContextError, StatsError) as exc:
        print(f"fcapv: error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        log.exception("internal failure")
        return 1


if __name__ == "__main__":
    sys.exit(main())
