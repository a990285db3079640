"""Command-line entry point: ``psdblk <subcommand>``.

JSON goes to stdout (or ``--output``), diagnostics to stderr. Exit codes:
0 success, 1 usage error, 2 input validation failure, 3 violation found.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import __version__
from .decomposition import congruence_decompose, lemma_decompose, lowner_envelope
from .errors import PsdBlkError
from .generators import GeneratorMode, example_equality, random_block_psd
from .linalg import block_from_json, dumps, matrix_to_json
from .search import Constraint, HuntConfig, Method, hunt, probe_real_decomposition
from .suite import SuiteConfig, SuiteResult, parse_dims, run_suite

EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_VIOLATION = 3
SEED_ENV = "PSDBLK_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="psdblk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="decompose a BlockPsd JSON instance")
    p.add_argument("input", nargs="?", default="-", help="instance JSON file (default: stdin)")
    p.add_argument("--mode", choices=["lemma", "re", "im", "envelope"], default="lemma")
    p.add_argument("--output", "-o")

    p = sub.add_parser("check", help="run the inequality verification campaign")
    p.add_argument("--dims", default="2x2,3x3,4x4,5x5,6x6")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--battery", default=None, help='e.g. "op,tr,s:1.5,kf:*" (default: full battery)')
    p.add_argument("--checks", default=None, help="comma-separated check ids (default: all)")
    p.add_argument("--full", action="store_true", help="per-trial CSV on stdout")
    p.add_argument("--boundary", action="store_true", help="draw instances on the PSD boundary")
    p.add_argument("--fail-on-violation", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", "-o")

    p = sub.add_parser("hunt", help="search for violations of ||M|| <= ||A+B||")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--constraint", choices=[c.value for c in Constraint], default="normal")
    p.add_argument("--iters", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=[m.value for m in Method], default="hc")
    p.add_argument("--emit-history", metavar="CSV", help="write (iteration, score) rows here")
    p.add_argument("--persist-dir", default="violations",
                   help="where positive-score instances are saved (default: ./violations)")
    p.add_argument("--fail-on-violation", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", "-o")

    p = sub.add_parser("probe-real", help="look for real orthogonal factors on a random real instance")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")

    p = sub.add_parser("example", help="print the 2+2 equality fixture")
    p.add_argument("--output", "-o")
    return parser


def _seed(args) -> int:
    value = os.environ.get(SEED_ENV)
    if value is None:
        return args.seed
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {value!r}") from None


def _write(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _read_instance(path: str):
    try:
        raw = sys.stdin.read() if path == "-" else open(path).read()
        obj = json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise PsdBlkError(f"cannot read instance: {exc}") from exc
    try:
        return block_from_json(obj)
    except KeyError as exc:
        raise PsdBlkError(f"instance JSON is missing field {exc}") from exc


def cmd_decompose(args) -> int:
    M = _read_instance(args.input)
    if args.mode == "lemma":
        out = lemma_decompose(M).to_json()
    elif args.mode in ("re", "im"):
        out = congruence_decompose(M, args.mode).to_json()
    else:
        env = lowner_envelope(M)
        out = env.decomposition.to_json()
        out["envelope"] = matrix_to_json(env.envelope)
        out["min_gap_eigenvalue"] = env.min_gap
    _write(args, dumps(out))
    return 0


def _write_csv(result: SuiteResult) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(SuiteResult.CSV_HEADER)
    for row in result.flat:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])


def cmd_check(args) -> int:
    try:
        config = SuiteConfig(
            dims=parse_dims(args.dims),
            trials=args.trials,
            seed=_seed(args),
            battery=args.battery,
            boundary="boundary" if args.boundary else "interior",
            checks=tuple(args.checks.split(",")) if args.checks else None,
            full=args.full,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = run_suite(config, jobs=max(1, args.jobs))
    report = dumps(result.to_json())
    if args.full:
        _write_csv(result)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(report + "\n")
    else:
        _write(args, report)
    print(f"check: {len(result.rows)} rows, {result.violations} precondition-met violations",
          file=sys.stderr)
    return EXIT_VIOLATION if result.violations else 0


def cmd_hunt(args) -> int:
    try:
        config = HuntConfig(n=args.n, method=args.method, iterations=args.iters,
                            seed=_seed(args), constraint=args.constraint)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    record = hunt(config, jobs=max(1, args.jobs), persist_dir=args.persist_dir)
    if args.emit_history:
        with open(args.emit_history, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iteration", "score"])
            writer.writerows([i, repr(s)] for i, s in record.history)
    _write(args, dumps(record.to_json()))
    if record.violation_found:
        print(f"hunt: positive score {record.best_score:.6g} at k={record.worst_k} "
              f"(reverified={record.reverified}, saved to {record.persisted_path})", file=sys.stderr)
        if args.fail_on_violation:
            return EXIT_VIOLATION
    return 0


def cmd_probe_real(args) -> int:
    if args.n < 1 or args.restarts < 1:
        raise UsageError("--n and --restarts must be positive")
    seed = _seed(args)
    M = random_block_psd(args.n, args.n, GeneratorMode.REAL_ENTRIES, seed)
    result = probe_real_decomposition(M, restarts=args.restarts, seed=seed)
    out = result.to_json()
    out["instance"] = M.to_json()
    _write(args, dumps(out))
    return 0


def cmd_example(args) -> int:
    _write(args, dumps(example_equality().to_json()))
    return 0


COMMANDS = {
    "decompose": cmd_decompose,
    "check": cmd_check,
    "hunt": cmd_hunt,
    "probe-real": cmd_probe_real,
    "example": cmd_example,
}


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except PsdBlkError as exc:
        print(f"psdblk: invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run_cli())
