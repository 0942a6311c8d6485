"""Command-line interface.

Subcommands: gen (write a test matrix), multiply (write an approximate
product), evaluate (write a single-report JSON), sweep (write JSON + CSV
over a size/trial grid). Exit codes: 0 success, 2 bad input or I/O
failure, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import SweepSpec, evaluate, sweep
from .matrix import (
    DISTRIBUTIONS,
    GenSpec,
    MatrixParseError,
    gen_matrix,
    read_matrix_csv,
    write_matrix_csv,
)
from .pipeline import ApproxConfig, approx_multiply
from .probe import build_probe, random_probe
from .solver import DivergenceError, NotPositiveDefiniteError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3

_SOLVER_FLAGS = {"sd": "adaptive", "sd-fixed": "fixed", "closed": "closed-form"}


class CliInputError(Exception):
    """Bad command-line input that is not argparse's to catch."""


def _probe_schedule(spec: str, epsilon: float | None, probe_seed: int):
    """Translate --probe/--epsilon flags into a schedule callable or None."""
    if spec == "paper":
        if epsilon is None:
            return None
        return lambda n: build_probe(n, ridge=epsilon)
    if spec.startswith("const:"):
        try:
            value = float(spec[len("const:"):])
        except ValueError:
            raise CliInputError(f"bad --probe constant: {spec!r}") from None
        return lambda n: build_probe(n, entries=value, ridge=epsilon)
    if spec == "random":
        return lambda n: random_probe(n, seed=probe_seed, ridge=epsilon)
    raise CliInputError(
        f"unknown --probe {spec!r}; expected paper, const:VALUE, or random"
    )


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delta", type=float, required=True,
                        help="target Frobenius error (recorded; success is measured)")
    parser.add_argument("--epsilon", type=float, default=None,
                        help="ridge weight (default: the 1/n^3 schedule)")
    parser.add_argument("--probe", default="paper",
                        help="probe vector: paper, const:VALUE, or random")
    parser.add_argument("--probe-seed", type=int, default=0,
                        help="seed for --probe random")
    parser.add_argument("--solver", choices=sorted(_SOLVER_FLAGS), default="sd",
                        help="sd (adaptive step), sd-fixed, or closed")
    parser.add_argument("--max-iters", type=int, default=None,
                        help="iteration cap (default: follows the condition bound)")


def _config_from_args(args) -> ApproxConfig:
    return ApproxConfig(
        delta=args.delta,
        solver=_SOLVER_FLAGS[args.solver],
        schedule=_probe_schedule(args.probe, args.epsilon, args.probe_seed),
        max_iters=args.max_iters,
    )


def _load_pair(args):
    return read_matrix_csv(args.a), read_matrix_csv(args.b)


def _cmd_gen(args) -> int:
    spec = GenSpec(n=args.n, distribution=args.dist,
                   max_magnitude=args.max_mag, seed=args.seed)
    write_matrix_csv(gen_matrix(spec), args.out)
    return EXIT_OK


def _cmd_multiply(args) -> int:
    a, b = _load_pair(args)
    result = approx_multiply(a, b, _config_from_args(args))
    if not result.converged:
        print(
            f"solver failed to converge within {result.iterations} iterations "
            f"(final residual {result.solver_report.final_residual:.3e})",
            file=sys.stderr,
        )
        return EXIT_SOLVER
    write_matrix_csv(result.product, args.out)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    a, b = _load_pair(args)
    report = evaluate(a, b, _config_from_args(args))
    payload = {"version": 1, "runs": [report.to_json_dict()]}
    Path(args.report).write_text(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = SweepSpec(
        sizes=tuple(args.sizes),
        trials=args.trials,
        distribution=args.dist,
        max_magnitude=args.max_mag,
        seed=args.seed,
        config=_config_from_args(args),
        baseline_s=tuple(args.baseline_s or ()),
    )
    sweep(spec, report_path=args.report, csv_path=args.csv)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probemm",
        description="Approximate matrix products via a probe vector and a "
                    "regularized block-diagonal solve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a deterministic test matrix as CSV")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform-signed")
    gen.add_argument("--max-mag", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    multiply = sub.add_parser("multiply", help="write the approximate product as CSV")
    multiply.add_argument("--a", required=True)
    multiply.add_argument("--b", required=True)
    _add_pipeline_flags(multiply)
    multiply.add_argument("--out", required=True)
    multiply.set_defaults(func=_cmd_multiply)

    ev = sub.add_parser("evaluate", help="measure one product against the exact oracle")
    ev.add_argument("--a", required=True)
    ev.add_argument("--b", required=True)
    _add_pipeline_flags(ev)
    ev.add_argument("--report", required=True, help="output JSON path")
    ev.set_defaults(func=_cmd_evaluate)

    sw = sub.add_parser("sweep", help="run a size/trial grid, write JSON and CSV reports")
    sw.add_argument("--sizes", type=_int_list, required=True,
                    help="comma-separated ascending sizes, e.g. 8,16,32")
    sw.add_argument("--trials", type=int, default=1)
    sw.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform-signed")
    sw.add_argument("--max-mag", type=float, default=1.0)
    sw.add_argument("--seed", type=int, default=0)
    _add_pipeline_flags(sw)
    sw.add_argument("--baseline-s", type=_int_list, default=None,
                    help="comma-separated sampling sizes for the baseline")
    sw.add_argument("--report", required=True, help="output JSON path")
    sw.add_argument("--csv", required=True, help="output CSV path")
    sw.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MatrixParseError, CliInputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotPositiveDefiniteError, DivergenceError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
