"""Command-line entry point: ``ensemble-coherence {b92,sym,asymptotic,verify}``.

Exit status: 0 success, 1 claim failure or sandwich violation, 2 bad
configuration, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .entangle import DEFAULT_SEED
from .qubit import DomainError
from .sweeps import FORMATS, SweepConfig, run_sweep
from .sympovm import SandwichViolation
from .verify import EXIT_CONFIG, EXIT_FAIL, EXIT_IO, EXIT_PASS, run_verify


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--e-grid", type=int, default=201, help="number of entanglement points in [0, 1] (default 201)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for multi-start optimizers")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: CPU count)")
    p.add_argument("--basis-tol", type=float, default=1e-10, help="basis search tolerance (rad)")
    p.add_argument("--gamma-tol", type=float, default=1e-10, help="POVM rotation search tolerance (rad)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ensemble-coherence", description="Entanglement-to-coherence conversion sweeps.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    _common(sub.add_parser("b92", help="two-outcome Hadamard measurement sweep"))
    p = sub.add_parser("sym", help="symmetric POVM sweep, coherence maximized over the rotation")
    p.add_argument("--n", type=int, required=True, help="number of POVM elements (>= 2)")
    _common(p)
    p = sub.add_parser("asymptotic", help="many-outcome symmetric POVM sweep")
    p.add_argument("--n", type=int, default=256, help="number of POVM elements (>= 64, default 256)")
    _common(p)
    _common(sub.add_parser("verify", help="check the numerical claims and print a table"))
    return parser


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    return SweepConfig(
        experiment=args.experiment,
        n=getattr(args, "n", None),
        e_grid=args.e_grid,
        basis_tol=args.basis_tol,
        gamma_tol=args.gamma_tol,
        output_path=args.out,
        format=args.format,
        seed=args.seed,
        threads=args.threads,
    )


def main(argv: list[str] | None = None) -> int:
    # argparse usage errors exit with 2, the configuration-error code
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = os.path.dirname(os.path.abspath(cfg.output_path)) if cfg.output_path else None
    if out_dir and not os.path.isdir(out_dir):
        print(f"error: output directory {out_dir} does not exist", file=sys.stderr)
        return EXIT_IO
    if cfg.experiment == "verify":
        return run_verify(cfg)
    try:
        text = run_sweep(cfg)
    except SandwichViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if not cfg.output_path:
        sys.stdout.write(text)
    return EXIT_PASS


if __name__ == "__main__":
    raise SystemExit(main())
