#!/usr/bin/env python3
# PYTHON_ARGCOMPLETE_OK
"""
submodmm - Command Line Interface

Majorize-minimize and minorize-maximize for submodular functions, with
brute-force certification at small scale and an experiment runner.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

try:
    import argcomplete
except ImportError:
    argcomplete = None

from . import config
from .completers import (
    JSONFilesCompleter,
    anchor_completer,
    schedule_completer,
    supergradient_kind_completer,
)
from .core import ArgumentError, SetFunctionOracle, SubsetMask
from .functions import build_from_problem
from .harness import ExperimentSpec, run_experiment, write_result
from .linopt import ConstraintFamily
from .mmax import SCHEDULE_NAMES, ScheduleConfig, maximize
from .mmin import DEFAULT_CONSTRAINED_ETA, constrained_mmin, lattice_summary, mmin_alternate, mmin_iterate
from .oracle import (
    brute_maximize,
    brute_minimize,
    find_membership_witness,
    verify_constrained_bound,
    verify_lattice_claims,
)
from .semigradient import SUPERGRADIENT_KINDS, Permutation, subgradient_from_permutation, supergradient

MINIMIZE_VARIANTS = ("I", "II", "III", "alternating")
VERIFY_CLAIMS = ("lattice", "semigradient", "bound")


def load_json(path: str, what: str) -> Dict[str, Any]:
    p = Path(path)
    if not p.exists():
        raise ArgumentError(f"{what} file '{path}' not found")
    with open(p) as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ArgumentError(f"Invalid JSON in {what} file '{path}': {e}") from e


def load_problem(args: argparse.Namespace) -> Tuple[SetFunctionOracle, Optional[ConstraintFamily], Dict[str, Any]]:
    """
    Build the oracle and optional constraint from --spec and --constraint.

    A ``constraint`` object inside the problem file is used unless
    --constraint names a separate file.
    """
    problem = load_json(args.spec, "Problem")
    if getattr(args, "instance_seed", None) is not None:
        problem = dict(problem, seed=args.instance_seed)
    f = build_from_problem(problem)
    constraint = problem.get("constraint")
    if getattr(args, "constraint", None):
        constraint = load_json(args.constraint, "Constraint")
    C = ConstraintFamily.from_dict(constraint, n=f.n) if constraint else None
    if C is not None and C.n != f.n:
        raise ArgumentError(f"Constraint is over {C.n} elements, problem over {f.n}")
    return f, C, problem


def parse_ids(text: Optional[str], n: int) -> Optional[SubsetMask]:
    """Parse a comma-separated list of 1-based ids; an empty string is the empty set."""
    if text is None:
        return None
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        ids = [int(p) for p in parts]
    except ValueError:
        raise ArgumentError(f"Invalid element list '{text}': expected comma-separated integers") from None
    return SubsetMask.from_external(ids, n)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def emit(data: Dict[str, Any], out: Optional[str]) -> None:
    """Print JSON to stdout, or write it to ``out``."""
    text = json.dumps(data, sort_keys=True, indent=2, default=_json_default)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
        print(f"Results saved to: {path}")
    else:
        print(text)


def cmd_minimize(args: argparse.Namespace) -> int:
    f, C, _ = load_problem(args)
    reference = None
    if args.brute_force_certify:
        reference = brute_minimize(f, C)
    if C is not None and C.kind != "unconstrained":
        eta = DEFAULT_CONSTRAINED_ETA if args.eta is None else args.eta
        report = constrained_mmin(f, C, eta=eta, reference=reference)
    else:
        eta = 0.0 if args.eta is None else args.eta
        start = parse_ids(args.start, f.n)
        if args.variant == "alternating":
            report = mmin_alternate(f, start if start is not None else f.empty(), eta=eta)
        else:
            kind = {"I": "grow", "II": "shrink", "III": "bar"}[args.variant]
            default = f.full() if args.variant == "II" else f.empty()
            report = mmin_iterate(f, start if start is not None else default, kind, eta=eta)
    data = report.to_dict()
    passed = True
    if reference is not None:
        data["brute_force"] = reference.to_dict()
        if C is None or C.kind == "unconstrained":
            data["factor"] = 1.0 if abs(reference.optimum_value) <= config.TOLERANCE else (
                report.value / reference.optimum_value
            )
        passed = report.value >= reference.optimum_value - config.TOLERANCE
    emit(data, args.out)
    return 0 if passed else 1


def cmd_maximize(args: argparse.Namespace) -> int:
    f, C, _ = load_problem(args)
    reference = brute_maximize(f, C) if args.brute_force_certify else None
    cfg = ScheduleConfig(eta=args.eta, seed=args.seed, repetitions=args.reps)
    report = maximize(f, args.schedule, cfg, C=C, reference=reference, enumerate_triples=args.triples)
    data = report.to_dict()
    passed = True
    if reference is not None:
        data["brute_force"] = reference.to_dict()
        passed = report.value <= reference.optimum_value + config.TOLERANCE
        if report.bound is not None and report.factor_certificate is not None:
            passed = passed and report.factor_certificate >= report.bound - 1e-9
    emit(data, args.out)
    return 0 if passed else 1


def cmd_prune(args: argparse.Namespace) -> int:
    f, _, _ = load_problem(args)
    emit(lattice_summary(f).to_dict(), args.out)
    return 0


def _semigradient_checks(f: SetFunctionOracle, Y: SubsetMask, kinds: List[str], seed: int) -> Dict[str, Any]:
    rng = np.random.default_rng(seed)
    vectors = [("subgradient", subgradient_from_permutation(f, Permutation.random_anchored(Y, rng)))]
    vectors += [(kind, supergradient(f, Y, kind)) for kind in kinds]
    checks = {}
    for name, vec in vectors:
        witness = find_membership_witness(f, vec)
        tight = abs(vec.bound()(Y) - f.evaluate(Y)) <= 1e-9
        checks[name] = {
            "vector": vec.vector.w.tolist(),
            "passed": witness is None and tight,
            "tight_at_anchor": tight,
            "witness": witness.to_external() if witness is not None else None,
        }
    return {
        "claim": "semigradient",
        "anchor": Y.to_external(),
        "checks": checks,
        "passed": all(c["passed"] for c in checks.values()),
    }


def cmd_verify(args: argparse.Namespace) -> int:
    f, C, _ = load_problem(args)
    if args.claim == "lattice":
        data = dict(verify_lattice_claims(f).to_dict(), claim="lattice")
    elif args.claim == "semigradient":
        Y = parse_ids(args.anchor, f.n) if args.anchor is not None else f.empty()
        kinds = [args.kind] if args.kind else list(SUPERGRADIENT_KINDS)
        data = _semigradient_checks(f, Y, kinds, args.seed)
    else:
        if C is None:
            raise ArgumentError("The bound claim needs a constraint (--constraint or a 'constraint' object)")
        data = dict(verify_constrained_bound(f, C).to_dict(), claim="bound")
    emit(data, args.out)
    return 0 if data["passed"] else 1


def cmd_bench(args: argparse.Namespace) -> int:
    spec = ExperimentSpec.load(args.spec)
    if args.seed is not None:
        spec.seeds = [args.seed]
    result = run_experiment(spec, jobs=args.jobs)
    rows_path, summary_path = write_result(result, args.out or ".")
    print(f"Experiment {spec.name}: {len(result.rows)} rows, {len(result.failures)} failed")
    print("Results saved to:")
    print(f"  - Rows: {rows_path}")
    print(f"  - Summary: {summary_path}")
    return 0 if result.passed else 1


def _add_spec(parser: argparse.ArgumentParser, help_text: str) -> None:
    spec_arg = parser.add_argument("--spec", "-s", required=True, help=help_text)
    if JSONFilesCompleter:
        spec_arg.completer = JSONFilesCompleter


def _add_common(parser: argparse.ArgumentParser, constraint: bool = True) -> None:
    _add_spec(parser, "Problem JSON: {family, n, seed, params[, constraint]}")
    if constraint:
        constraint_arg = parser.add_argument(
            "--constraint", "-c", help="Constraint JSON file (overrides the problem's)"
        )
        if JSONFilesCompleter:
            constraint_arg.completer = JSONFilesCompleter
    out_arg = parser.add_argument("--out", "-o", help="Write JSON here instead of stdout")
    if JSONFilesCompleter:
        out_arg.completer = JSONFilesCompleter


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="submodmm",
        description="submodmm - Submodular minimization and maximization via semigradients",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=r"""
Examples:
  # Prune the lattice of minimizers of a problem
  submodmm prune --spec my_inputs/worked_example.json

  # MMin-I from the empty set, certified against brute force
  submodmm minimize --spec my_inputs/worked_example.json --variant I --brute-force-certify

  # Constrained minimization over spanning trees of a grid
  submodmm minimize --spec my_inputs/tree_problem.json --brute-force-certify

  # Randomized local search, best of 5
  submodmm maximize --spec my_inputs/diversity.json --schedule rls --reps 5 --seed 7

  # Check the lattice claims exhaustively
  submodmm verify --spec my_inputs/worked_example.json --claim lattice

  # Run an experiment grid on 4 processes
  submodmm bench --spec my_inputs/max_comparison.json --out results --jobs 4

Element ids in all inputs and outputs are 1-based.
        """,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("minimize", help="Run MMin (unconstrained variants or constrained MMin-I)")
    _add_common(p)
    p.add_argument("--variant", choices=MINIMIZE_VARIANTS, default="I", help="Unconstrained variant (default: I)")
    start_arg = p.add_argument("--start", help="Starting set as comma-separated ids (default: empty, V for II)")
    if argcomplete:
        start_arg.completer = anchor_completer
    p.add_argument(
        "--eta",
        type=float,
        help=f"Relative progress threshold (default: 0, or {DEFAULT_CONSTRAINED_ETA:g} with a constraint)",
    )
    p.add_argument("--instance-seed", type=int, help="Override the problem seed")
    p.add_argument("--brute-force-certify", action="store_true", help="Compare with exhaustive enumeration")
    p.set_defaults(handler=cmd_minimize)

    p = sub.add_parser("maximize", help="Run an MMax schedule")
    _add_common(p)
    schedule_arg = p.add_argument(
        "--schedule", default="rls", help=f"One of {', '.join(SCHEDULE_NAMES)} (default: rls)"
    )
    if argcomplete:
        schedule_arg.completer = schedule_completer
    p.add_argument("--seed", type=int, default=0, help="Schedule seed (default: 0)")
    p.add_argument("--reps", type=int, default=1, help="Repetitions for randomized schedules (default: 1)")
    p.add_argument("--eta", type=float, default=0.01, help="Acceptance threshold (default: 0.01)")
    p.add_argument("--triples", action="store_true", help="Knapsack: enumerate all feasible triples")
    p.add_argument("--instance-seed", type=int, help="Override the problem seed")
    p.add_argument("--brute-force-certify", action="store_true", help="Compare with exhaustive enumeration")
    p.set_defaults(handler=cmd_maximize)

    p = sub.add_parser("prune", help="Compute the lattices [A, B] and [A+, B+]")
    _add_common(p, constraint=False)
    p.add_argument("--instance-seed", type=int, help="Override the problem seed")
    p.set_defaults(handler=cmd_prune)

    p = sub.add_parser("verify", help="Exhaustively certify a claim and emit a JSON certificate")
    _add_common(p)
    p.add_argument("--claim", choices=VERIFY_CLAIMS, default="lattice", help="Claim to check (default: lattice)")
    anchor_arg = p.add_argument("--anchor", help="Semigradient anchor as comma-separated ids (default: empty)")
    if argcomplete:
        anchor_arg.completer = anchor_completer
    kind_arg = p.add_argument("--kind", help="Check only this supergradient kind")
    if argcomplete:
        kind_arg.completer = supergradient_kind_completer
    p.add_argument("--seed", type=int, default=0, help="Seed for the subgradient permutation (default: 0)")
    p.add_argument("--instance-seed", type=int, help="Override the problem seed")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("bench", help="Run an experiment grid and write CSV tables")
    _add_spec(p, "Experiment JSON (kind: lattice_reduction, constrained_min or max_comparison)")
    p.add_argument("--out", "-o", help="Output directory (default: current directory)")
    p.add_argument("--jobs", "-j", type=int, default=config.JOBS, help=f"Worker processes (default: {config.JOBS})")
    p.add_argument("--seed", type=int, help="Run a single seed instead of the experiment's seeds")
    p.set_defaults(handler=cmd_bench)
    return parser


def main():
    """Main entry point for the CLI."""
    parser = build_parser()

    # Enable argcomplete if available
    if argcomplete:
        argcomplete.autocomplete(parser)

    args = parser.parse_args()
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")

    try:
        code = args.handler(args)
    except FileNotFoundError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)
    except RuntimeError as e:
        print(f"Error during computation: {e}", file=sys.stderr)
        sys.exit(1)
    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        if args.verbose:
            import traceback

            traceback.print_exc()
        sys.exit(1)
    sys.exit(code)


if __name__ == "__main__":
    main()
