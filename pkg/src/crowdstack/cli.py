"""Command-line entry point.

Exit codes: 0 success, 1 steering violated, 2 input error, 3 capacity exceeded.
Exactly one JSON result document goes to stdout; logs go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from crowdstack import __version__
from crowdstack import documents as docs
from crowdstack.best_response import MixedStrategy, optimal_observed_action_commitment
from crowdstack.errors import (
    CapacityError,
    DegenerateTypeError,
    InvalidSpecError,
    UnsupportedShapeError,
)
from crowdstack.game_model import MAX_ENUMERATED_TASKS, enumerate_worker_types
from crowdstack.reward_design import feasible_mu_region, mu_bounds_for_type, verify_steering
from crowdstack.simulation import simulate
from crowdstack.stackelberg_solver import (
    brute_force_commitment_value,
    harsanyi_transform,
    solve_multiple_lps,
    write_matrix,
)

logger = logging.getLogger("crowdstack")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(doc: dict) -> None:
    sys.stdout.write(docs.dumps(doc) + "\n")


def cmd_enumerate_types(args) -> int:
    if not 1 <= args.tasks <= MAX_ENUMERATED_TASKS:
        raise UsageError(
            f"--tasks must be in 1..{MAX_ENUMERATED_TASKS}; 4*K! types for K={args.tasks} "
            "exceeds the enumeration capacity"
        )
    types = enumerate_worker_types(args.tasks)
    payload = {
        "tasks": args.tasks,
        "count": len(types),
        "types": [
            {"index": i, "beta_category": wt.beta_category, "preference_order": list(wt.preference_order)}
            for i, wt in enumerate(types)
        ],
    }
    _emit(docs.result_document({"name": "enumerate-types", "tasks": args.tasks}, None, payload))
    return EXIT_OK


def cmd_solve(args) -> int:
    spec, raw = docs.load_config(args.config)
    command = {"name": "solve", "config": args.config, "method": args.method}
    if args.method == "multilp":
        payload = {"method": "multilp", **docs.solve_result_to_dict(solve_multiple_lps(spec))}
    elif args.method == "observed":
        best = optimal_observed_action_commitment(spec)
        payload = {"method": "observed", "task": best.task, "value": best.value}
    else:
        if args.grid < 0:
            raise UsageError("--grid must be >= 0")
        command["grid"] = args.grid
        value = brute_force_commitment_value(spec, args.grid)
        payload = {"method": "grid", "grid": args.grid, "value": value}
    _emit(docs.result_document(command, raw, payload))
    return EXIT_OK


def cmd_design_mu(args) -> int:
    spec, raw = docs.load_config(args.config)
    per_type = []
    for theta, p in enumerate(spec.prior):
        if p > 0:
            iv = mu_bounds_for_type(theta, spec)
            per_type.append({"type": theta, **docs.interval_to_dict(iv)})
    region = feasible_mu_region(spec)
    payload = {"per_type": per_type, "region": docs.interval_to_dict(region)}
    if not region.nonempty:
        payload["blocking_types"] = [region.lower_type, region.upper_type]
        logger.warning(
            "no mu steers every type: type %s needs mu > %r, type %s needs mu < %r",
            region.lower_type, region.lower, region.upper_type, region.upper,
        )
    _emit(docs.result_document({"name": "design-mu", "config": args.config}, raw, payload))
    return EXIT_OK


def cmd_verify_steering(args) -> int:
    spec, raw = docs.load_config(args.config)
    verdict = verify_steering(spec, args.mu)
    if verdict.boundary_types:
        logger.warning(
            "mu = %r sits on the bound of type(s) %s; the outcome depends on tie-breaking",
            args.mu, list(verdict.boundary_types),
        )
    command = {"name": "verify-steering", "config": args.config, "mu": args.mu}
    _emit(docs.result_document(command, raw, docs.verdict_to_dict(verdict)))
    return EXIT_OK if verdict.ok else EXIT_VIOLATION


def _parse_sigma(text: str) -> MixedStrategy:
    try:
        return MixedStrategy(tuple(float(x) for x in text.split(",")))
    except ValueError as exc:
        raise UsageError(f"--sigma: {exc}") from exc


def cmd_simulate(args) -> int:
    spec, raw = docs.load_config(args.config)
    command = {"name": "simulate", "config": args.config, "rounds": args.rounds, "seed": args.seed}
    if args.from_solve:
        sigma = solve_multiple_lps(spec).sigma
        command["from_solve"] = True
    else:
        sigma = _parse_sigma(args.sigma)
        command["sigma"] = args.sigma
    if len(sigma) != spec.n_tasks:
        raise UsageError(f"--sigma has {len(sigma)} entries for {spec.n_tasks} tasks")
    if args.rounds < 1:
        raise UsageError("--rounds must be >= 1")
    report = simulate(spec, sigma, args.rounds, args.seed)
    payload = {"sigma": list(sigma.probs), **docs.report_to_dict(report)}
    _emit(docs.result_document(command, raw, payload))
    return EXIT_OK


def cmd_transform(args) -> int:
    spec, raw = docs.load_config(args.config)
    game = harsanyi_transform(spec)
    write_matrix(game.leader_payoffs, args.out)
    payload = {"shape": list(game.leader_payoffs.shape), "leader_out": str(args.out)}
    if args.follower_out:
        write_matrix(game.follower_payoffs, args.follower_out)
        payload["follower_out"] = str(args.follower_out)
    command = {"name": "transform", "config": args.config, "out": str(args.out)}
    _emit(docs.result_document(command, raw, payload))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crowdstack", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate-types", help="list all 4*K! worker types")
    p.add_argument("--tasks", type=int, required=True, metavar="K")
    p.set_defaults(func=cmd_enumerate_types)

    p = sub.add_parser("solve", help="optimal leader commitment")
    p.add_argument("config", help="game config JSON")
    p.add_argument("--method", choices=("multilp", "observed", "grid"), default="multilp")
    p.add_argument("--grid", type=int, default=1000, help="grid steps for --method grid")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("design-mu", help="disobedience-cost interval that steers every type")
    p.add_argument("config")
    p.set_defaults(func=cmd_design_mu)

    p = sub.add_parser("verify-steering", help="check steering at a given disobedience cost")
    p.add_argument("config")
    p.add_argument("--mu", type=float, required=True)
    p.set_defaults(func=cmd_verify_steering)

    p = sub.add_parser("simulate", help="Monte Carlo replay of a commitment")
    p.add_argument("config")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--sigma", help="comma-separated probabilities, one per task")
    src.add_argument("--from-solve", action="store_true", help="use the multilp commitment")
    p.add_argument("--rounds", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("transform", help="dump the transformed normal-form game")
    p.add_argument("config")
    p.add_argument("--out", type=Path, required=True, help="leader payoff matrix (TSV)")
    p.add_argument("--follower-out", type=Path, help="optional follower payoff matrix (TSV)")
    p.set_defaults(func=cmd_transform)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.handlers[:] = [handler]
    logger.setLevel(logging.WARNING - 10 * min(args.verbose, 2))
    logger.propagate = False
    try:
        return args.func(args)
    except InvalidSpecError as exc:
        logger.error("%s", exc)
        return EXIT_INPUT
    except (UsageError, UnsupportedShapeError, DegenerateTypeError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_INPUT
    except CapacityError as exc:
        logger.error("%s", exc)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
