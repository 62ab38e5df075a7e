"""Command-line entry point.

JSON results go to stdout, a one-line human summary to stderr.  Exit codes:
0 success (or verification PASS), 1 verification FAIL or solver failure,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import jsonio
from .errors import LeontiefError
from .games import (
    DegenerateGameWarning,
    check_eps_nash,
    check_eps_relative_nash,
    lemke_howson,
    support_enumeration_nash,
)
from .market import (
    check_allocation_eps_equilibrium,
    check_eps_equilibrium,
    check_equilibrium,
    check_strict_eps_equilibrium,
)
from .reduction import reduce_game_to_economy
from .smoothed import (
    ExperimentConfig,
    PerturbationModel,
    PipelineFailure,
    approximate_nash_from_smoothed_leontief,
    perturb_economy,
    records_to_csv,
    seed_from_env,
    summarize,
)
from .solvers import GridSolver, GridSpec, SolveResult, Status, grid_search_equilibrium, refine_equilibrium
from .solvers import solve_reduced_exact


class InputError(Exception):
    pass


def _load(path: str) -> dict:
    try:
        return jsonio.load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _emit(obj, out=None) -> None:
    text = jsonio.dumps(obj)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _seed(args) -> int:
    return args.seed if args.seed is not None else seed_from_env(0)


def cmd_reduce(args) -> int:
    game = jsonio.game_from_dict(_load(args.game), args.rational)
    reduced = reduce_game_to_economy(game)
    _emit(jsonio.reduced_to_dict(reduced), args.out)
    _say(f"reduced {game.n}x{game.n} game to a {2 * game.n}-good economy")
    return 0


def cmd_solve_game(args) -> int:
    game = jsonio.game_from_dict(_load(args.game))
    if args.method == "lemke":
        profiles = [lemke_howson(game, args.label)]
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DegenerateGameWarning)
            profiles = support_enumeration_nash(game)
        if caught:
            _say("warning: degenerate game; list may be incomplete")
    _emit({"equilibria": [jsonio.profile_to_dict(p) for p in profiles]}, args.out)
    _say(f"{len(profiles)} equilibrium(s)")
    return 0


def cmd_solve_market(args) -> int:
    data = _load(args.econ)
    if args.exact_reduced:
        reduced = jsonio.reduced_from_dict(data)
        eq = solve_reduced_exact(reduced)
        result = SolveResult(Status.FOUND, eq, 0, 0.0)
    else:
        econ = jsonio.economy_from_dict(data)
        result = grid_search_equilibrium(econ, GridSpec(args.resolution, args.eps, args.max_points))
        if not result.found and args.refine_iters > 0 and result.equilibrium is not None:
            eq = result.equilibrium
            ref = refine_equilibrium(econ, eq.u, eq.w, args.eps, args.refine_iters)
            result = SolveResult(
                ref.status, ref.equilibrium, result.points_scanned + ref.points_scanned, ref.achieved_eps
            )
    _emit(result.to_dict(), args.out)
    _say(f"{result.status.value} after {result.points_scanned} points")
    return 0 if result.found else 1


def cmd_verify_market(args) -> int:
    econ = jsonio.economy_from_dict(_load(args.econ), args.rational)
    if args.alloc:
        X = jsonio.allocation_from_dict(_load(args.alloc), args.rational)
        w = jsonio.equilibrium_from_dict(_load(args.eq), args.rational).w if args.eq else None
        if w is None:
            w = jsonio.allocation_prices(_load(args.alloc), args.rational)
        eps = args.eps if args.eps is not None else "0"
        check = check_strict_eps_equilibrium if args.strict else check_allocation_eps_equilibrium
        report = check(econ, X, w, eps)
    else:
        if not args.eq:
            raise InputError("--eq is required unless --alloc is given")
        eq = jsonio.equilibrium_from_dict(_load(args.eq), args.rational)
        if args.eps is None:
            report = check_equilibrium(econ, eq.u, eq.w, args.tol)
        else:
            report = check_eps_equilibrium(econ, eq.u, eq.w, args.eps, args.tol)
    _emit(report.to_dict(), args.out)
    _say("PASS" if report.passed else f"FAIL: {', '.join(report.failed_conditions())}")
    return 0 if report.passed else 1


def cmd_verify_nash(args) -> int:
    game = jsonio.game_from_dict(_load(args.game), args.rational)
    prof = jsonio.profile_from_dict(_load(args.profile), args.rational)
    check = check_eps_relative_nash if args.relative else check_eps_nash
    report = check(game, prof, args.eps, args.tol)
    _emit(report.to_dict(), args.out)
    _say("PASS" if report.passed else f"FAIL: {', '.join(report.failed_conditions())}")
    return 0 if report.passed else 1


def cmd_perturb(args) -> int:
    if args.game:
        reduced = reduce_game_to_economy(jsonio.game_from_dict(_load(args.game)))
    elif args.reduced:
        reduced = jsonio.reduced_from_dict(_load(args.reduced))
    else:
        raise InputError("one of --game or --reduced is required")
    out = perturb_economy(reduced, PerturbationModel(args.model, args.sigma), _seed(args))
    _emit(jsonio.reduced_to_dict(out), args.out)
    _say(f"{args.model} perturbation, sigma={args.sigma}")
    return 0


def cmd_pipeline(args) -> int:
    game = jsonio.game_from_dict(_load(args.game))
    solver = GridSolver(args.resolution, args.eps, args.max_points, args.refine_iters)
    seed = _seed(args)
    try:
        prof, rec = approximate_nash_from_smoothed_leontief(
            game, args.eps_prime, solver, seed, c_sigma=args.c_sigma, sigma=args.sigma, timing=args.timing
        )
    except PipelineFailure as exc:
        _emit({"profile": None, "record": _record_dict(exc.record), "error": str(exc)}, args.out)
        _say(f"FAIL: {exc}")
        return 1
    _emit({"profile": jsonio.profile_to_dict(prof), "record": _record_dict(rec)}, args.out)
    _say(f"relative-Nash delta {rec.nash_delta:.3g} (bound {rec.bound_delta:.3g})")
    return 0


def _record_dict(rec) -> dict:
    return {
        "sigma": jsonio.encode_number(rec.sigma),
        "seed": rec.seed,
        "time_ms": jsonio.encode_number(rec.time_ms),
        "points_scanned": rec.points_scanned,
        "market_eps": jsonio.encode_number(rec.market_eps),
        "nash_delta": jsonio.encode_number(rec.nash_delta),
        "bound_delta": jsonio.encode_number(rec.bound_delta),
        "prop_violations": rec.prop_violations,
    }


def config_from_dict(d: dict, seed=None, workers=None, timing=False) -> ExperimentConfig:
    from .numeric import to_float

    solver = d.get("solver", {})
    game = jsonio.game_from_dict(d["game"]) if "game" in d else None
    return ExperimentConfig(
        sigmas=tuple(to_float(s) for s in d.get("sigmas", ())),
        trials=int(d.get("trials", 1)),
        eps_prime=to_float(d.get("eps_prime", 0.1)),
        master_seed=int(seed if seed is not None else d.get("master_seed", 0)),
        game=game,
        game_seed=d.get("game_seed"),
        game_size=int(d.get("game_size", 2)),
        resolution=int(solver.get("resolution", 64)),
        eps_target=to_float(solver.get("eps_target", 0.01)),
        refine_iters=int(solver.get("refine_iters", 20_000)),
        C=to_float(d.get("C", 10.0)),
        timing=timing,
        workers=int(workers if workers is not None else d.get("workers", 1)),
    )


def cmd_experiment(args) -> int:
    data = _load(args.config)
    seed = args.seed
    if seed is None and "master_seed" not in data:
        seed = seed_from_env(0)
    cfg = config_from_dict(data, seed, args.workers, args.timing)
    from .smoothed import run_experiment

    records = run_experiment(cfg)
    text = records_to_csv(records)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for s in summarize(records):
        mean = "n/a" if s.mean_delta is None else f"{s.mean_delta:.3g}"
        _say(f"sigma={s.sigma:g}: {s.succeeded}/{s.trials} solved, mean delta {mean}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="leontief", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, rational=False):
        sp.add_argument("--out", help="write JSON here instead of stdout")
        if rational:
            sp.add_argument("--rational", action="store_true", help="exact rational arithmetic")

    sp = sub.add_parser("reduce", help="map a [1,2] game to its Leontief economy")
    sp.add_argument("--game", required=True)
    common(sp, rational=True)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("solve-game", help="exact Nash equilibria of a small game")
    sp.add_argument("--game", required=True)
    sp.add_argument("--method", choices=("support", "lemke"), default="support")
    sp.add_argument("--label", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_solve_game)

    sp = sub.add_parser("solve-market", help="grid search (plus refinement) for a market equilibrium")
    sp.add_argument("--econ", required=True)
    sp.add_argument("--resolution", type=int, default=32)
    sp.add_argument("--eps", type=float, default=1e-6)
    sp.add_argument("--max-points", type=int, default=10_000_000)
    sp.add_argument("--refine-iters", type=int, default=0)
    sp.add_argument("--exact-reduced", action="store_true", help="input is an unperturbed reduced economy")
    common(sp)
    sp.set_defaults(func=cmd_solve_market)

    sp = sub.add_parser("verify-market", help="check a market equilibrium or allocation")
    sp.add_argument("--econ", required=True)
    sp.add_argument("--eq", help="equilibrium JSON with u and w")
    sp.add_argument("--alloc", help="allocation JSON with X (prices from --eq or a 'w' key)")
    sp.add_argument("--eps", default=None)
    sp.add_argument("--strict", action="store_true")
    sp.add_argument("--tol", default=None)
    common(sp, rational=True)
    sp.set_defaults(func=cmd_verify_market)

    sp = sub.add_parser("verify-nash", help="check an approximate Nash equilibrium")
    sp.add_argument("--game", required=True)
    sp.add_argument("--profile", required=True)
    sp.add_argument("--eps", default="0")
    sp.add_argument("--relative", action="store_true")
    sp.add_argument("--tol", default=None)
    common(sp, rational=True)
    sp.set_defaults(func=cmd_verify_nash)

    sp = sub.add_parser("perturb", help="sample a perturbed reduced economy")
    sp.add_argument("--game")
    sp.add_argument("--reduced")
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--model", choices=("uniform", "gaussian"), default="uniform")
    sp.add_argument("--seed", type=int)
    common(sp)
    sp.set_defaults(func=cmd_perturb)

    sp = sub.add_parser("pipeline", help="approximate Nash equilibrium through a perturbed market")
    sp.add_argument("--game", required=True)
    sp.add_argument("--eps-prime", type=float, required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--sigma", type=float, default=None, help="override the eps'/n^3 schedule")
    sp.add_argument("--c-sigma", type=float, default=1.0)
    sp.add_argument("--resolution", type=int, default=64)
    sp.add_argument("--eps", type=float, default=0.01, help="market eps target for the solver")
    sp.add_argument("--max-points", type=int, default=10_000_000)
    sp.add_argument("--refine-iters", type=int, default=20_000)
    sp.add_argument("--timing", action="store_true", help="record wall time (output no longer reproducible)")
    common(sp)
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("experiment", help="run a seeded smoothed experiment and emit CSV")
    sp.add_argument("--config", required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--timing", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, LeontiefError, ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        _say(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
