"""Perturbed reduced economies and the smoothed game-solving pipeline.

Randomness comes from numpy's counter-based Philox generator seeded with a
64-bit integer.  Each variate consumes one 64-bit draw ``k``, turned into
``v = (floor(k / 2**11) + 0.5) / 2**53`` in (0, 1).  Uniform noise is
``sigma * (2 v - 1)``; Gaussian noise is ``sigma * Phi^{-1}(v)``.  All of
``Delta^E`` is drawn first (row-major), then ``Delta^D``.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtri

from .errors import PreconditionViolated, SolverFailed, ZeroUtilityBlock
from .games import BimatrixGame, relative_nash_delta
from .market import LeontiefEconomy, measured_eps
from .reduction import (
    ReducedEconomy,
    property_report,
    recover_strategies,
    reduce_game_to_economy,
    transfer_bound,
)
from .solvers import GridSolver, SolveResult

UNIFORM = "uniform"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class PerturbationModel:
    kind: str = UNIFORM
    sigma: float = 0.0

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in (UNIFORM, GAUSSIAN):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        object.__setattr__(self, "kind", kind)


def philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) % (1 << 64)))


def open_unit(gen: np.random.Generator, size) -> np.ndarray:
    """Uniform variates strictly inside (0, 1) with 53-bit resolution."""
    k = gen.integers(0, 1 << 64, size=size, dtype=np.uint64, endpoint=False)
    return ((k >> np.uint64(11)).astype(np.float64) + 0.5) / 2.0**53


def noise(model: PerturbationModel, gen: np.random.Generator, shape) -> np.ndarray:
    v = open_unit(gen, shape)
    if model.kind == UNIFORM:
        return model.sigma * (2.0 * v - 1.0)
    return model.sigma * ndtri(v)


def perturb_economy(reduced: ReducedEconomy, model: PerturbationModel, seed: int) -> ReducedEconomy:
    """Add independent noise to every entry of ``E`` and ``D`` and clamp at zero.

    Rows of ``E`` are not renormalized afterwards.
    """
    if reduced.sigma != 0:
        raise PreconditionViolated("perturb an unperturbed reduced economy")
    if not model.sigma < 1:
        raise PreconditionViolated("perturbation magnitude must be below 1")
    if model.sigma == 0:
        return reduced
    econ = reduced.econ.as_float()
    gen = philox(seed)
    E = np.maximum(econ.E + noise(model, gen, econ.E.shape), 0.0)
    D = np.maximum(econ.D + noise(model, gen, econ.D.shape), 0.0)
    return ReducedEconomy(LeontiefEconomy(E, D), reduced.game_size, float(model.sigma))


def sigma_schedule(eps_prime: float, n: int, c_sigma: float = 1.0) -> float:
    return eps_prime / (c_sigma * n**3)


CSV_COLUMNS = (
    "sigma",
    "seed",
    "time_ms",
    "points_scanned",
    "market_eps",
    "nash_delta",
    "bound_delta",
    "prop_violations",
)


@dataclass(frozen=True)
class TrialRecord:
    sigma: float
    seed: int
    time_ms: Optional[float] = None
    points_scanned: Optional[int] = None
    market_eps: Optional[float] = None
    nash_delta: Optional[float] = None
    bound_delta: Optional[float] = None
    prop_violations: Optional[int] = None

    @property
    def succeeded(self) -> bool:
        return self.nash_delta is not None


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


_INT_COLUMNS = {"seed", "points_scanned", "prop_violations"}


def records_from_csv(text: str) -> list:
    rows = csv.DictReader(io.StringIO(text))
    out = []
    for row in rows:
        vals = {}
        for c in CSV_COLUMNS:
            raw = row[c]
            if raw == "":
                vals[c] = None
            elif c in _INT_COLUMNS:
                vals[c] = int(raw)
            else:
                vals[c] = float(raw)
        out.append(TrialRecord(**vals))
    return out


class PipelineFailure(SolverFailed):
    """Solver or recovery failure; the partially filled record rides along."""

    def __init__(self, message: str, record: TrialRecord):
        super().__init__(message)
        self.record = record


def approximate_nash_from_smoothed_leontief(
    game: BimatrixGame,
    eps_prime: float,
    solver: Optional[Callable[[ReducedEconomy], SolveResult]] = None,
    seed: int = 0,
    c_sigma: float = 1.0,
    sigma: Optional[float] = None,
    C: float = 10.0,
    timing: bool = False,
) -> tuple:
    """Reduce, perturb, solve, recover.

    ``sigma`` defaults to ``eps_prime / (c_sigma n^3)``.  Returns the
    recovered profile and its :class:`TrialRecord`; solver or recovery
    failures raise :class:`PipelineFailure` carrying the record.
    """
    if not 0 < eps_prime < 1:
        raise ValueError("eps_prime must lie in (0, 1)")
    n = game.n
    solver = GridSolver() if solver is None else solver
    sigma = sigma_schedule(eps_prime, n, c_sigma) if sigma is None else float(sigma)

    reduced = reduce_game_to_economy(game)
    perturbed = perturb_economy(reduced, PerturbationModel(UNIFORM, sigma), seed)
    t0 = time.perf_counter()
    result = solver(perturbed)
    elapsed = (time.perf_counter() - t0) * 1000.0 if timing else None
    base = TrialRecord(sigma=sigma, seed=int(seed), time_ms=elapsed, points_scanned=int(result.points_scanned))
    if not result.found:
        raise PipelineFailure(f"solver returned {result.status.value}", base)

    eq = result.equilibrium
    econ = perturbed.econ.as_float()
    u = np.asarray(eq.u, dtype=float)
    w = np.asarray(eq.w, dtype=float)
    w = w / w.sum()
    market_eps = float(measured_eps(econ, u, w))
    try:
        prof = recover_strategies(u, n)
    except ZeroUtilityBlock as exc:
        raise PipelineFailure(str(exc), replace(base, market_eps=market_eps)) from exc

    delta = float(relative_nash_delta(game, prof))
    bound = transfer_bound(n, market_eps, sigma, C)
    violations = None
    if market_eps < 0.5 and sigma < 1 / (8 * n):
        violations = len(property_report(perturbed, u, w, market_eps).violations)
    record = replace(
        base,
        market_eps=market_eps,
        nash_delta=delta,
        bound_delta=bound,
        prop_violations=violations,
    )
    return prof, record


def random_game(n: int, seed: int) -> BimatrixGame:
    """An ``n x n`` game with payoffs uniform on [1, 2], drawn from the seeded Philox stream."""
    gen = philox(seed)
    A = 1.0 + open_unit(gen, (n, n))
    B = 1.0 + open_unit(gen, (n, n))
    return BimatrixGame(A, B, (1.0, 2.0))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce a smoothed experiment.

    Either ``game`` is given or a random ``game_size`` game is drawn from
    ``game_seed``.  An empty ``sigmas`` list means the single schedule value
    ``eps_prime / n^3``.
    """

    sigmas: tuple = ()
    trials: int = 1
    eps_prime: float = 0.1
    master_seed: int = 0
    game: Optional[BimatrixGame] = None
    game_seed: Optional[int] = None
    game_size: int = 2
    resolution: int = 64
    eps_target: float = 0.01
    refine_iters: int = 20_000
    C: float = 10.0
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if any(s < 0 for s in self.sigmas):
            raise ValueError("sigmas must be nonnegative")
        if self.game is None and self.game_seed is None:
            object.__setattr__(self, "game_seed", self.master_seed)

    def resolved_game(self) -> BimatrixGame:
        return self.game if self.game is not None else random_game(self.game_size, self.game_seed)

    def resolved_sigmas(self) -> tuple:
        if self.sigmas:
            return tuple(float(s) for s in self.sigmas)
        return (sigma_schedule(self.eps_prime, self.resolved_game().n),)

    def solver(self) -> GridSolver:
        return GridSolver(self.resolution, self.eps_target, refine_iters=self.refine_iters)


def child_seed(master_seed: int, sigma_index: int, trial: int) -> int:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(sigma_index, trial))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _run_trial(task) -> TrialRecord:
    game, eps_prime, sigma, seed, solver, C, timing = task
    try:
        _, rec = approximate_nash_from_smoothed_leontief(
            game, eps_prime, solver, seed, sigma=sigma, C=C, timing=timing
        )
        return rec
    except PipelineFailure as exc:
        return exc.record


def run_experiment(config: ExperimentConfig) -> list:
    """One record per (sigma, trial), sorted by sigma index then trial index."""
    game = config.resolved_game()
    solver = config.solver()
    tasks = []
    for si, sigma in enumerate(config.resolved_sigmas()):
        for t in range(config.trials):
            seed = child_seed(config.master_seed, si, t)
            tasks.append((game, config.eps_prime, sigma, seed, solver, config.C, config.timing))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))))
    return [_run_trial(t) for t in tasks]


@dataclass
class SigmaSummary:
    sigma: float
    trials: int
    succeeded: int
    mean_delta: Optional[float]
    max_delta: Optional[float]
    mean_time_ms: Optional[float]
    max_time_ms: Optional[float]
    mean_points: float = field(default=0.0)


def summarize(records) -> list:
    """Per-sigma aggregates in order of first appearance."""
    groups = {}
    for r in records:
        groups.setdefault(r.sigma, []).append(r)
    out = []
    for sigma, rs in groups.items():
        ok = [r for r in rs if r.succeeded]
        deltas = [r.nash_delta for r in ok]
        times = [r.time_ms for r in rs if r.time_ms is not None]
        pts = [r.points_scanned for r in rs if r.points_scanned is not None]
        out.append(
            SigmaSummary(
                sigma=sigma,
                trials=len(rs),
                succeeded=len(ok),
                mean_delta=float(np.mean(deltas)) if deltas else None,
                max_delta=float(np.max(deltas)) if deltas else None,
                mean_time_ms=float(np.mean(times)) if times else None,
                max_time_ms=float(np.max(times)) if times else None,
                mean_points=float(np.mean(pts)) if pts else 0.0,
            )
        )
    return out


def fit_transfer_constant(records, n: int) -> float:
    """Smallest C with ``nash_delta <= transfer_bound(n, market_eps, sigma, C)`` on every successful record."""
    worst = 0.0
    for r in records:
        if not r.succeeded or r.nash_delta <= 0:
            continue
        unit = n * math.sqrt(max(r.market_eps, n * r.sigma)) + n * math.sqrt(n * r.sigma)
        if unit == 0:
            return math.inf
        worst = max(worst, r.nash_delta / unit)
    return worst


def seed_from_env(default: int = 0) -> int:
    raw = os.environ.get("LEONTIEF_SEED")
    return int(raw) if raw not in (None, "") else default


__all__ = [
    "PerturbationModel",
    "TrialRecord",
    "ExperimentConfig",
    "perturb_economy",
    "approximate_nash_from_smoothed_leontief",
    "run_experiment",
    "summarize",
    "records_to_csv",
    "records_from_csv",
    "fit_transfer_constant",
    "random_game",
    "child_seed",
]
