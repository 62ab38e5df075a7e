"""Desk-scale equilibrium finders for Leontief economies.

``grid_search_equilibrium`` sweeps every point of the ``1/k`` grid on the
price simplex in lexicographic order (integer compositions of ``k``,
ascending) and stops at the first point that is an eps-approximate
equilibrium.  ``refine_equilibrium`` nudges prices tatonnement-style.
"""

from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PreconditionViolated, Unbounded
from .games import DegenerateGameWarning, support_enumeration_nash
from .market import (
    LeontiefEconomy,
    MarketEquilibrium,
    check_eps_equilibrium,
    measured_eps,
    utilities_at_prices,
)
from .reduction import ReducedEconomy, nash_to_market

CHUNK = 1 << 15


class Status(str, enum.Enum):
    FOUND = "Found"
    NOT_FOUND = "NotFound"
    BUDGET_EXHAUSTED = "BudgetExhausted"


@dataclass(frozen=True)
class GridSpec:
    resolution: int
    eps_target: float = 0.0
    max_points: int = 10_000_000

    def __post_init__(self):
        if self.resolution < 1:
            raise ValueError("resolution must be at least 1")
        if self.max_points < 1:
            raise ValueError("max_points must be at least 1")
        if self.eps_target < 0:
            raise ValueError("eps_target must be nonnegative")


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Outcome of a solver run.

    On ``NotFound``/``BudgetExhausted`` the grid solver still reports the best
    point it saw in ``equilibrium`` (with its ``achieved_eps``), so callers can
    hand it to :func:`refine_equilibrium`.
    """

    status: Status
    equilibrium: Optional[MarketEquilibrium]
    points_scanned: int
    achieved_eps: Optional[float]

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND

    def __eq__(self, other):
        if not isinstance(other, SolveResult):
            return NotImplemented
        return (
            self.status == other.status
            and self.equilibrium == other.equilibrium
            and self.points_scanned == other.points_scanned
            and self.achieved_eps == other.achieved_eps
        )

    __hash__ = None

    def to_dict(self) -> dict:
        from .jsonio import encode_number, equilibrium_to_dict

        return {
            "status": self.status.value,
            "equilibrium": None if self.equilibrium is None else equilibrium_to_dict(self.equilibrium),
            "points_scanned": self.points_scanned,
            "achieved_eps": None if self.achieved_eps is None else encode_number(self.achieved_eps),
        }


def grid_size(k: int, m: int) -> int:
    from math import comb

    return comb(k + m - 1, m - 1)


def simplex_grid(k: int, m: int, chunk: int = CHUNK):
    """Yield integer compositions of ``k`` into ``m`` parts, lexicographically ascending, in blocks."""
    if m == 1:
        yield np.array([[k]], dtype=np.int64)
        return
    bars = itertools.combinations(range(k + m - 1), m - 1)
    top = k + m - 1
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(bars, chunk)), dtype=np.int64
        )
        if flat.size == 0:
            return
        C = flat.reshape(-1, m - 1)
        edges = np.hstack([np.full((len(C), 1), -1), C, np.full((len(C), 1), top)])
        yield np.diff(edges, axis=1) - 1


def _grid_eps(econ: LeontiefEconomy, W: np.ndarray):
    """Market eps of ``(u(W), W)`` for each row of ``W``; ``nan`` where some trader is unbounded."""
    E = np.asarray(econ.E, dtype=float)
    D = np.asarray(econ.D, dtype=float)
    budgets = W @ E
    costs = W @ D
    unbounded = ((budgets > 0) & (costs <= 0)).any(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        U = np.where(budgets > 0, budgets / np.where(costs > 0, costs, 1.0), 0.0)
        supply = E.sum(axis=1)
        demand = U @ D.T
        ratio = np.where(supply > 0, demand / np.where(supply > 0, supply, 1.0) - 1.0,
                         np.where(demand > 0, np.inf, -1.0))
    eps = np.maximum(ratio.max(axis=1), 0.0)
    eps[unbounded] = np.nan
    return eps, U


def grid_search_equilibrium(econ: LeontiefEconomy, spec: GridSpec) -> SolveResult:
    econ = econ.as_float() if econ.exact else econ
    k, m = spec.resolution, econ.m
    scanned = 0
    best = None
    for block in simplex_grid(k, m):
        room = spec.max_points - scanned
        if room <= 0:
            break
        block = block[:room]
        W = block / k
        eps, U = _grid_eps(econ, W)
        ok = np.flatnonzero(eps <= spec.eps_target)
        if ok.size:
            i = ok[0]
            scanned += int(i) + 1
            u, w = U[i], W[i]
            achieved = float(eps[i])
            if check_eps_equilibrium(econ, u, w, achieved).passed:
                return SolveResult(Status.FOUND, MarketEquilibrium(u, w), scanned, achieved)
            raise AssertionError("grid point failed re-verification")  # pragma: no cover
        finite = np.where(np.isnan(eps), np.inf, eps)
        i = int(np.argmin(finite))
        if np.isfinite(finite[i]) and (best is None or finite[i] < best[0]):
            best = (float(finite[i]), U[i], W[i])
        scanned += len(block)
    total = grid_size(k, m)
    status = Status.NOT_FOUND if scanned >= total else Status.BUDGET_EXHAUSTED
    if best is None:
        return SolveResult(status, None, scanned, None)
    return SolveResult(status, MarketEquilibrium(best[1], best[2]), scanned, best[0])


def _safe_eps(econ, u, w) -> float:
    try:
        return float(measured_eps(econ, u, w))
    except Unbounded:
        return float("inf")


def refine_equilibrium(
    econ: LeontiefEconomy,
    u,
    w,
    eps_target: float,
    max_iters: int = 10_000,
    step: Optional[float] = None,
) -> SolveResult:
    """Multiplicative price adjustment toward an eps_target-equilibrium.

    Each iteration raises the price of every over-demanded good by a factor
    ``1 + step`` (default ``eps_target / 4``), renormalizes, and resets
    utilities to the traders' optima.  The best point seen is returned, so
    the result is never worse than the input.
    """
    econ = econ.as_float() if econ.exact else econ
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    w = w / w.sum()
    eta = eps_target / 4 if step is None else step
    start = _safe_eps(econ, u, w)
    best = (start, u, w)
    if start <= eps_target:
        return SolveResult(Status.FOUND, MarketEquilibrium(u, w), 0, start)

    D = np.asarray(econ.D, dtype=float)
    supply = np.asarray(econ.supply, dtype=float)
    cur_w = w
    try:
        cur_u = np.asarray(utilities_at_prices(econ, cur_w), dtype=float)
    except Unbounded:
        cur_u = u
    iters = 0
    for iters in range(1, max_iters + 1):
        excess = D @ cur_u - supply
        cur_w = np.where(excess > 0, cur_w * (1 + eta), cur_w)
        cur_w = cur_w / cur_w.sum()
        try:
            cur_u = np.asarray(utilities_at_prices(econ, cur_w), dtype=float)
        except Unbounded:
            break
        e = _safe_eps(econ, cur_u, cur_w)
        if e < best[0]:
            best = (e, cur_u, cur_w)
        if e <= eps_target:
            if check_eps_equilibrium(econ, cur_u, cur_w, e).passed:
                return SolveResult(Status.FOUND, MarketEquilibrium(cur_u, cur_w), iters, e)
    status = Status.BUDGET_EXHAUSTED if iters >= max_iters else Status.NOT_FOUND
    return SolveResult(status, MarketEquilibrium(best[1], best[2]), iters, best[0])


def solve_reduced_exact(reduced: ReducedEconomy) -> MarketEquilibrium:
    """Solve an unperturbed reduced economy through its game."""
    if reduced.sigma != 0:
        raise PreconditionViolated("exact path needs an unperturbed reduced economy")
    game = reduced.game()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateGameWarning)
        eqs = support_enumeration_nash(game)
    return nash_to_market(game, eqs[0])


@dataclass(frozen=True)
class GridSolver:
    """Grid sweep followed, if needed, by tatonnement refinement of the best grid point."""

    resolution: int = 64
    eps_target: float = 0.01
    max_points: int = 10_000_000
    refine_iters: int = 20_000

    def __call__(self, reduced: ReducedEconomy) -> SolveResult:
        econ = reduced.econ
        res = grid_search_equilibrium(econ, GridSpec(self.resolution, self.eps_target, self.max_points))
        if res.found or res.equilibrium is None or self.refine_iters <= 0:
            return res
        eq = res.equilibrium
        ref = refine_equilibrium(econ, eq.u, eq.w, self.eps_target, self.refine_iters)
        return SolveResult(ref.status, ref.equilibrium, res.points_scanned + ref.points_scanned, ref.achieved_eps)


@dataclass(frozen=True)
class ExactSolver:
    """Support-enumeration route for unperturbed reduced economies."""

    def __call__(self, reduced: ReducedEconomy) -> SolveResult:
        eq = solve_reduced_exact(reduced)
        return SolveResult(Status.FOUND, eq, 0, float(measured_eps(reduced.econ.as_float(), eq.u, eq.w)))
