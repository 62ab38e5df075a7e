"""Game-to-market reduction, strategy recovery and the symmetry/upper-bound reports.

A square game ``(A, B)`` with payoffs in ``[1, 2]`` becomes a Leontief
economy with ``2n`` goods and ``2n`` traders, identity endowments and demand

    D = [[0,   A],
         [B^T, 0]]

Traders ``0..n-1`` play the row player's role and only want goods
``n..2n-1``; traders ``n..2n-1`` play the column player and only want goods
``0..n-1``.  The lower-left block holds ``B^T`` so that the clearing rows of
the second half, ``B^T x <= 1``, are the column player's payoffs ``x^T B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    ConstructionFailed,
    DimensionMismatch,
    PreconditionViolated,
    RangeViolation,
    ZeroUtilityBlock,
)
from .games import BimatrixGame, MixedProfile, check_eps_nash
from .market import LeontiefEconomy, MarketEquilibrium, check_equilibrium
from .numeric import as_array, scalar

NASH_INPUT_TOL = 1e-9
EQUILIBRIUM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ReducedEconomy:
    """An economy produced by the reduction, possibly perturbed afterwards."""

    econ: LeontiefEconomy
    game_size: int
    sigma: float = 0.0

    def __post_init__(self):
        n = self.game_size
        if self.econ.m != 2 * n or self.econ.n != 2 * n:
            raise DimensionMismatch(f"a reduced economy of game size {n} needs a {2 * n}x{2 * n} economy")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.sigma == 0:
            eye = np.eye(2 * n)
            if not np.all(self.econ.E == eye):
                raise ValueError("an unperturbed reduced economy has identity endowments")
            Z, _, _, N = self.blocks
            if np.any(Z != 0) or np.any(N != 0):
                raise ValueError("an unperturbed reduced economy has zero diagonal demand blocks")

    @property
    def blocks(self) -> tuple:
        return split_blocks(self.econ, self.game_size)

    @property
    def Z(self):
        return self.blocks[0]

    @property
    def A(self):
        return self.blocks[1]

    @property
    def B(self):
        return self.blocks[2]

    @property
    def N(self):
        return self.blocks[3]

    def block_ranges_ok(self) -> bool:
        """Entry ranges a uniform perturbation of magnitude sigma must respect."""
        s = self.sigma
        Z, _, _, N = self.blocks
        E = np.asarray(self.econ.E, dtype=float)
        diag = np.diag(E)
        off = E[~np.eye(E.shape[0], dtype=bool)]
        return bool(
            np.all((Z >= 0) & (Z <= s))
            and np.all((N >= 0) & (N <= s))
            and np.all((off >= 0) & (off <= s))
            and np.all((diag >= 1 - s) & (diag <= 1 + s))
        )

    def game(self) -> BimatrixGame:
        """The game encoded by the off-diagonal demand blocks."""
        _, A, Bt, _ = self.blocks
        return BimatrixGame(A.copy(), Bt.T.copy())


def reduce_game_to_economy(game: BimatrixGame) -> ReducedEconomy:
    if game.m != game.n:
        raise DimensionMismatch("the reduction needs a square game")
    for M in (game.A, game.B):
        if np.any(M < 1) or np.any(M > 2):
            raise RangeViolation("payoffs must lie in [1, 2]; normalize the game first")
    n = game.n
    exact = game.exact
    zero = as_array(np.zeros((n, n), dtype=int), exact)
    D = np.block([[zero, game.A], [game.B.T, zero]])
    E = as_array(np.eye(2 * n, dtype=int), exact)
    if exact:
        D = as_array(D, True)
    return ReducedEconomy(LeontiefEconomy(E, D, normalized_supply=True), n, 0.0)


def split_blocks(econ: LeontiefEconomy, game_size: int) -> tuple:
    """The four ``n x n`` views ``(Z, A, B, N)`` of the demand matrix."""
    n = game_size
    if econ.m != 2 * n or econ.n != 2 * n:
        raise DimensionMismatch(f"expected a {2 * n}x{2 * n} economy, got {econ.m}x{econ.n}")
    D = econ.D
    return D[:n, :n], D[:n, n:], D[n:, :n], D[n:, n:]


def recover_strategies(u, game_size: int) -> MixedProfile:
    exact = isinstance(u, np.ndarray) and u.dtype == object
    u = as_array(u, exact)
    n = game_size
    if u.shape != (2 * n,):
        raise DimensionMismatch(f"utility vector of length {u.shape} for game size {n}")
    x, y = u[:n], u[n:]
    sx, sy = x.sum(), y.sum()
    if sx <= 0 or sy <= 0:
        raise ZeroUtilityBlock("a utility half is identically zero; no strategy to recover")
    return MixedProfile(x / sx, y / sy)


def _stationary(M: np.ndarray) -> np.ndarray:
    """A nonnegative unit-sum fixed point of ``M`` (column-stochastic on its support)."""
    k = M.shape[0]
    K = M - np.eye(k)
    _, sv, vt = np.linalg.svd(K)
    null = vt[np.sum(sv > 1e-11 * max(1.0, sv.max(initial=0))):].T
    if null.shape[1] == 0:
        raise ConstructionFailed("price fixed-point system has no nonzero solution")
    if null.shape[1] == 1:
        v = null[:, 0]
        v = v if v.sum() > 0 else -v
        if v.min() >= -1e-12 * np.abs(v).max():
            v = np.clip(v, 0, None)
            return v / v.sum()
    # several fixed points (reducible chain): pick a nonnegative one by LP
    r = null.shape[1]
    res = linprog(
        np.zeros(r),
        A_ub=-null,
        b_ub=np.zeros(k),
        A_eq=null.sum(axis=0)[None, :],
        b_eq=[1.0],
        bounds=[(None, None)] * r,
        method="highs",
    )
    if not res.success:
        raise ConstructionFailed("no nonnegative price fixed point on the equilibrium supports")
    v = np.clip(null @ res.x, 0, None)
    return v / v.sum()


def nash_to_market(game: BimatrixGame, profile: MixedProfile) -> MarketEquilibrium:
    """Map a Nash equilibrium of ``game`` to an exact equilibrium of its reduced economy.

    Utilities are the strategies rescaled so the binding clearing rows equal
    one; prices solve ``p = diag(x') B q``, ``q = diag(y') A^T p`` on the
    supports.  The result is re-verified before it is returned.
    """
    if not check_eps_nash(game, profile, NASH_INPUT_TOL).passed:
        raise PreconditionViolated("profile is not a Nash equilibrium of the game")
    reduced = reduce_game_to_economy(game)
    n = game.n
    A = np.asarray(game.A, dtype=float)
    B = np.asarray(game.B, dtype=float)
    xs = np.asarray(profile.x, dtype=float)
    ys = np.asarray(profile.y, dtype=float)
    x = xs / (xs @ B).max()
    y = ys / (A @ ys).max()

    M = np.zeros((2 * n, 2 * n))
    M[:n, n:] = x[:, None] * B
    M[n:, :n] = y[:, None] * A.T
    support = np.flatnonzero(np.concatenate([x, y]) > 0)
    w = np.zeros(2 * n)
    w[support] = _stationary(M[np.ix_(support, support)])
    u = np.concatenate([x, y])

    if not check_equilibrium(reduced.econ.as_float(), u, w, EQUILIBRIUM_TOL).passed:
        raise ConstructionFailed("constructed prices do not form a market equilibrium")
    return MarketEquilibrium(u, w)


def transfer_bound(n: int, eps, sigma, C: float = 10.0) -> float:
    """Relative-Nash guarantee ``min(1, C (n sqrt(lambda) + n sqrt(n sigma)))``, ``lambda = max(eps, n sigma)``."""
    eps, sigma = float(eps), float(sigma)
    lam = max(eps, n * sigma)
    return min(1.0, C * (n * math.sqrt(lam) + n * math.sqrt(n * sigma)))


@dataclass
class PropertyReport:
    """Numeric check of the price-symmetry, utility-symmetry and upper-bound properties."""

    eps: float
    sigma: float
    n: int
    lam: float
    price_norms: tuple
    price_interval: tuple
    utility_norms: tuple
    utility_interval: tuple
    s: np.ndarray
    t: np.ndarray
    threshold: float
    utility_cap: float
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        from .jsonio import encode_number

        enc = lambda seq: [encode_number(v) for v in seq]  # noqa: E731
        return {
            "eps": encode_number(self.eps),
            "sigma": encode_number(self.sigma),
            "n": self.n,
            "lambda": encode_number(self.lam),
            "price_norms": enc(self.price_norms),
            "price_interval": enc(self.price_interval),
            "utility_norms": enc(self.utility_norms),
            "utility_interval": enc(self.utility_interval),
            "s": enc(self.s),
            "t": enc(self.t),
            "threshold": encode_number(self.threshold),
            "utility_cap": encode_number(self.utility_cap),
            "violations": list(self.violations),
        }


def property_report(reduced: ReducedEconomy, u, w, eps, tol: float = 1e-9) -> PropertyReport:
    """Evaluate the three structural properties of an eps-approximate equilibrium.

    Requires ``sum(w) == 1``, ``0 <= eps < 1/2`` and ``0 <= sigma < 1/(8n)``.
    When ``lambda = max(eps, n sigma)`` is zero the upper-bound trigger is
    applied strictly (``s_i < 1``), the limit of the bound's derivation.
    """
    n = reduced.game_size
    eps = float(eps)
    sigma = float(reduced.sigma)
    if not 0 <= eps < 0.5:
        raise PreconditionViolated(f"eps = {eps} outside [0, 1/2)")
    if not 0 <= sigma < 1 / (8 * n):
        raise PreconditionViolated(f"sigma = {sigma} outside [0, 1/(8n))")
    u = np.asarray(as_array(u), dtype=float)
    w = np.asarray(as_array(w), dtype=float)
    if u.shape != (2 * n,) or w.shape != (2 * n,):
        raise DimensionMismatch("u and w must have length 2n")
    if abs(w.sum() - 1) > 1e-9:
        raise PreconditionViolated("prices must be normalized to unit 1-norm")

    Z, A, B, N = (np.asarray(blk, dtype=float) for blk in reduced.blocks)
    x, y = u[:n], u[n:]
    p, q = w[:n], w[n:]
    s = Z @ x + A @ y
    t = B @ x + N @ y
    lam = max(eps, n * sigma)
    g = 2 - 4 * n * sigma
    h = 1 - eps - 4 * n * sigma

    violations = []
    price_iv = (h / g, (1 + eps) / g)
    price_norms = (float(p.sum()), float(q.sum()))
    for name, val in zip(("p", "q"), price_norms):
        if not price_iv[0] - tol <= val <= price_iv[1] + tol:
            violations.append(f"price symmetry: |{name}|_1 = {val!r} outside {price_iv}")

    util_iv = (
        (1 - eps) * (1 - sigma) * h / ((1 + eps) * (2 + 2 * sigma)),
        ((1 + eps) ** 2 + n * sigma * (1 + eps) * g) / ((1 - sigma) * h),
    )
    utility_norms = (float(x.sum()), float(y.sum()))
    for name, val in zip(("x", "y"), utility_norms):
        if not util_iv[0] - tol <= val <= util_iv[1] + tol:
            violations.append(f"utility symmetry: |{name}|_1 = {val!r} outside {util_iv}")

    root = math.sqrt(lam)
    threshold = (1 + eps) * (1 - sigma) - root
    cap = (1 + eps) * g * (5 * root + sigma) / ((1 - sigma) * h)
    for name, load, util in (("x", s, x), ("y", t, y)):
        for i in range(n):
            triggered = load[i] < threshold - tol if lam == 0 else load[i] <= threshold
            if triggered and util[i] > cap + tol:
                violations.append(
                    f"utility upper bound: {name}[{i}] = {util[i]!r} > {cap!r} with load {load[i]!r}"
                )

    return PropertyReport(
        eps=eps,
        sigma=sigma,
        n=n,
        lam=lam,
        price_norms=price_norms,
        price_interval=price_iv,
        utility_norms=utility_norms,
        utility_interval=util_iv,
        s=s,
        t=t,
        threshold=threshold,
        utility_cap=cap,
        violations=violations,
    )


def reduced_from_parts(E, D, game_size: int, sigma=0.0, exact: bool = False) -> ReducedEconomy:
    econ = LeontiefEconomy(as_array(E, exact), as_array(D, exact))
    return ReducedEconomy(econ, game_size, float(scalar(sigma, False)))
