"""Leontief exchange economies and market-equilibrium verifiers.

Traders are columns: trader ``j`` owns ``E[:, j]`` and has Leontief utility
``min_i x_i / D[i, j]`` over the goods it actually demands.  At prices ``w``
the best it can do is ``<E[:, j], w> / <D[:, j], w>`` (0 for a zero budget).

Verifiers accept float arrays or object arrays of ``Fraction``; the economy's
mode wins.  Slacks are relative, ``(rhs - lhs) / max(1, |rhs|)``, so reports
do not depend on the price scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, Unbounded, ZeroPrices
from .numeric import DEFAULT_RTOL, as_array, is_finite, scalar
from .report import CheckReport, worst

SUPPLY_ROW_TOL = 1e-12
STRICT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LeontiefEconomy:
    """Endowments ``E`` and demand coefficients ``D``, both goods x traders."""

    E: np.ndarray
    D: np.ndarray
    normalized_supply: bool = False

    def __post_init__(self):
        exact = isinstance(self.E, np.ndarray) and self.E.dtype == object
        exact = exact or (isinstance(self.D, np.ndarray) and self.D.dtype == object)
        E = as_array(self.E, exact)
        D = as_array(self.D, exact)
        if E.ndim != 2 or E.shape != D.shape:
            raise DimensionMismatch(f"E {E.shape} and D {D.shape} must be equal m x n matrices")
        if not (is_finite(E) and is_finite(D)):
            raise ValueError("economy entries must be finite")
        if np.any(E < 0) or np.any(D < 0):
            raise ValueError("economy entries must be nonnegative")
        empty = [j for j in range(D.shape[1]) if not np.any(D[:, j] > 0)]
        if empty:
            raise ValueError(f"traders {empty} demand nothing; utility undefined")
        if self.normalized_supply:
            rows = E.sum(axis=1)
            bad = [i for i, r in enumerate(rows) if abs(float(r) - 1.0) > SUPPLY_ROW_TOL]
            if bad:
                raise ValueError(f"rows {bad} of E do not sum to 1")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "D", D)

    @property
    def m(self) -> int:
        return self.E.shape[0]

    @property
    def n(self) -> int:
        return self.E.shape[1]

    @property
    def exact(self) -> bool:
        return self.E.dtype == object

    @property
    def supply(self) -> np.ndarray:
        """Total stock of each good, ``E @ 1``."""
        return self.E.sum(axis=1)

    def as_exact(self) -> "LeontiefEconomy":
        return LeontiefEconomy(as_array(self.E, True), as_array(self.D, True), self.normalized_supply)

    def as_float(self) -> "LeontiefEconomy":
        return LeontiefEconomy(as_array(self.E), as_array(self.D), self.normalized_supply)

    def __eq__(self, other):
        if not isinstance(other, LeontiefEconomy):
            return NotImplemented
        return (
            self.E.shape == other.E.shape
            and bool(np.all(self.E == other.E))
            and bool(np.all(self.D == other.D))
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class PriceVector:
    """Nonnegative, not-all-zero prices; ``normalized`` marks ``sum(w) == 1``."""

    w: np.ndarray
    normalized: bool = False

    def __array__(self, dtype=None, copy=None):
        return self.w if dtype is None else self.w.astype(dtype)

    def __len__(self):
        return len(self.w)


@dataclass(frozen=True, eq=False)
class MarketEquilibrium:
    """A utility vector ``u`` and prices ``w`` in (utility, price) form."""

    u: np.ndarray
    w: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, MarketEquilibrium):
            return NotImplemented
        return (
            self.u.shape == other.u.shape
            and self.w.shape == other.w.shape
            and bool(np.all(self.u == other.u))
            and bool(np.all(self.w == other.w))
        )

    __hash__ = None


def _vec(econ: LeontiefEconomy, values, length: int, what: str) -> np.ndarray:
    if isinstance(values, PriceVector):
        values = values.w
    arr = as_array(values, econ.exact)
    if arr.shape != (length,):
        raise DimensionMismatch(f"{what} has shape {arr.shape}, expected ({length},)")
    return arr


def _prices(econ: LeontiefEconomy, w) -> np.ndarray:
    w = _vec(econ, w, econ.m, "price vector")
    if np.any(w < 0):
        raise ValueError("prices must be nonnegative")
    if not np.any(w > 0):
        raise ZeroPrices("all prices are zero")
    return w


def _rel(rhs, lhs):
    return (rhs - lhs) / max(1, abs(rhs))


def _tol(econ: LeontiefEconomy, tol):
    if tol is None:
        return 0 if econ.exact else DEFAULT_RTOL
    return scalar(tol, econ.exact)


def normalize_prices(w) -> PriceVector:
    """Scale prices onto the unit simplex."""
    if isinstance(w, PriceVector):
        w = w.w
    exact = isinstance(w, np.ndarray) and w.dtype == object
    w = as_array(w, exact)
    if np.any(w < 0):
        raise ValueError("prices must be nonnegative")
    total = w.sum()
    if total == 0:
        raise ZeroPrices("cannot normalize an all-zero price vector")
    return PriceVector(w / total, normalized=True)


def leontief_utility(econ: LeontiefEconomy, j: int, bundle) -> object:
    bundle = _vec(econ, bundle, econ.m, "bundle")
    d = econ.D[:, j]
    return min(bundle[i] / d[i] for i in range(econ.m) if d[i] > 0)


def trader_utility_max(econ: LeontiefEconomy, w, j: int):
    """Best utility trader ``j`` can afford at prices ``w``.

    Raises :class:`Unbounded` if the budget is positive but the trader's
    demanded goods are all free.
    """
    w = _prices(econ, w)
    budget = econ.E[:, j] @ w
    if budget == 0:
        return budget * 0
    cost = econ.D[:, j] @ w
    if cost == 0:
        raise Unbounded(f"trader {j} has budget {budget} but its demanded goods are free")
    return budget / cost


def utilities_at_prices(econ: LeontiefEconomy, w) -> np.ndarray:
    """Vector of ``trader_utility_max`` over all traders."""
    w = _prices(econ, w)
    out = np.empty(econ.n, dtype=object if econ.exact else float)
    for j in range(econ.n):
        out[j] = trader_utility_max(econ, w, j)
    return out


def optimal_bundle(econ: LeontiefEconomy, w, j: int) -> np.ndarray:
    return econ.D[:, j] * trader_utility_max(econ, w, j)


def check_equilibrium(econ: LeontiefEconomy, u, w, tol=None) -> CheckReport:
    """Verify ``w >= 0``, ``u_j = <e_j,w>/<d_j,w>`` and ``D u <= E 1``.

    ``tol`` bounds how negative a relative slack may be; it defaults to 1e-9
    in float mode and 0 in exact mode.  Traders with an unbounded optimum
    fail the budget condition with slack ``-inf``.
    """
    tol = _tol(econ, tol)
    u = _vec(econ, u, econ.n, "utility vector")
    w = _vec(econ, w, econ.m, "price vector")
    total = w.sum()
    if total == 0:
        raise ZeroPrices("all prices are zero")
    nonneg = worst("prices_nonnegative", [wi / total for wi in w], tol)

    budget_slacks = []
    for j in range(econ.n):
        try:
            r = trader_utility_max(econ, w, j) if nonneg.satisfied else None
        except Unbounded:
            r = None
        if r is None:
            budget_slacks.append(float("-inf"))
        else:
            budget_slacks.append(-abs(u[j] - r) / max(1, abs(r)))
    budget = worst("budget_equality", budget_slacks, tol)

    demand = econ.D @ u
    supply = econ.supply
    clearing = worst("supply", [_rel(supply[i], demand[i]) for i in range(econ.m)], tol)
    return CheckReport((nonneg, budget, clearing))


def check_eps_equilibrium(econ: LeontiefEconomy, u, w, eps, tol=None) -> CheckReport:
    """The three-condition epsilon-approximate market equilibrium test.

    * ``u_j >= (1 - eps) * opt_j``  (traders approximately satisfied)
    * ``u_j <= (1 + eps) * opt_j``  (budgets approximately respected)
    * ``D u <= (1 + eps) * supply``
    """
    exact = econ.exact
    eps = scalar(eps, exact)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    tol = _tol(econ, tol)
    u = _vec(econ, u, econ.n, "utility vector")
    r = utilities_at_prices(econ, w)
    lo, hi = 1 - eps, 1 + eps
    lower = worst(
        "traders_satisfied",
        [(u[j] - lo * r[j]) / max(1, abs(lo * r[j])) for j in range(econ.n)],
        tol,
    )
    upper = worst("budget_upper", [_rel(hi * r[j], u[j]) for j in range(econ.n)], tol)
    demand = econ.D @ u
    supply = econ.supply
    clearing = worst("supply", [_rel(hi * supply[i], demand[i]) for i in range(econ.m)], tol)
    return CheckReport((lower, upper, clearing))


def measured_eps(econ: LeontiefEconomy, u, w) -> object:
    """Smallest eps at which ``check_eps_equilibrium`` passes with zero tolerance.

    Returns ``inf`` when no eps works (a positive utility for a zero budget).
    """
    u = _vec(econ, u, econ.n, "utility vector")
    r = utilities_at_prices(econ, w)
    eps = 0 * u[0] if econ.n else 0
    for j in range(econ.n):
        if r[j] == 0:
            if u[j] > 0:
                return float("inf")
            continue
        eps = max(eps, abs(u[j] / r[j] - 1))
    demand = econ.D @ u
    supply = econ.supply
    for i in range(econ.m):
        if supply[i] == 0:
            if demand[i] > 0:
                return float("inf")
            continue
        eps = max(eps, demand[i] / supply[i] - 1)
    return eps


def _allocation(econ: LeontiefEconomy, X) -> np.ndarray:
    X = as_array(X, econ.exact)
    if X.shape != (econ.m, econ.n):
        raise DimensionMismatch(f"allocation has shape {X.shape}, expected {(econ.m, econ.n)}")
    if np.any(X < 0):
        raise ValueError("allocations must be nonnegative")
    return X


def check_allocation_eps_equilibrium(econ: LeontiefEconomy, X, w, eps, tol=None) -> CheckReport:
    """Bundle-based test: each column of ``X`` is eps-optimal and the total fits (1+eps) supply."""
    exact = econ.exact
    eps = scalar(eps, exact)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    tol = _tol(econ, tol)
    X = _allocation(econ, X)
    w = _prices(econ, w)
    opt = utilities_at_prices(econ, w)
    budgets = w @ econ.E
    spent = w @ X
    hi, lo = 1 + eps, 1 - eps
    budget = worst("budget", [_rel(hi * budgets[j], spent[j]) for j in range(econ.n)], tol)
    util = [leontief_utility(econ, j, X[:, j]) for j in range(econ.n)]
    optimal = worst(
        "utility",
        [(util[j] - lo * opt[j]) / max(1, abs(lo * opt[j])) for j in range(econ.n)],
        tol,
    )
    totals = X.sum(axis=1)
    supply = econ.supply
    clearing = worst("supply", [_rel(hi * supply[i], totals[i]) for i in range(econ.m)], tol)
    return CheckReport((budget, optimal, clearing))


def check_strict_eps_equilibrium(econ: LeontiefEconomy, X, w, eps, tol=None) -> CheckReport:
    """Exact budgets and exact supply; only utility optimality is relaxed."""
    exact = econ.exact
    eps = scalar(eps, exact)
    if not 0 <= eps < 1:
        raise ValueError("eps must lie in [0, 1)")
    tol = _tol(econ, tol)
    hard_tol = 0 if exact else STRICT_TOL
    X = _allocation(econ, X)
    w = _prices(econ, w)
    opt = utilities_at_prices(econ, w)
    budgets = w @ econ.E
    spent = w @ X
    budget = worst("budget", [_rel(budgets[j], spent[j]) for j in range(econ.n)], hard_tol)
    util = [leontief_utility(econ, j, X[:, j]) for j in range(econ.n)]
    lo = 1 - eps
    optimal = worst(
        "utility",
        [(util[j] - lo * opt[j]) / max(1, abs(lo * opt[j])) for j in range(econ.n)],
        tol,
    )
    totals = X.sum(axis=1)
    supply = econ.supply
    clearing = worst("supply", [_rel(supply[i], totals[i]) for i in range(econ.m)], hard_tol)
    return CheckReport((budget, optimal, clearing))


def strict_from_loose(X, eps) -> np.ndarray:
    """Turn an (eps/2)-approximate allocation into an eps-strict one.

    Scaling every bundle by ``1 - eps/2`` pulls budgets and supply back
    under their exact limits while losing at most a ``1 - eps`` factor of
    utility: ``(1 + e/2)(1 - e/2) <= 1`` and ``(1 - e/2)**2 >= 1 - e``.
    """
    exact = isinstance(X, np.ndarray) and X.dtype == object
    X = as_array(X, exact)
    eps = scalar(eps, exact)
    return X * (1 - eps / 2)


def equilibrium_allocation(econ: LeontiefEconomy, w) -> np.ndarray:
    """Matrix whose column ``j`` is trader ``j``'s optimal bundle."""
    w = _prices(econ, w)
    return np.column_stack([optimal_bundle(econ, w, j) for j in range(econ.n)])


def economy(E, D, exact: bool = False, normalized_supply: bool = False) -> LeontiefEconomy:
    """Convenience constructor from nested lists."""
    return LeontiefEconomy(as_array(E, exact), as_array(D, exact), normalized_supply)


__all__ = [
    "LeontiefEconomy",
    "PriceVector",
    "MarketEquilibrium",
    "normalize_prices",
    "leontief_utility",
    "trader_utility_max",
    "utilities_at_prices",
    "optimal_bundle",
    "check_equilibrium",
    "check_eps_equilibrium",
    "measured_eps",
    "check_allocation_eps_equilibrium",
    "check_strict_eps_equilibrium",
    "strict_from_loose",
    "equilibrium_allocation",
    "economy",
]
