"""Bimatrix games, approximate-Nash verifiers and small exact solvers.

The row player receives ``x^T A y`` and the column player ``x^T B y``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import CycleDetected, DimensionMismatch, IllPosed, TooLarge
from .numeric import DEFAULT_RTOL, as_array, is_finite, scalar
from .report import CheckReport, Condition

SIMPLEX_TOL = 1e-12
MAX_ENUMERATION_SIZE = 6


class DegenerateGameWarning(UserWarning):
    """An indifference system was singular during support enumeration."""


@dataclass(frozen=True, eq=False)
class BimatrixGame:
    A: np.ndarray
    B: np.ndarray
    range_tag: Optional[tuple] = None

    def __post_init__(self):
        exact = any(isinstance(M, np.ndarray) and M.dtype == object for M in (self.A, self.B))
        A = as_array(self.A, exact)
        B = as_array(self.B, exact)
        if A.ndim != 2 or A.shape != B.shape:
            raise DimensionMismatch(f"payoff matrices {A.shape} and {B.shape} differ")
        if not (is_finite(A) and is_finite(B)):
            raise ValueError("payoffs must be finite")
        if self.range_tag is not None:
            lo, hi = (scalar(v, exact) for v in self.range_tag)
            for M in (A, B):
                if M.size and (M.min() < lo or M.max() > hi):
                    raise ValueError(f"payoffs leave the declared range [{lo}, {hi}]")
            object.__setattr__(self, "range_tag", (lo, hi))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def exact(self) -> bool:
        return self.A.dtype == object

    def as_exact(self) -> "BimatrixGame":
        return BimatrixGame(as_array(self.A, True), as_array(self.B, True), self.range_tag)

    def shifted(self, c) -> "BimatrixGame":
        return BimatrixGame(self.A + c, self.B + c)

    def scaled(self, c) -> "BimatrixGame":
        return BimatrixGame(self.A * c, self.B * c)


@dataclass(frozen=True, eq=False)
class MixedProfile:
    """A pair of mixed strategies on the probability simplices."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        exact = any(isinstance(v, np.ndarray) and v.dtype == object for v in (self.x, self.y))
        x = as_array(self.x, exact)
        y = as_array(self.y, exact)
        for name, v in (("x", x), ("y", y)):
            if v.ndim != 1 or v.size == 0:
                raise DimensionMismatch(f"{name} must be a nonempty vector")
            if np.any(v < 0):
                raise ValueError(f"{name} has negative entries")
            if abs(float(v.sum()) - 1.0) > SIMPLEX_TOL * max(1, v.size):
                raise ValueError(f"{name} does not sum to 1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def distance(self, other: "MixedProfile") -> float:
        """1-norm distance over the concatenated strategies."""
        return float(
            np.abs(np.asarray(self.x, float) - np.asarray(other.x, float)).sum()
            + np.abs(np.asarray(self.y, float) - np.asarray(other.y, float)).sum()
        )

    def __eq__(self, other):
        if not isinstance(other, MixedProfile):
            return NotImplemented
        return (
            self.x.shape == other.x.shape
            and self.y.shape == other.y.shape
            and bool(np.all(self.x == other.x))
            and bool(np.all(self.y == other.y))
        )

    __hash__ = None


def pure(k: int, size: int) -> np.ndarray:
    v = np.zeros(size)
    v[k] = 1.0
    return v


def uniform(size: int) -> np.ndarray:
    return np.full(size, 1.0 / size)


def _profile_for(game: BimatrixGame, profile: MixedProfile):
    x = as_array(profile.x, game.exact)
    y = as_array(profile.y, game.exact)
    if x.shape != (game.m,) or y.shape != (game.n,):
        raise DimensionMismatch(
            f"profile shapes {x.shape}, {y.shape} do not fit a {game.m}x{game.n} game"
        )
    return x, y


def payoffs(game: BimatrixGame, profile: MixedProfile) -> tuple:
    x, y = _profile_for(game, profile)
    return x @ game.A @ y, x @ game.B @ y


def best_response_values(game: BimatrixGame, profile: MixedProfile) -> tuple:
    """``(max_i (A y)_i, max_j (x^T B)_j)``; pure strategies attain both maxima."""
    x, y = _profile_for(game, profile)
    return max(game.A @ y), max(x @ game.B)


def _tol(game: BimatrixGame, tol):
    if tol is None:
        return 0 if game.exact else DEFAULT_RTOL
    return scalar(tol, game.exact)


def check_eps_nash(game: BimatrixGame, profile: MixedProfile, eps, tol=None) -> CheckReport:
    """Additive test: each player's payoff is within ``eps`` of a best response.

    Slacks are absolute (``payoff - best + eps``), so they are unchanged when
    a constant is added to both payoff matrices.
    """
    eps = scalar(eps, game.exact)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    tol = _tol(game, tol)
    row, col = payoffs(game, profile)
    row_best, col_best = best_response_values(game, profile)
    conds = []
    for name, val, best in (("row", row, row_best), ("column", col, col_best)):
        slack = val - best + eps
        conds.append(Condition(name, bool(slack >= -tol), slack))
    return CheckReport(tuple(conds))


def check_eps_relative_nash(game: BimatrixGame, profile: MixedProfile, eps, tol=None) -> CheckReport:
    """Relative test: each payoff is at least ``(1 - eps)`` times the best response.

    Slack is ``payoff / best - (1 - eps)``, invariant under positive scaling.
    """
    eps = scalar(eps, game.exact)
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    if np.any(game.A < 0) or np.any(game.B < 0):
        raise IllPosed("relative approximation needs nonnegative payoffs; normalize the game first")
    tol = _tol(game, tol)
    row, col = payoffs(game, profile)
    row_best, col_best = best_response_values(game, profile)
    conds = []
    for name, val, best in (("row", row, row_best), ("column", col, col_best)):
        if best < 0:
            raise IllPosed(f"{name} best-response value {best} is negative")
        slack = val / best - (1 - eps) if best > 0 else eps
        conds.append(Condition(name, bool(slack >= -tol), slack))
    return CheckReport(tuple(conds))


def nash_gap(game: BimatrixGame, profile: MixedProfile):
    """Smallest additive eps for which the profile is an eps-Nash equilibrium."""
    row, col = payoffs(game, profile)
    row_best, col_best = best_response_values(game, profile)
    return max(row_best - row, col_best - col)


def relative_nash_delta(game: BimatrixGame, profile: MixedProfile):
    """Smallest delta for which the profile is a delta-relatively-approximate equilibrium."""
    if np.any(game.A < 0) or np.any(game.B < 0):
        raise IllPosed("relative approximation needs nonnegative payoffs")
    row, col = payoffs(game, profile)
    row_best, col_best = best_response_values(game, profile)
    delta = 0 * row
    for val, best in ((row, row_best), (col, col_best)):
        if best > 0:
            delta = max(delta, 1 - val / best)
    return delta


def normalize_game(game: BimatrixGame, lo, hi) -> BimatrixGame:
    """Map each payoff matrix affinely onto ``[lo, hi]``; constant matrices go to the midpoint."""
    exact = game.exact
    lo, hi = scalar(lo, exact), scalar(hi, exact)
    if not hi > lo:
        raise ValueError("need hi > lo")

    def squash(M):
        a, b = M.min(), M.max()
        if a == b:
            return M * 0 + (lo + hi) / 2
        return lo + (M - a) * ((hi - lo) / (b - a))

    A, B = squash(game.A), squash(game.B)
    if not exact:
        A, B = np.clip(A, lo, hi), np.clip(B, lo, hi)
    return BimatrixGame(A, B, (lo, hi))


def _indifference(M: np.ndarray):
    """Solve ``M z = v 1, sum(z) = 1``.  Returns (z, v, singular)."""
    k = M.shape[1]
    lhs = np.zeros((M.shape[0] + 1, k + 1))
    lhs[:-1, :k] = M
    lhs[:-1, k] = -1.0
    lhs[-1, :k] = 1.0
    rhs = np.zeros(M.shape[0] + 1)
    rhs[-1] = 1.0
    singular = False
    try:
        if np.linalg.cond(lhs) > 1e12:
            raise np.linalg.LinAlgError
        sol = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError:
        singular = True
        sol = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
        if np.abs(lhs @ sol - rhs).max() > 1e-10:
            return None, None, True
    return sol[:k], sol[k], singular


def support_enumeration_nash(game: BimatrixGame, tol: float = 1e-10) -> list:
    """All equilibria reachable through equal-size support pairs.

    Results come sorted by support size, then lexicographically by
    (row support, column support).  Singular indifference systems are solved
    in the least-squares sense and reported through
    :class:`DegenerateGameWarning`.
    """
    m, n = game.m, game.n
    if m > MAX_ENUMERATION_SIZE or n > MAX_ENUMERATION_SIZE:
        raise TooLarge(f"support enumeration limited to {MAX_ENUMERATION_SIZE} strategies per player")
    A = np.asarray(game.A, dtype=float)
    B = np.asarray(game.B, dtype=float)
    found = []
    degenerate = False
    for k in range(1, min(m, n) + 1):
        for I in itertools.combinations(range(m), k):
            for J in itertools.combinations(range(n), k):
                # y makes the row player indifferent over I; x does the same for J
                yJ, v, sing_y = _indifference(A[np.ix_(I, J)])
                xI, u, sing_x = _indifference(B[np.ix_(I, J)].T)
                degenerate = degenerate or sing_x or sing_y
                if yJ is None or xI is None:
                    continue
                if yJ.min() < -tol or xI.min() < -tol:
                    continue
                x = np.zeros(m)
                y = np.zeros(n)
                x[list(I)] = np.clip(xI, 0, None)
                y[list(J)] = np.clip(yJ, 0, None)
                x /= x.sum()
                y /= y.sum()
                if (A @ y).max() > x @ A @ y + tol or (x @ B).max() > x @ B @ y + tol:
                    continue
                cand = MixedProfile(x, y)
                if any(cand.distance(p) < 1e-9 for p in found):
                    continue
                found.append(cand)
    if degenerate:
        warnings.warn("singular indifference system encountered", DegenerateGameWarning, stacklevel=2)
    return found


def _lex_pivot(T: list, basis: list, col: int, slack_cols: range) -> int:
    """Lexicographic minimum-ratio pivot on ``col``; returns the leaving label."""
    best_row, best_key = None, None
    for r, row in enumerate(T):
        piv = row[col]
        if piv <= 0:
            continue
        key = [row[-1] / piv] + [row[c] / piv for c in slack_cols]
        if best_key is None or key < best_key:
            best_row, best_key = r, key
    if best_row is None:
        raise CycleDetected("no admissible pivot row; ray termination")
    prow = T[best_row]
    piv = prow[col]
    prow[:] = [v / piv for v in prow]
    for r, row in enumerate(T):
        if r != best_row and row[col] != 0:
            f = row[col]
            row[:] = [a - f * b for a, b in zip(row, prow)]
    leaving = basis[best_row]
    basis[best_row] = col
    return leaving


def lemke_howson(game: BimatrixGame, dropped_label: int = 0, max_pivots: int = 10_000) -> MixedProfile:
    """Lemke-Howson path following from the artificial equilibrium.

    Labels ``0..m-1`` are row strategies and ``m..m+n-1`` column strategies.
    Runs in exact rational arithmetic with a lexicographic ratio test, so the
    path is deterministic and cannot cycle on degenerate input.
    """
    m, n = game.m, game.n
    if not 0 <= dropped_label < m + n:
        raise ValueError(f"label must lie in [0, {m + n})")
    A = as_array(game.A, True)
    B = as_array(game.B, True)
    A = A - min(A.ravel()) + 1
    B = B - min(B.ravel()) + 1
    one, zero = Fraction(1), Fraction(0)

    # Q: r + A y = 1 (basis r, labels 0..m-1);  P: B^T x + s = 1 (basis s, labels m..m+n-1)
    Q = [[one if c == i else zero for c in range(m)] + list(A[i]) + [one] for i in range(m)]
    P = [list(B[:, j]) + [one if c == j else zero for c in range(n)] + [one] for j in range(n)]
    q_basis, p_basis = list(range(m)), list(range(m, m + n))
    q_slack, p_slack = range(0, m), range(m, m + n)

    # the two polytopes alternate; both index columns by label
    entering = dropped_label
    in_p = dropped_label < m
    for _ in range(max_pivots):
        if in_p:
            leaving = _lex_pivot(P, p_basis, entering, p_slack)
        else:
            leaving = _lex_pivot(Q, q_basis, entering, q_slack)
        if leaving == dropped_label:
            break
        entering = leaving
        in_p = not in_p
    else:
        raise CycleDetected(f"no equilibrium after {max_pivots} pivots")

    x = [zero] * m
    y = [zero] * n
    for r, lab in enumerate(p_basis):
        if lab < m:
            x[lab] = P[r][-1]
    for r, lab in enumerate(q_basis):
        if lab >= m:
            y[lab - m] = Q[r][-1]
    sx, sy = sum(x), sum(y)
    x = [v / sx for v in x]
    y = [v / sy for v in y]
    if game.exact:
        return MixedProfile(np.array(x, dtype=object), np.array(y, dtype=object))
    return MixedProfile(np.array([float(v) for v in x]), np.array([float(v) for v in y]))


def game(A, B, range_tag=None, exact: bool = False) -> BimatrixGame:
    return BimatrixGame(as_array(A, exact), as_array(B, exact), range_tag)


def profile(x, y, exact: bool = False) -> MixedProfile:
    return MixedProfile(as_array(x, exact), as_array(y, exact))
