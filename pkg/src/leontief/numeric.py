"""Float / exact-rational array plumbing shared by the verifiers.

Every verifier runs either on float64 arrays or on object arrays holding
:class:`fractions.Fraction`.  The mode is carried by the array dtype.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np

DEFAULT_RTOL = 1e-9


def to_fraction(value) -> Fraction:
    """Parse a number exactly.  Decimal strings such as ``"0.1"`` become 1/10."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, np.integer, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(float(value))


def to_float(value) -> float:
    if isinstance(value, str):
        value = value.strip()
        if "/" in value:
            return float(Fraction(value))
    return float(value)


def as_array(values, exact: bool = False) -> np.ndarray:
    """Convert nested sequences (numbers or numeric strings) to an array."""
    if isinstance(values, np.ndarray) and not exact and values.dtype != object:
        return values.astype(float)
    arr = np.asarray(values, dtype=object)
    if exact:
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            out[idx] = to_fraction(v)
        return out
    if arr.dtype == object:
        flat = [to_float(v) for v in arr.ravel()]
        return np.array(flat, dtype=float).reshape(arr.shape)
    return arr.astype(float)


def is_exact(*arrays) -> bool:
    return any(isinstance(a, np.ndarray) and a.dtype == object for a in arrays)


def match_mode(values, like: np.ndarray) -> np.ndarray:
    return as_array(values, exact=is_exact(like))


def zero(exact: bool):
    return Fraction(0) if exact else 0.0


def one(exact: bool):
    return Fraction(1) if exact else 1.0


def scalar(value, exact: bool):
    return to_fraction(value) if exact else to_float(value)


def is_finite(arr: np.ndarray) -> bool:
    if arr.dtype == object:
        return True
    return bool(np.all(np.isfinite(arr)))
