"""JSON encodings for economies, games, equilibria and reports.

Numbers are written as strings: floats in shortest round-trip form
(``repr``), rationals as ``"p/q"``.  On input, plain JSON numbers and
numeric strings are both accepted; in exact mode decimal strings are read
as exact rationals.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .games import BimatrixGame, MixedProfile
from .market import LeontiefEconomy, MarketEquilibrium
from .numeric import as_array
from .reduction import ReducedEconomy


def encode_number(v):
    if v is None or isinstance(v, (bool, np.bool_)):
        return None if v is None else bool(v)
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def encode_array(a) -> list:
    a = np.asarray(a, dtype=object)
    if a.ndim == 0:
        return encode_number(a.item())
    return [encode_array(r) if a.ndim > 1 else encode_number(r) for r in a]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def economy_to_dict(econ: LeontiefEconomy) -> dict:
    return {
        "m": econ.m,
        "n": econ.n,
        "endowments": encode_array(econ.E),
        "demands": encode_array(econ.D),
    }


def economy_from_dict(d: dict, exact: bool = False) -> LeontiefEconomy:
    E = as_array(d["endowments"], exact)
    D = as_array(d["demands"], exact)
    if "m" in d and "n" in d and E.shape != (int(d["m"]), int(d["n"])):
        raise ValueError(f"declared size {d['m']}x{d['n']} disagrees with matrices {E.shape}")
    return LeontiefEconomy(E, D)


def reduced_to_dict(reduced: ReducedEconomy) -> dict:
    out = economy_to_dict(reduced.econ)
    out["game_size"] = reduced.game_size
    out["sigma"] = encode_number(reduced.sigma)
    return out


def reduced_from_dict(d: dict, exact: bool = False) -> ReducedEconomy:
    from .numeric import to_float

    econ = economy_from_dict(d, exact)
    return ReducedEconomy(econ, int(d["game_size"]), to_float(d.get("sigma", 0)))


def equilibrium_to_dict(eq: MarketEquilibrium) -> dict:
    return {"u": encode_array(eq.u), "w": encode_array(eq.w)}


def equilibrium_from_dict(d: dict, exact: bool = False) -> MarketEquilibrium:
    return MarketEquilibrium(as_array(d["u"], exact), as_array(d["w"], exact))


def allocation_from_dict(d: dict, exact: bool = False) -> np.ndarray:
    return as_array(d["X"], exact)


def allocation_to_dict(X) -> dict:
    return {"X": encode_array(X)}


def game_to_dict(game: BimatrixGame) -> dict:
    out = {"A": encode_array(game.A), "B": encode_array(game.B)}
    if game.range_tag is not None:
        out["range"] = [encode_number(v) for v in game.range_tag]
    return out


def game_from_dict(d: dict, exact: bool = False) -> BimatrixGame:
    rng = d.get("range")
    return BimatrixGame(as_array(d["A"], exact), as_array(d["B"], exact), tuple(rng) if rng else None)


def profile_to_dict(p: MixedProfile) -> dict:
    return {"x": encode_array(p.x), "y": encode_array(p.y)}


def profile_from_dict(d: dict, exact: bool = False) -> MixedProfile:
    return MixedProfile(as_array(d["x"], exact), as_array(d["y"], exact))


def load(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def allocation_prices(d: dict, exact: bool = False) -> np.ndarray:
    if "w" not in d:
        raise KeyError("allocation JSON carries no prices; pass --eq or add a 'w' key")
    return as_array(d["w"], exact)
