"""
From a bimatrix game to a market and back
=========================================

A game with payoffs in [1, 2] becomes a Leontief economy with twice as many
goods.  Each Nash equilibrium yields a market equilibrium whose utilities,
normalized per half, give the strategies back.
"""

import numpy as np

from leontief import game
from leontief.games import lemke_howson, support_enumeration_nash
from leontief.market import check_equilibrium
from leontief.reduction import nash_to_market, recover_strategies, reduce_game_to_economy

g = game([[2.0, 1.0], [1.0, 1.5]], [[1.0, 2.0], [1.5, 1.0]], (1, 2))
reduced = reduce_game_to_economy(g)
print("demand matrix:\n", reduced.econ.D)

# Every equilibrium of this small game, then the market image of each.
for prof in support_enumeration_nash(g):
    eq = nash_to_market(g, prof)
    back = recover_strategies(eq.u, g.n)
    print("x =", prof.x, "y =", prof.y)
    print("  prices", np.round(eq.w, 4), "market eq:", check_equilibrium(reduced.econ, eq.u, eq.w, 1e-8).passed)
    print("  recovered distance", back.distance(prof))

# Lemke-Howson reaches one of them by path following.
print("Lemke-Howson:", lemke_howson(g, 0))
