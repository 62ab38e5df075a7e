"""
Searching the price simplex
===========================

The grid solver scans prices with denominator ``k`` in lexicographic order
and stops at the first approximate equilibrium.  A coarse grid can miss the
exact equilibria; tatonnement then polishes the best grid point.
"""

from leontief import game
from leontief.reduction import reduce_game_to_economy
from leontief.solvers import GridSolver, GridSpec, grid_search_equilibrium, refine_equilibrium

coord = game([[2, 1], [1, 2]], [[2, 1], [1, 2]])
econ = reduce_game_to_economy(coord).econ

for k in (3, 4):
    res = grid_search_equilibrium(econ, GridSpec(k, 0.0))
    print(f"k={k}: {res.status.value} after {res.points_scanned} points, eps {res.achieved_eps:.3g}")

# Refinement from a deliberately coarse, inexact start.
coarse = grid_search_equilibrium(econ, GridSpec(3, 0.0))
eq = coarse.equilibrium
refined = refine_equilibrium(econ, eq.u, eq.w, eps_target=0.01)
print("refined:", refined.status.value, "eps", refined.achieved_eps)

# The combined solver used by the pipeline.
res = GridSolver(resolution=64, eps_target=0.01)(reduce_game_to_economy(coord))
print("GridSolver:", res.status.value, res.equilibrium.w)
