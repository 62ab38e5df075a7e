"""
Checking a Leontief market equilibrium
======================================

Two traders each own one good and want only the other's.  At equal prices
both can afford exactly one unit of what they want.
"""

import numpy as np

from leontief import economy
from leontief.market import (
    check_eps_equilibrium,
    check_equilibrium,
    equilibrium_allocation,
    measured_eps,
    utilities_at_prices,
)

# Rows are goods, columns are traders.
econ = economy(np.eye(2), [[0, 1], [1, 0]])
w = np.array([0.5, 0.5])

# Utilities each trader reaches by spending its whole budget.
u = utilities_at_prices(econ, w)
print("utilities at w:", u)
print("exact equilibrium:", check_equilibrium(econ, u, w).passed)

# Inflate one utility by 10%: the report names what broke and by how much.
u_bad = u * np.array([1.1, 1.0])
report = check_eps_equilibrium(econ, u_bad, w, 0.05)
print("0.05-equilibrium:", report.passed, "failed:", report.failed_conditions())
print("smallest eps that passes:", measured_eps(econ, u_bad, w))

# The bundles behind the utilities.
print("allocation:\n", equilibrium_allocation(econ, w))
