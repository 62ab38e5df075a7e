"""Leontief exchange economies, bimatrix games and the reduction between them."""

from .errors import (
    ConstructionFailed,
    CycleDetected,
    DimensionMismatch,
    IllPosed,
    LeontiefError,
    PreconditionViolated,
    RangeViolation,
    SolverFailed,
    TooLarge,
    Unbounded,
    ZeroPrices,
    ZeroUtilityBlock,
)
from .games import (
    BimatrixGame,
    MixedProfile,
    best_response_values,
    check_eps_nash,
    check_eps_relative_nash,
    game,
    lemke_howson,
    nash_gap,
    normalize_game,
    payoffs,
    profile,
    relative_nash_delta,
    support_enumeration_nash,
)
from .market import (
    LeontiefEconomy,
    MarketEquilibrium,
    PriceVector,
    check_allocation_eps_equilibrium,
    check_eps_equilibrium,
    check_equilibrium,
    check_strict_eps_equilibrium,
    economy,
    leontief_utility,
    measured_eps,
    normalize_prices,
    optimal_bundle,
    trader_utility_max,
)
from .reduction import (
    PropertyReport,
    ReducedEconomy,
    nash_to_market,
    property_report,
    recover_strategies,
    reduce_game_to_economy,
    split_blocks,
    transfer_bound,
)
from .report import CheckReport, Condition
from .smoothed import (
    ExperimentConfig,
    PerturbationModel,
    TrialRecord,
    approximate_nash_from_smoothed_leontief,
    perturb_economy,
    run_experiment,
)
from .solvers import (
    GridSolver,
    GridSpec,
    SolveResult,
    Status,
    grid_search_equilibrium,
    refine_equilibrium,
    solve_reduced_exact,
)

__version__ = "0.1.0"
