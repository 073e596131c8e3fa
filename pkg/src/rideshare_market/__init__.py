"""Exact assignment-market toolkit for shared mobility.

Travelers with origin-destination demands are matched to capacitated
vehicles running fixed routes.  The package computes welfare-optimal
assignments exactly (rational arithmetic throughout), constructs and
verifies traveler-vehicle profit allocations, and synthesizes stable
payment schedules via an exact LP kernel.
"""

from rideshare_market.errors import (
    IncompatiblePairError,
    OracleScaleError,
    StabilityPreconditionError,
    ValidationError,
)
from rideshare_market.network import Edge, Network, ODPair, Route, covers, route_vertex_sequence
from rideshare_market.market import (
    Assignment,
    CompatibilityMatrix,
    MarketInstance,
    Traveler,
    UNASSIGNED,
    Vehicle,
    cost_recovery_gap,
    cost_share,
    surplus,
    surplus_matrix,
    utility,
    valuation,
    welfare_paper,
    welfare_surplus,
)
from rideshare_market.allocation import (
    CheckReport,
    PaymentSchedule,
    ProfitAllocation,
    SynthesisResult,
    Violation,
    blend_allocations,
    check_feasibility,
    check_stability,
    compute_profits,
    synthesize_stable_payments,
)
from rideshare_market.solver import (
    SolveResult,
    assignment_lp_relaxation,
    enumerate_assignments,
    oracle_optimum,
    solve_optimal_assignment,
)
from rideshare_market.lp import Infeasible, LPProblem, Optimal, Unbounded, lp_solve

__all__ = [
    "Assignment",
    "CheckReport",
    "CompatibilityMatrix",
    "Edge",
    "IncompatiblePairError",
    "Infeasible",
    "LPProblem",
    "MarketInstance",
    "Network",
    "ODPair",
    "Optimal",
    "OracleScaleError",
    "PaymentSchedule",
    "ProfitAllocation",
    "Route",
    "SolveResult",
    "StabilityPreconditionError",
    "SynthesisResult",
    "Traveler",
    "UNASSIGNED",
    "Unbounded",
    "ValidationError",
    "Vehicle",
    "Violation",
    "assignment_lp_relaxation",
    "blend_allocations",
    "check_feasibility",
    "check_stability",
    "compute_profits",
    "cost_recovery_gap",
    "cost_share",
    "covers",
    "enumerate_assignments",
    "lp_solve",
    "oracle_optimum",
    "route_vertex_sequence",
    "solve_optimal_assignment",
    "surplus",
    "surplus_matrix",
    "synthesize_stable_payments",
    "utility",
    "valuation",
    "welfare_paper",
    "welfare_surplus",
]
