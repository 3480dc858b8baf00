"""Bayesian Stackelberg model of a crowdsourcing task recommender and a typed worker."""

__version__ = "0.1.0"

from crowdstack.errors import (
    CapacityError,
    DegenerateTypeError,
    DomainError,
    InconsistencyError,
    InvalidSpecError,
    UnsupportedShapeError,
)
from crowdstack.game_model import (
    GameSpec,
    MatchingTable,
    TaskType,
    UtilityParams,
    WorkerType,
    beta_category,
    default_matching,
    enumerate_worker_types,
    system_utility,
    validate,
    worker_utility,
)
from crowdstack.best_response import (
    BestResponse,
    MixedStrategy,
    leader_expected_utility,
    optimal_observed_action_commitment,
    worker_best_response,
)
from crowdstack.lp_core import LinearProgram, LpOutcome, LpStatus, solve_lp
from crowdstack.stackelberg_solver import (
    FollowerProfile,
    NormalFormGame,
    SolveResult,
    brute_force_commitment_value,
    harsanyi_transform,
    solve_multiple_lps,
)
from crowdstack.reward_design import (
    MuInterval,
    SteeringVerdict,
    feasible_mu_region,
    mu_bounds_for_type,
    verify_steering,
)
from crowdstack.simulation import SimulationReport, simulate
