"""contractbandit: learn near-optimal outcome-contingent wage contracts
against a hidden agent by best-arm identification over a ratio-coarse
contract grid, with brute-force oracles for every accuracy claim."""

from .domain import (
    AgentInstance,
    Contract,
    InvalidInstance,
    OutcomeModel,
    UtilitySpec,
    dominance_expectation_check,
    instance_digest,
    load_instance,
    save_instance,
    validate_bra,
    validate_fosd,
)
from .response import EffortChoice, agent_utility, best_response, exact_profit, grossman_hart_gap
from .space import (
    CoarseCode,
    DiscretizedSpace,
    enumerate_space,
    is_bounded,
    is_monotone_smooth,
    round_to_coarse,
)
from .bandit import (
    ArmSet,
    EliminationResult,
    EliminationTrace,
    FunctionArmSet,
    TabularArmSet,
    median_elimination,
    total_sample_count,
)
from .environment import RoundResult, make_arm_set, play_round, play_rounds
from .oracle import grid_optimum, grid_slack, risk_neutral_shape_check, two_outcome_shape_check
from .run import PreconditionRefused, batch_run, evaluate_run, learn_run, theorem_eta

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
