"""pmfuzz: a project-crashing workbench.

Finds duration vectors for crashable activity networks by maximizing the
smallest hyperbolic membership over three criteria: total cost, project
makespan, and summed quality loss.
"""

__version__ = "0.1.0"

from pmfuzz.errors import (
    InfeasibleScenario,
    LambdaOutOfOpenInterval,
    NetworkValidationError,
    PmfuzzError,
    ProjectFileError,
    ScenarioFileError,
    ScenarioValidationError,
    SearchSpaceTooLarge,
)
from pmfuzz.files import (
    ProjectDocument,
    ScenarioDocument,
    canonical_json,
    load_project,
    load_scenario,
    parse_project,
    parse_scenario,
    payoff_to_dict,
    solve_result_to_dict,
)
from pmfuzz.fuzzy_solver import (
    MembershipSpec,
    Scenario,
    SolveResult,
    SolveStats,
    invert_membership,
    membership,
    membership_spec,
    solve_max_lambda,
)
from pmfuzz.objectives import (
    CANONICAL_ORDER,
    CriterionId,
    PayoffMatrix,
    evaluate_criterion,
    payoff_matrix,
)
from pmfuzz.oracle import (
    EnumerationStats,
    enumerate_optimal,
    enumerate_payoff,
    min_criterion_over_box,
)
from pmfuzz.project_model import (
    Activity,
    ProjectNetwork,
    Schedule,
    earliest_start_schedule,
    total_cost,
    total_quality_loss,
    validate_network,
)

__all__ = [
    "__version__",
    "Activity",
    "CANONICAL_ORDER",
    "CriterionId",
    "EnumerationStats",
    "InfeasibleScenario",
    "LambdaOutOfOpenInterval",
    "MembershipSpec",
    "NetworkValidationError",
    "PayoffMatrix",
    "PmfuzzError",
    "ProjectDocument",
    "ProjectFileError",
    "ProjectNetwork",
    "Scenario",
    "ScenarioDocument",
    "ScenarioFileError",
    "ScenarioValidationError",
    "Schedule",
    "SearchSpaceTooLarge",
    "SolveResult",
    "SolveStats",
    "canonical_json",
    "earliest_start_schedule",
    "enumerate_optimal",
    "enumerate_payoff",
    "evaluate_criterion",
    "invert_membership",
    "load_project",
    "load_scenario",
    "membership",
    "membership_spec",
    "min_criterion_over_box",
    "parse_project",
    "parse_scenario",
    "payoff_matrix",
    "payoff_to_dict",
    "solve_max_lambda",
    "solve_result_to_dict",
    "total_cost",
    "total_quality_loss",
]
