"""Desk-scale checks of which product forms can violate the Wigner-Bell inequality."""

from .partition import (
    LambdaPartition,
    PartitionReport,
    check_partition_bounds,
    lambda_partition,
    near_perfect_h16_model,
    partition_suite,
    random_h16_model,
)
from .regime import STRICT, AssumptionRegime, desk_space, nearly
from .search import (
    INFEASIBLE,
    REDUCES,
    WITNESS,
    FeasibilityResult,
    MaxViolationResult,
    feasibility_search,
    max_violation_search,
    mixture,
    outcome_variation,
)
from .structural import (
    MissingSettingProof,
    ReductionProof,
    missing_setting_inconsistency,
    reduction_applies,
    reduction_under_strict_perfectness,
)
from .table1 import (
    CAN_VIOLATE,
    IMPLIES_BI,
    INCONSISTENT,
    ClassVerdict,
    render_table,
    reproduce_table1,
    table_json,
    witness_problems,
)

__all__ = [
    "CAN_VIOLATE",
    "IMPLIES_BI",
    "INCONSISTENT",
    "INFEASIBLE",
    "REDUCES",
    "STRICT",
    "WITNESS",
    "AssumptionRegime",
    "ClassVerdict",
    "FeasibilityResult",
    "LambdaPartition",
    "MaxViolationResult",
    "MissingSettingProof",
    "PartitionReport",
    "ReductionProof",
    "check_partition_bounds",
    "desk_space",
    "feasibility_search",
    "lambda_partition",
    "max_violation_search",
    "missing_setting_inconsistency",
    "mixture",
    "near_perfect_h16_model",
    "nearly",
    "outcome_variation",
    "partition_suite",
    "random_h16_model",
    "reduction_applies",
    "reduction_under_strict_perfectness",
    "render_table",
    "reproduce_table1",
    "table_json",
    "witness_problems",
]
