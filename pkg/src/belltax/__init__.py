"""Classification and Wigner-Bell analysis of two-wing hidden-variable models."""

from .probcore import (
    UNDEFINED,
    Condition,
    DeviationProfile,
    JointDistribution,
    VariableSpace,
    check_autonomy,
    conditional,
    deviation_profile,
    is_conditionally_irrelevant,
    marginal,
)
from .taxonomy import ClassId, Partition, ProductForm, Strength, classify, form_of, form_valid_for, pbc_holds
from .inequalities import WignerTriple, epsilon_max, delta_threshold, generalized_wbi, triple_from, usual_wbi

__all__ = [
    "UNDEFINED",
    "ClassId",
    "Condition",
    "DeviationProfile",
    "JointDistribution",
    "Partition",
    "ProductForm",
    "Strength",
    "VariableSpace",
    "WignerTriple",
    "check_autonomy",
    "classify",
    "conditional",
    "delta_threshold",
    "deviation_profile",
    "epsilon_max",
    "form_of",
    "form_valid_for",
    "generalized_wbi",
    "is_conditionally_irrelevant",
    "marginal",
    "pbc_holds",
    "triple_from",
    "usual_wbi",
]
