"""Background assumptions and the desk-scale variable space."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..probcore import DomainError, JointDistribution, VariableSpace, check_autonomy, deviation_profile

DESK_ANGLES = (0, 30, 60, 90, 120, 150)


def desk_space(n_lambda: int = 2, angles=DESK_ANGLES) -> VariableSpace:
    """Both wings on the same grid, so every direction has parallel and perpendicular partners."""
    if not 1 <= n_lambda <= 8:
        raise DomainError(f"desk space supports 1..8 hidden states, got {n_lambda}")
    return VariableSpace(tuple(angles), tuple(angles), tuple(f"l{k + 1}" for k in range(n_lambda)))


@dataclass(frozen=True)
class AssumptionRegime:
    """Autonomy plus (nearly) perfect correlation at parallel and perpendicular settings.

    ``delta_max`` bounds, for every parallel pair, the probability of
    disagreeing outcomes and, for every perpendicular pair, the probability
    of agreeing outcomes. ``delta_max = 0`` is the strict regime.
    """

    delta_max: object = 0

    def __post_init__(self) -> None:
        if self.delta_max < 0:
            raise DomainError(f"delta_max must be nonnegative, got {self.delta_max}")

    @property
    def strict(self) -> bool:
        return self.delta_max == 0

    @property
    def name(self) -> str:
        return "strict" if self.strict else f"nearly({float(self.delta_max):g})"

    def residual(self, P: JointDistribution) -> float:
        """Largest amount by which a correlation constraint is exceeded."""
        profile = deviation_profile(P)
        return max(0.0, max(float(d) - float(self.delta_max) for d in profile.deltas))

    def admits(self, P: JointDistribution, residual_tol: float = 1e-10) -> bool:
        return check_autonomy(P, 1e-9 if not P.exact else 0) and self.residual(P) < residual_tol


STRICT = AssumptionRegime(0)


def nearly(delta) -> AssumptionRegime:
    if delta <= 0:
        raise DomainError("nearly perfect regime needs delta > 0")
    return AssumptionRegime(Fraction(delta) if isinstance(delta, (int, Fraction)) else delta)
