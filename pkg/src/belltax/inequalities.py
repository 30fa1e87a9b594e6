"""Wigner-Bell inequalities, plain and with corrections for imperfect correlation.

With settings a1, a2 on one wing and b2, b3 on the other, the usual
Wigner-Bell inequality reads

    P(α-β+ | a1 b3)  <=  P(α-β+ | a1 b2) + P(α-β+ | a2 b3).

When correlations at parallel and perpendicular settings are only nearly
perfect, with deviation measure eps, the corrected inequality reads

    P(α-β+ | a1 b3) - 2 eps - eps²  <=  (P(α-β+ | a1 b2) + P(α-β+ | a2 b3)) / (1 - eps)².

``variant="symmetric"`` divides by (1 - eps²) instead, for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .probcore import (
    A,
    B,
    UNDEFINED,
    ConfigurationError,
    DomainError,
    JointDistribution,
    UsageError,
    empirical_joint,
)

SQUARED, SYMMETRIC = "squared", "symmetric"
VARIANTS = (SQUARED, SYMMETRIC)


@dataclass(frozen=True)
class WignerTriple:
    """The three probabilities P(α-β+|·) entering the inequality."""

    p13: object
    p12: object
    p23: object

    def __post_init__(self) -> None:
        for name in ("p13", "p12", "p23"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise DomainError(f"{name} = {value} is not a probability")

    def as_tuple(self) -> tuple:
        return (self.p13, self.p12, self.p23)


@dataclass(frozen=True)
class InequalityReport:
    lhs: object
    rhs: object
    margin: object
    violated: bool
    epsilon: object = 0

    def to_dict(self) -> dict:
        return {
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "margin": float(self.margin),
            "violated": bool(self.violated),
            "epsilon": float(self.epsilon),
        }


def _report(lhs, rhs, eps) -> InequalityReport:
    margin = lhs - rhs
    return InequalityReport(lhs, rhs, margin, bool(margin > 0), eps)


def usual_wbi(t: WignerTriple) -> InequalityReport:
    return _report(t.p13, t.p12 + t.p23, 0)


def generalized_wbi(t: WignerTriple, eps, variant: str = SQUARED) -> InequalityReport:
    """The eps-corrected inequality; exact when the triple and eps are rationals."""
    if variant not in VARIANTS:
        raise UsageError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if not 0 <= eps < 1:
        raise DomainError(f"eps must lie in [0, 1), got {eps}")
    if isinstance(eps, float) and any(isinstance(p, Fraction) for p in t.as_tuple()):
        t = WignerTriple(*(float(p) for p in t.as_tuple()))
    lhs = t.p13 - 2 * eps - eps * eps
    scale = (1 - eps) ** 2 if variant == SQUARED else 1 - eps * eps
    return _report(lhs, (t.p12 + t.p23) / scale, eps)


def epsilon_max(t: WignerTriple, tol: float = 1e-9, variant: str = SQUARED):
    """Supremum of the eps for which the corrected inequality is violated.

    The margin falls strictly as eps grows, so the violating set is an
    interval [0, eps_max) located by bisection on [0, 0.5]. Returns None
    when the usual inequality already holds.
    """
    t = WignerTriple(*(float(p) for p in t.as_tuple()))
    if not generalized_wbi(t, 0.0, variant).violated:
        return None
    lo, hi = 0.0, 0.5
    for _ in range(80):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if generalized_wbi(t, mid, variant).violated:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def delta_threshold(t: WignerTriple, tol: float = 1e-9, variant: str = SQUARED):
    """Largest deviation probability eps_max³ at which the violation persists."""
    eps = epsilon_max(t, tol, variant)
    return None if eps is None else eps**3


def triple_from(P: JointDistribution, a1=0, a2=30, b2=30, b3=60):
    """Read P(α-β+|a1 b3), P(α-β+|a1 b2), P(α-β+|a2 b3) from P.

    Returns UNDEFINED when one of the setting pairs has zero probability.
    """
    s = P.space
    try:
        i1, i2 = s.index(A, a1), s.index(A, a2)
        j2, j3 = s.index(B, b2), s.index(B, b3)
    except ConfigurationError as exc:
        raise ConfigurationError(f"Wigner triple needs settings a={a1},{a2} b={b2},{b3}: {exc}") from None
    emp, has_mass = empirical_joint(P)
    values = []
    for i, j in ((i1, j3), (i1, j2), (i2, j3)):
        if not has_mass[0, 0, i, j, 0]:
            return UNDEFINED
        values.append(emp[1, 0, i, j, 0])
    return WignerTriple(*values)
