"""Explicit distributions: quantum polarization statistics and the witness families.

The witness families are built from their factor tables (hidden-state
weights, P(alpha=+|...), P(beta=+|...)) with uniform settings, in exact
rational arithmetic by default. The tests compare the resulting totals
with independently transcribed tables.

Setting grids. The violating witnesses are defined on a1=0, a2=30 and
b1=30, b2=60. Passing other angle lists extends them: parallel pairs get
the perfectly (or nearly) correlated factor values, perpendicular pairs
the anti-correlated ones, and every other pair the value that reproduces
the quantum statistics of that angle difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .factors import build_model, first_shape, second_shape
from .probcore import (
    DomainError,
    JointDistribution,
    UsageError,
    VariableSpace,
    angle_difference,
    is_parallel,
    is_perpendicular,
    normalize_angle,
    to_exact,
    uniform_settings_weights,
)
from .taxonomy import form_of, swap_outcome_roles, swap_settings

LAMBDAS = ("l1", "l2")

# cos(2θ) for the angles where it is rational
_COS_DOUBLE = {0: 1, 60: Fraction(1, 2), 90: 0, 120: Fraction(-1, 2), 180: -1,
               240: Fraction(-1, 2), 270: 0, 300: Fraction(1, 2)}


def exact_cos2(theta):
    """cos² of an angle in degrees as a Fraction, or None when irrational."""
    double = normalize_angle(theta) * 2
    if isinstance(double, float) or double not in _COS_DOUBLE:
        return None
    return (1 + Fraction(_COS_DOUBLE[double])) / 2


def cos2(theta, exact: bool):
    if exact:
        value = exact_cos2(theta)
        if value is None:
            raise DomainError(f"cos²({theta}°) is irrational; use float mode")
        return value
    return math.cos(math.radians(float(theta))) ** 2


def _rational_angles(a_settings, b_settings) -> bool:
    return all(exact_cos2(angle_difference(x, y)) is not None for x in a_settings for y in b_settings)


@dataclass(frozen=True)
class QuantumConfig:
    """Settings and entanglement p of the state sqrt(p)|++> + sqrt(1-p)|-->."""

    a_settings: tuple = (0, 30, 60)
    b_settings: tuple = (0, 30, 60)
    p: object = Fraction(1, 2)

    def __post_init__(self) -> None:
        if not 0 <= self.p <= 1:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")


def quantum_distribution(cfg: QuantumConfig | None = None, exact: bool | None = None, **kwargs) -> JointDistribution:
    """Quantum polarization statistics with uniform settings and a single hidden state.

    At p = 1/2: P(αβ|ab) = cos²(a-b)/2 when α = β and sin²(a-b)/2 otherwise.
    Other p use the amplitudes of the state sqrt(p)|++> + sqrt(1-p)|--> for
    analyzers at angles a and b, which needs float mode.
    """
    cfg = cfg or QuantumConfig(**kwargs)
    space = VariableSpace(cfg.a_settings, cfg.b_settings, ("0",))
    maximal = cfg.p == Fraction(1, 2) or cfg.p == 0.5
    if exact is None:
        exact = maximal and _rational_angles(space.a_settings, space.b_settings)
    if exact and not maximal:
        raise DomainError("exact mode is available only for p = 1/2")
    n_a, n_b = len(space.a_settings), len(space.b_settings)
    hidden = np.zeros((2, 2, n_a, n_b, 1), dtype=object if exact else float)
    for i, x in enumerate(space.a_settings):
        for j, y in enumerate(space.b_settings):
            if maximal:
                c = cos2(angle_difference(x, y), exact)
                half = Fraction(1, 2) if exact else 0.5
                hidden[0, 0, i, j, 0] = hidden[1, 1, i, j, 0] = half * c
                hidden[0, 1, i, j, 0] = hidden[1, 0, i, j, 0] = half * (1 - c)
            else:
                hidden[:, :, i, j, 0] = _partial_amplitudes(float(cfg.p), float(x), float(y)) ** 2
    if not exact:
        hidden /= hidden.sum(axis=(0, 1), keepdims=True)
    return JointDistribution(space, uniform_settings_weights(space, exact) * hidden, exact)


def _partial_amplitudes(p: float, a: float, b: float) -> np.ndarray:
    ca, sa = math.cos(math.radians(a)), math.sin(math.radians(a))
    cb, sb = math.cos(math.radians(b)), math.sin(math.radians(b))
    u, v = math.sqrt(p), math.sqrt(1 - p)
    return np.array(
        [
            [u * ca * cb + v * sa * sb, -u * ca * sb + v * sa * cb],
            [-u * sa * cb + v * ca * sb, u * sa * sb + v * ca * cb],
        ]
    )


def _exact_delta(delta, upper: Fraction, name: str):
    d = to_exact(delta)
    if not 0 < d < upper:
        raise DomainError(f"{name}: delta must lie in (0, {upper}), got {delta}")
    return d


def h29_perfect_example(direction=0, extra_directions=()) -> JointDistribution:
    """Local deterministic model with strictly perfect (anti-)correlations.

    Two equally likely hidden states; with i the given direction, state l1
    produces "-" on both wings for settings within [i, i+90) and "+"
    otherwise, state l2 the opposite. The default grid is {i, i+90} on
    both wings.
    """
    base = normalize_angle(direction)
    angles = [base, normalize_angle(base + 90)]
    for d in extra_directions:
        d = normalize_angle(d)
        if all(normalize_angle(d - x) != 0 for x in angles):
            angles.append(d)
    space = VariableSpace(tuple(angles), tuple(angles), LAMBDAS)
    minus_first = np.array([angle_difference(base, x) < 90 for x in angles])
    plus_l1 = np.where(minus_first, Fraction(0), Fraction(1))
    first = np.empty((1, 1, len(angles), 1, 2), dtype=object)
    second = np.empty((1, 1, 1, len(angles), 2), dtype=object)
    first[0, 0, :, 0, 0] = plus_l1
    first[0, 0, :, 0, 1] = 1 - plus_l1
    second[0, 0, 0, :, 0] = plus_l1
    second[0, 0, 0, :, 1] = 1 - plus_l1
    half = Fraction(1, 2)
    return build_model(space, form_of(29), [half, half], first, second, exact=True)


def h14_violating_example(a_settings=(0, 30), b_settings=(30, 60), exact: bool | None = None) -> JointDistribution:
    """Strongly non-local witness with perfect correlations violating the inequality.

    Outcome alpha is "-" in state l1 and "+" in state l2; beta is "+" with
    probability sin²(b-a) in l1 and cos²(b-a) in l2. On the default grid
    this is the 2x2 table with entries in {0, 1/32, 3/32, 1/8}.
    """
    space = VariableSpace(a_settings, b_settings, LAMBDAS)
    if exact is None:
        exact = _rational_angles(space.a_settings, space.b_settings)
    form = form_of(14)
    first = np.empty(first_shape(form, space), dtype=object)
    first[..., 0], first[..., 1] = 0, 1
    second = np.empty(second_shape(form, space), dtype=object)
    for i, x in enumerate(space.a_settings):
        for j, y in enumerate(space.b_settings):
            c = cos2(angle_difference(x, y), exact)
            second[0, 0, i, j, 0] = 1 - c
            second[0, 0, i, j, 1] = c
    half = Fraction(1, 2)
    return build_model(space, form, [half, half], first, second, exact=exact)


def _h10_first_table(d, space) -> np.ndarray:
    # P(alpha=+ | beta, lambda): beta=+ row then beta=- row
    first = np.empty(first_shape(form_of(10), space), dtype=object)
    first[0, 0, 0, 0, :] = [0, 1 - 2 * d]
    first[0, 1, 0, 0, :] = [2 * d, 1]
    return first


def _h10_second_value(x, y, d, exact: bool) -> tuple:
    """P(beta=+ | a b lambda) for (l1, l2) at settings x, y."""
    if is_parallel(x, y):
        return 0, 1
    if is_perpendicular(x, y):
        return (1 - 4 * d) / (1 - 2 * d), 2 * d / (1 - 2 * d)
    s2 = 1 - cos2(angle_difference(x, y), exact)
    if s2 < 2 * d:
        raise DomainError(f"angle difference between {x} and {y} is too small for delta={d}")
    p1 = (s2 - 2 * d) / (1 - 2 * d)
    return p1, 1 - p1


def _h10_family(space: VariableSpace, d, exact: bool) -> JointDistribution:
    if not exact:
        d = float(d)
    form = form_of(10)
    second = np.empty(second_shape(form, space), dtype=object)
    for i, x in enumerate(space.a_settings):
        for j, y in enumerate(space.b_settings):
            second[0, 0, i, j, :] = _h10_second_value(x, y, d, exact)
    half = Fraction(1, 2)
    return build_model(space, form, [half, half], _h10_first_table(d, space), second, exact=exact)


def h10_nearly_perfect_example(delta, direction=0) -> JointDistribution:
    """Outcome-dependent model with nearly perfect (anti-)correlations.

    Settings {i, i+90} on both wings. Each disagreeing cell at parallel
    settings and each agreeing cell at perpendicular settings has
    probability delta, so each constrained pair deviates by 2 delta.
    Requires 0 < delta < 1/4.
    """
    d = _exact_delta(delta, Fraction(1, 4), "h10_nearly_perfect_example")
    base = normalize_angle(direction)
    angles = (base, normalize_angle(base + 90))
    return _h10_family(VariableSpace(angles, angles, LAMBDAS), d, exact=True)


def h10_violating_example(delta, a_settings=(0, 30), b_settings=(30, 60), exact: bool | None = None) -> JointDistribution:
    """Outcome-dependent model with nearly perfect correlations violating the inequality.

    Same first factor as :func:`h10_nearly_perfect_example`; on the default
    grid its Wigner triple is (3/8, 1/8, 1/8) for every delta in (0, 1/8).
    """
    d = _exact_delta(delta, Fraction(1, 8), "h10_violating_example")
    space = VariableSpace(a_settings, b_settings, LAMBDAS)
    if exact is None:
        exact = _rational_angles(space.a_settings, space.b_settings)
    return _h10_family(space, d, exact)


SWAP_SETTINGS = "swap-settings"
SWAP_OUTCOME_ROLES = "swap-outcome-roles"
TRANSFORMS = (SWAP_SETTINGS, SWAP_OUTCOME_ROLES)


def derive_class_variant(base: JointDistribution, *transforms: str) -> JointDistribution:
    """Apply symmetry transforms in order; with none, return ``base``."""
    result = base
    for name in transforms:
        if name == SWAP_SETTINGS:
            result = swap_settings(result)
        elif name == SWAP_OUTCOME_ROLES:
            result = swap_outcome_roles(result)
        else:
            raise UsageError(f"unknown transform {name!r}; expected one of {TRANSFORMS}")
    return result


def _angles(text) -> tuple:
    if text is None:
        return None
    if isinstance(text, str):
        return tuple(to_exact(x) if "/" in x else float(x) for x in text.split(","))
    return tuple(text)


def construct(name: str, delta=None, p=None, a_settings=None, b_settings=None) -> JointDistribution:
    """Dispatch by constructor name (as used on the command line)."""
    a_settings, b_settings = _angles(a_settings), _angles(b_settings)
    grid = {}
    if a_settings is not None:
        grid["a_settings"] = a_settings
    if b_settings is not None:
        grid["b_settings"] = b_settings
    if name == "quantum":
        cfg = QuantumConfig(
            grid.get("a_settings", (0, 30, 60)),
            grid.get("b_settings", (0, 30, 60)),
            Fraction(1, 2) if p is None else p,
        )
        return quantum_distribution(cfg)
    if name == "h29-perfect":
        return h29_perfect_example()
    if name == "h14-violating":
        return h14_violating_example(**grid)
    if name in ("h10-nearly-perfect", "h10-violating"):
        if delta is None:
            raise UsageError(f"{name} needs --delta")
        if name == "h10-nearly-perfect":
            return h10_nearly_perfect_example(delta)
        return h10_violating_example(delta, **grid)
    raise UsageError(f"unknown constructor {name!r}; expected one of {CONSTRUCTOR_NAMES}")


CONSTRUCTOR_NAMES = ("quantum", "h29-perfect", "h14-violating", "h10-nearly-perfect", "h10-violating")
