"""The 32 product forms of the hidden joint probability and minimal-form classification.

By the product rule, P(alpha beta | a b lambda) can always be written as a
first factor for one outcome times a second factor for the other outcome.
A product form says which variables each factor keeps besides lambda:

* alpha-led partition: P(alpha | S1, lambda) * P(beta | S2, lambda) with
  S1 a subset of {beta, b, a} and S2 a subset of {a, b};
* beta-led partition: P(beta | S1, lambda) * P(alpha | S2, lambda) with
  S1 a subset of {alpha, a, b} and S2 a subset of {b, a}.

Forms are stored by role so the two partitions share one index table:
the first factor may keep the distant ``outcome``, the ``distant`` setting
and the ``local`` setting of its own outcome; the second factor may keep
its ``distant`` and ``local`` settings. Row ``i`` of :data:`FORM_BITS` gives
the bits (outcome, distant, local | distant, local) of class ``i``.

A distribution belongs to the valid form with the fewest conditioning
variables. Equal counts are broken by :func:`form_key`: first prefer forms
without the distant outcome, then without the first factor's distant
setting, then without the second factor's distant setting, then without
the first factor's local setting, then without the second factor's local
setting. That key is a total order on the 32 forms.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .probcore import (
    ALPHA,
    AXIS,
    BETA,
    A,
    B,
    LAMBDA,
    DEFAULT_TOL,
    ConfigurationError,
    JointDistribution,
    UsageError,
    VariableSpace,
    keep_sum,
    normalize_angle,
    safe_divide,
    within,
)

OUTCOME, DISTANT, LOCAL = "outcome", "distant", "local"
FIRST_ROLES = (OUTCOME, DISTANT, LOCAL)
SECOND_ROLES = (DISTANT, LOCAL)

# (outcome, distant, local | distant, local) for classes 1..32
FORM_BITS = (
    (1, 1, 1, 1, 1),
    (1, 1, 1, 1, 0),
    (1, 1, 1, 0, 1),
    (1, 1, 0, 1, 1),
    (1, 0, 1, 1, 1),
    (0, 1, 1, 1, 1),
    (1, 1, 1, 0, 0),
    (0, 1, 1, 1, 0),
    (0, 1, 1, 0, 1),
    (1, 0, 0, 1, 1),
    (0, 1, 0, 1, 1),
    (0, 0, 1, 1, 1),
    (0, 1, 1, 0, 0),
    (0, 0, 0, 1, 1),
    (1, 1, 0, 1, 0),
    (1, 0, 1, 0, 1),
    (1, 0, 1, 1, 0),
    (1, 1, 0, 0, 1),
    (1, 1, 0, 0, 0),
    (1, 0, 1, 0, 0),
    (1, 0, 0, 1, 0),
    (0, 1, 0, 1, 0),
    (0, 0, 1, 1, 0),
    (1, 0, 0, 0, 1),
    (0, 1, 0, 0, 1),
    (1, 0, 0, 0, 0),
    (0, 1, 0, 0, 0),
    (0, 0, 0, 1, 0),
    (0, 0, 1, 0, 1),
    (0, 0, 1, 0, 0),
    (0, 0, 0, 0, 1),
    (0, 0, 0, 0, 0),
)
_INDEX_OF_BITS = {bits: i + 1 for i, bits in enumerate(FORM_BITS)}


class Partition(str, enum.Enum):
    ALPHA = "alpha"
    BETA = "beta"

    @property
    def suffix(self) -> str:
        return "a" if self is Partition.ALPHA else "b"

    @classmethod
    def parse(cls, value: "Partition | str") -> "Partition":
        if isinstance(value, Partition):
            return value
        text = str(value).strip().lower()
        for p in cls:
            if text in (p.value, p.suffix, "α" if p is cls.ALPHA else "β"):
                return p
        raise UsageError(f"unknown partition {value!r}; expected 'alpha' or 'beta'")


class Strength(str, enum.Enum):
    LOCAL = "local"
    WEAKLY_NONLOCAL = "weak"
    STRONGLY_NONLOCAL = "strong"


# variables playing each role, per partition
_ROLE_VARS = {
    Partition.ALPHA: {
        "first": (ALPHA, {OUTCOME: BETA, DISTANT: B, LOCAL: A}),
        "second": (BETA, {DISTANT: A, LOCAL: B}),
    },
    Partition.BETA: {
        "first": (BETA, {OUTCOME: ALPHA, DISTANT: A, LOCAL: B}),
        "second": (ALPHA, {DISTANT: B, LOCAL: A}),
    },
}


@dataclass(frozen=True)
class ClassId:
    index: int
    partition: Partition = Partition.ALPHA

    def __post_init__(self) -> None:
        if not isinstance(self.index, (int, np.integer)) or not 1 <= int(self.index) <= 32:
            raise UsageError(f"class index must be in 1..32, got {self.index!r}")
        object.__setattr__(self, "index", int(self.index))
        object.__setattr__(self, "partition", Partition.parse(self.partition))

    def __str__(self) -> str:
        return f"H{self.index}{self.partition.suffix}"

    @classmethod
    def parse(cls, text: str) -> "ClassId":
        m = re.fullmatch(r"\s*H?(\d{1,2})([ab]|alpha|beta)?\s*", str(text), flags=re.IGNORECASE)
        if not m:
            raise UsageError(f"unknown class id {text!r}; expected e.g. 'H16a'")
        index = int(m.group(1))
        if not 1 <= index <= 32:
            raise UsageError(f"unknown class id {text!r}; index must be in 1..32")
        return cls(index, Partition.parse(m.group(2) or "a"))

    @property
    def strength(self) -> Strength:
        return strength_of(self)

    @property
    def form(self) -> "ProductForm":
        return form_of(self)


@dataclass(frozen=True)
class ProductForm:
    partition: Partition
    first: frozenset
    second: frozenset

    def __post_init__(self) -> None:
        object.__setattr__(self, "partition", Partition.parse(self.partition))
        first, second = frozenset(self.first), frozenset(self.second)
        if not first <= set(FIRST_ROLES) or not second <= set(SECOND_ROLES):
            raise UsageError(f"invalid roles {sorted(first)} / {sorted(second)}")
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(int(r in self.first) for r in FIRST_ROLES) + tuple(
            int(r in self.second) for r in SECOND_ROLES
        )

    @property
    def index(self) -> int:
        return _INDEX_OF_BITS[self.bits]

    @property
    def class_id(self) -> ClassId:
        return ClassId(self.index, self.partition)

    @property
    def count(self) -> int:
        return len(self.first) + len(self.second)

    def first_factor(self) -> tuple[str, frozenset]:
        """(target variable, conditioning variables besides lambda)."""
        target, roles = _ROLE_VARS[self.partition]["first"]
        return target, frozenset(roles[r] for r in self.first)

    def second_factor(self) -> tuple[str, frozenset]:
        target, roles = _ROLE_VARS[self.partition]["second"]
        return target, frozenset(roles[r] for r in self.second)

    def settings_used(self) -> frozenset:
        """Setting variables appearing in either factor."""
        _, s1 = self.first_factor()
        _, s2 = self.second_factor()
        return (s1 | s2) & {A, B}

    def describe(self) -> str:
        t1, s1 = self.first_factor()
        t2, s2 = self.second_factor()
        return f"P({_SYMBOL[t1]}|{_fmt(s1)})·P({_SYMBOL[t2]}|{_fmt(s2)})"

    def drop_first(self, role: str) -> "ProductForm":
        return ProductForm(self.partition, self.first - {role}, self.second)


_SYMBOL = {ALPHA: "α", BETA: "β", A: "a", B: "b"}


def _fmt(variables: frozenset) -> str:
    ordered = [v for v in (ALPHA, BETA, B, A) if v in variables]
    return "".join(_SYMBOL[v] for v in ordered) + "λ"


def form_key(form: ProductForm) -> tuple[int, ...]:
    """Sort key realizing minimal count first, then the tie-break preference."""
    return (
        form.count,
        int(OUTCOME in form.first),
        int(DISTANT in form.first),
        int(DISTANT in form.second),
        int(LOCAL in form.first),
        int(LOCAL in form.second),
    )


def form_of(class_id: ClassId | int, partition: Partition | str = Partition.ALPHA) -> ProductForm:
    if not isinstance(class_id, ClassId):
        class_id = ClassId(class_id, partition)
    bits = FORM_BITS[class_id.index - 1]
    first = frozenset(r for r, bit in zip(FIRST_ROLES, bits[:3]) if bit)
    second = frozenset(r for r, bit in zip(SECOND_ROLES, bits[3:]) if bit)
    return ProductForm(class_id.partition, first, second)


def all_forms(partition: Partition | str = Partition.ALPHA) -> list[ProductForm]:
    return [form_of(i, partition) for i in range(1, 33)]


def strength_of(class_id: ClassId | int) -> Strength:
    index = class_id.index if isinstance(class_id, ClassId) else int(class_id)
    if not 1 <= index <= 32:
        raise UsageError(f"class index must be in 1..32, got {index}")
    if index >= 29:
        return Strength.LOCAL
    if index >= 15:
        return Strength.WEAKLY_NONLOCAL
    return Strength.STRONGLY_NONLOCAL


def default_tol(P: JointDistribution, tol=None):
    if tol is not None:
        return tol
    return 0 if P.exact else DEFAULT_TOL


def _factor(weights: np.ndarray, target: str, conditioners: frozenset) -> tuple[np.ndarray, np.ndarray]:
    joint = keep_sum(weights, {target, LAMBDA} | conditioners)
    mass = joint.sum(axis=AXIS[target], keepdims=True)
    return safe_divide(joint, mass), mass


def form_residual(P: JointDistribution, form: ProductForm) -> np.ndarray:
    """Cellwise P(αβ|abλ) minus the form's product, zero where unconstrained."""
    w = P.weights
    setting_mass = keep_sum(w, {A, B, LAMBDA})
    hidden = safe_divide(w, setting_mass)
    f, f_mass = _factor(w, *form.first_factor())
    g, _ = _factor(w, *form.second_factor())
    diff = hidden - f * g
    # A first-factor condition of zero mass contains the cell, so the cell is 0
    # on both sides and the undefined factor value is unconstrained.
    active = np.broadcast_to((setting_mass != 0) & (f_mass != 0), diff.shape)
    return np.where(active, diff, P.zero())


def form_valid_for(P: JointDistribution, form: ProductForm, tol=None) -> bool:
    """Whether P(αβ|abλ) equals the form's product of reduced conditionals."""
    return bool(np.all(within(form_residual(P, form), default_tol(P, tol))))


@dataclass(frozen=True)
class Classification:
    class_id: ClassId
    tie: bool
    valid: tuple[int, ...]
    tied_with: tuple[int, ...]

    @property
    def strength(self) -> Strength:
        return strength_of(self.class_id)

    def __str__(self) -> str:
        text = f"{self.class_id} {self.strength.value}"
        if self.tie:
            text += " (tie: " + ", ".join(f"H{i}" for i in self.tied_with) + ")"
        return text


def classification(P: JointDistribution, partition: Partition | str = Partition.ALPHA, tol=None) -> Classification:
    """Minimal valid product form of P with tie information.

    All 32 forms are checked directly, so the result never depends on the
    order in which variables would be dropped.
    """
    partition = Partition.parse(partition)
    tol = default_tol(P, tol)
    valid = [f for f in all_forms(partition) if form_valid_for(P, f, tol)]
    best = min(valid, key=form_key)
    tied = tuple(sorted(f.index for f in valid if f.count == best.count and f != best))
    return Classification(best.class_id, bool(tied), tuple(sorted(f.index for f in valid)), tied)


def classify(P: JointDistribution, partition: Partition | str = Partition.ALPHA, tol=None) -> ClassId:
    return classification(P, partition, tol).class_id


def pbc_holds(P: JointDistribution, tol=None) -> bool:
    """Both partitions land in a strongly non-local class."""
    return all(
        strength_of(classify(P, part, tol)) is Strength.STRONGLY_NONLOCAL
        for part in (Partition.ALPHA, Partition.BETA)
    )


def swap_settings(P: JointDistribution) -> JointDistribution:
    """Exchange the values of a and b, pairing the k-th a-setting with the k-th b-setting."""
    s = P.space
    if len(s.a_settings) != len(s.b_settings):
        raise UsageError("swap_settings needs as many a-settings as b-settings")
    return JointDistribution(s, P.weights.transpose(0, 1, 3, 2, 4), P.exact)


def swap_outcome_roles(P: JointDistribution) -> JointDistribution:
    """Relabel the wings: alpha <-> beta together with a <-> b.

    The alpha-led class of P equals the beta-led class of the result.
    """
    s = P.space
    space = VariableSpace(s.b_settings, s.a_settings, s.lambda_values)
    return JointDistribution(space, P.weights.transpose(1, 0, 3, 2, 4), P.exact)


def flip_outcomes(P: JointDistribution) -> JointDistribution:
    """Exchange + and - for both outcomes; every class is preserved."""
    return JointDistribution(P.space, P.weights[::-1, ::-1].copy(), P.exact)


def reflect_settings(P: JointDistribution, pivot=30) -> JointDistribution:
    """Relabel every setting angle x as 2*pivot - x on both wings.

    Parallel and perpendicular pairs map to pairs of the same kind, and each
    setting keeps its own variable, so every class is preserved.
    """
    s = P.space
    try:
        ia = [s.index(A, normalize_angle(2 * pivot - x)) for x in s.a_settings]
        ib = [s.index(B, normalize_angle(2 * pivot - y)) for y in s.b_settings]
    except ConfigurationError as exc:
        raise UsageError(f"the setting grid is not symmetric about {pivot}: {exc}") from None
    return JointDistribution(s, P.weights[:, :, ia][:, :, :, ib].copy(), P.exact)


def mirror_to_beta(P: JointDistribution, pivot=30) -> JointDistribution:
    """A distribution whose beta-led class is the alpha-led class of P.

    Composed of the role swap, the reflection about ``pivot`` and an outcome
    flip, chosen so that the Wigner triple at settings (pivot - 30, pivot,
    pivot + 30) keeps P(α-β+|a1 b3) and exchanges the other two entries.
    """
    return flip_outcomes(reflect_settings(swap_outcome_roles(P), pivot))


@lru_cache(maxsize=None)
def class_table() -> tuple[tuple[int, str, str], ...]:
    """(index, alpha-led form, strength) for every class, for display."""
    return tuple(
        (i, form_of(i).describe(), strength_of(i).value) for i in range(1, 33)
    )
