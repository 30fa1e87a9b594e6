"""Discrete joint distributions for a two-wing polarization experiment.

The universe is the joint distribution P(alpha, beta, a, b, lambda) over

* ``alpha``, ``beta``: the two outcomes, each ``"+"`` or ``"-"``;
* ``a``, ``b``: the measurement settings, given as polarizer angles in
  degrees and taken modulo 180;
* ``lambda``: a finite set of opaque hidden-state labels.

Weights live in a dense array indexed ``[alpha, beta, a, b, lambda]``. In
exact mode the array holds :class:`fractions.Fraction` objects (numpy object
dtype) so identities can be checked with zero tolerance; in float mode it is
``float64``. Every function here is pure and every distribution is immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Iterable, Iterator, Mapping

import numpy as np

ALPHA, BETA, A, B, LAMBDA = "alpha", "beta", "a", "b", "lambda"
VARIABLES = (ALPHA, BETA, A, B, LAMBDA)
AXIS = {name: axis for axis, name in enumerate(VARIABLES)}

PLUS, MINUS = "+", "-"
OUTCOMES = (PLUS, MINUS)

DEFAULT_TOL = 1e-9
FLOAT_SUM_TOL = 1e-12
ANGLE_TOL = 1e-9


class BelltaxError(Exception):
    """Base class for errors raised by this package."""


class UsageError(BelltaxError, ValueError):
    """An operation was called with arguments that violate its contract."""


class ConfigurationError(BelltaxError, ValueError):
    """The variable space lacks something the operation needs."""


class DomainError(BelltaxError, ValueError):
    """A numeric parameter lies outside the admissible range."""


class _Undefined:
    """Result of conditioning on an event of probability zero."""

    _instance: "_Undefined | None" = None

    def __new__(cls) -> "_Undefined":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDEFINED"

    def __bool__(self) -> bool:
        return False


UNDEFINED = _Undefined()


# ---------------------------------------------------------------------------
# numbers and angles


def to_exact(value) -> Fraction:
    """Convert an int, Fraction, decimal float or ``"n/d"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise UsageError(f"not a probability: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"not a rational number: {value!r}") from exc
    raise UsageError(f"not a probability: {value!r}")


def is_exact_value(value) -> bool:
    return isinstance(value, (Fraction, int, str)) and not isinstance(value, bool)


def normalize_angle(angle):
    """Reduce an angle in degrees to [0, 180). Integral floats become ints."""
    if isinstance(angle, bool) or not isinstance(angle, Number):
        raise UsageError(f"setting angle must be a number, got {angle!r}")
    if isinstance(angle, (int, Fraction)):
        reduced = angle % 180
        if isinstance(reduced, Fraction) and reduced.denominator == 1:
            reduced = int(reduced)
        return reduced
    reduced = float(angle) % 180.0
    nearest = round(reduced)
    if abs(reduced - nearest) < ANGLE_TOL:
        return int(nearest) % 180
    return reduced


def angle_difference(a, b):
    """(b - a) modulo 180 for two normalized angles."""
    return normalize_angle(b - a)


def _same_angle(x, y) -> bool:
    diff = float(normalize_angle(x - y))
    return min(diff, 180.0 - diff) < ANGLE_TOL


def is_parallel(a, b) -> bool:
    return _same_angle(a, b)


def is_perpendicular(a, b) -> bool:
    return _same_angle(a, normalize_angle(b + 90))


# ---------------------------------------------------------------------------
# variable space


@dataclass(frozen=True)
class VariableSpace:
    """Value sets of the five variables. Angles are stored modulo 180."""

    a_settings: tuple
    b_settings: tuple
    lambda_values: tuple = ("0",)
    alpha_values: tuple = OUTCOMES
    beta_values: tuple = OUTCOMES

    def __post_init__(self) -> None:
        for name in ("alpha_values", "beta_values"):
            values = tuple(getattr(self, name))
            if values != OUTCOMES:
                raise UsageError(f"{name} must be exactly ('+', '-'), got {values!r}")
            object.__setattr__(self, name, values)
        for name in ("a_settings", "b_settings"):
            angles = tuple(normalize_angle(x) for x in getattr(self, name))
            if not angles:
                raise UsageError(f"{name} must not be empty")
            for i, x in enumerate(angles):
                for y in angles[:i]:
                    if _same_angle(x, y):
                        raise UsageError(f"{name} contains {x} twice (modulo 180)")
            object.__setattr__(self, name, angles)
        lams = tuple(str(x) for x in self.lambda_values)
        if not lams:
            raise UsageError("lambda_values must not be empty")
        if len(set(lams)) != len(lams):
            raise UsageError("lambda_values must be distinct")
        object.__setattr__(self, "lambda_values", lams)

    @property
    def shape(self) -> tuple[int, int, int, int, int]:
        return (2, 2, len(self.a_settings), len(self.b_settings), len(self.lambda_values))

    def values(self, var: str) -> tuple:
        if var == ALPHA:
            return self.alpha_values
        if var == BETA:
            return self.beta_values
        if var == A:
            return self.a_settings
        if var == B:
            return self.b_settings
        if var == LAMBDA:
            return self.lambda_values
        raise UsageError(f"unknown variable {var!r}; expected one of {VARIABLES}")

    def index(self, var: str, value) -> int:
        values = self.values(var)
        if var in (A, B):
            if isinstance(value, bool) or not isinstance(value, Number):
                raise UsageError(f"setting {var} must be an angle, got {value!r}")
            for i, x in enumerate(values):
                if _same_angle(x, value):
                    return i
            raise ConfigurationError(f"setting {var}={value} is not in {list(values)}")
        if var in (ALPHA, BETA) and value == "−":
            value = MINUS
        if var == LAMBDA:
            value = str(value)
        try:
            return values.index(value)
        except ValueError:
            raise ConfigurationError(f"{var}={value!r} is not in {list(values)}") from None

    def parallel_pairs(self) -> list[tuple]:
        return [(x, y) for x in self.a_settings for y in self.b_settings if is_parallel(x, y)]

    def perpendicular_pairs(self) -> list[tuple]:
        return [(x, y) for x in self.a_settings for y in self.b_settings if is_perpendicular(x, y)]

    def with_lambdas(self, lambda_values: Iterable) -> "VariableSpace":
        return VariableSpace(self.a_settings, self.b_settings, tuple(lambda_values))

    def to_dict(self) -> dict:
        return {
            "a_settings": list(self.a_settings),
            "b_settings": list(self.b_settings),
            "lambda": list(self.lambda_values),
        }


# ---------------------------------------------------------------------------
# conditions


@dataclass(frozen=True)
class Condition:
    """A partial assignment of variables to values, e.g. ``Condition(a=0, b=30)``.

    ``lambda`` is a keyword, so use ``lam=`` or the mapping constructor
    ``Condition.of({"lambda": "l1"})``.
    """

    assignment: tuple = field(default=())

    def __init__(self, assignment: Mapping | Iterable = (), **kwargs) -> None:
        items = list(assignment.items()) if isinstance(assignment, Mapping) else list(assignment)
        for key, value in kwargs.items():
            items.append((LAMBDA if key == "lam" else key, value))
        seen: set[str] = set()
        for var, _ in items:
            if var not in VARIABLES:
                raise UsageError(f"unknown variable {var!r} in condition")
            if var in seen:
                raise UsageError(f"variable {var!r} assigned twice in condition")
            seen.add(var)
        items.sort(key=lambda kv: AXIS[kv[0]])
        object.__setattr__(self, "assignment", tuple(items))

    @classmethod
    def of(cls, given: "Condition | Mapping | None") -> "Condition":
        if given is None:
            return cls()
        if isinstance(given, Condition):
            return given
        return cls(given)

    @property
    def variables(self) -> frozenset:
        return frozenset(var for var, _ in self.assignment)

    def resolve(self, space: VariableSpace) -> dict[str, int]:
        """Map each assigned variable to the index of its value in ``space``."""
        return {var: space.index(var, value) for var, value in self.assignment}


# ---------------------------------------------------------------------------
# array helpers shared by the other modules


def keep_sum(weights: np.ndarray, keep: Iterable[str]) -> np.ndarray:
    """Sum out every variable not in ``keep``, keeping all five axes."""
    keep = set(keep)
    axes = tuple(AXIS[v] for v in VARIABLES if v not in keep)
    if not axes:
        return weights
    return weights.sum(axis=axes, keepdims=True)


def safe_divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Elementwise num/den with 0 wherever den == 0."""
    num, den = np.broadcast_arrays(num, den)
    if num.dtype == object or den.dtype == object:
        out = np.full(num.shape, Fraction(0), dtype=object)
    else:
        out = np.zeros(num.shape, dtype=float)
    return np.divide(num, den, out=out, where=den != 0)


def within(diff: np.ndarray, tol) -> np.ndarray:
    """Boolean array |diff| <= tol, exact for object arrays."""
    return np.abs(diff) <= tol


# ---------------------------------------------------------------------------
# tables and distributions


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """A table over a subset of the five variables (marginal or conditional).

    ``values`` keeps all five axes; axes of variables outside ``variables``
    have length one.
    """

    space: VariableSpace
    variables: tuple
    values: np.ndarray

    def __getitem__(self, assignment):
        if isinstance(assignment, Mapping):
            cond = Condition(assignment)
        else:
            if not isinstance(assignment, tuple):
                assignment = (assignment,)
            if len(assignment) != len(self.variables):
                raise UsageError(f"expected values for {self.variables}")
            cond = Condition(zip(self.variables, assignment))
        if cond.variables != frozenset(self.variables):
            raise UsageError(f"expected values for {self.variables}")
        index = [0] * 5
        for var, i in cond.resolve(self.space).items():
            index[AXIS[var]] = i
        return self.values[tuple(index)]

    def marginal(self, keep: Iterable[str]) -> "ProbabilityTable":
        keep = _check_subset(keep, set(self.variables), "marginal")
        return ProbabilityTable(self.space, _ordered(keep), keep_sum(self.values, keep))

    def items(self) -> Iterator[tuple[tuple, object]]:
        ranges = [range(len(self.space.values(v))) for v in self.variables]
        for combo in np.ndindex(*[len(r) for r in ranges]):
            index = [0] * 5
            for var, i in zip(self.variables, combo):
                index[AXIS[var]] = i
            key = tuple(self.space.values(v)[i] for v, i in zip(self.variables, combo))
            yield key, self.values[tuple(index)]

    def as_dict(self) -> dict:
        return dict(self.items())

    def total(self):
        return self.values.sum()


def _ordered(variables: Iterable[str]) -> tuple:
    return tuple(v for v in VARIABLES if v in set(variables))


def _check_subset(keep: Iterable[str], allowed: set, what: str) -> set:
    keep = set([keep] if isinstance(keep, str) else keep)
    if not keep:
        raise UsageError(f"{what}: variable set must be nonempty")
    unknown = keep - allowed
    if unknown:
        raise UsageError(f"{what}: unknown or unavailable variables {sorted(unknown)}")
    return keep


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """P(alpha, beta, a, b, lambda) as an immutable dense table."""

    space: VariableSpace
    weights: np.ndarray
    exact: bool

    def __post_init__(self) -> None:
        w = np.asarray(self.weights)
        if w.shape != self.space.shape:
            raise UsageError(f"weights shape {w.shape} does not match space {self.space.shape}")
        if self.exact:
            w = np.vectorize(to_exact, otypes=[object])(w) if w.size else w.astype(object)
            if any(x < 0 for x in w.flat):
                raise UsageError("negative probability")
            if sum(w.flat, Fraction(0)) != 1:
                raise UsageError(f"weights sum to {sum(w.flat, Fraction(0))}, not 1")
        else:
            w = w.astype(float)
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise UsageError("probabilities must be finite and nonnegative")
            if abs(w.sum() - 1.0) > FLOAT_SUM_TOL:
                raise UsageError(f"weights sum to {w.sum()!r}, not 1 within {FLOAT_SUM_TOL}")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    # construction ----------------------------------------------------------

    @classmethod
    def from_cells(
        cls,
        space: VariableSpace,
        cells: Mapping[tuple, object],
        exact: bool | None = None,
    ) -> "JointDistribution":
        """Build from ``{(alpha, beta, a, b, lambda): p}``; missing cells are 0."""
        if exact is None:
            exact = all(is_exact_value(p) for p in cells.values())
        if exact:
            w = np.full(space.shape, Fraction(0), dtype=object)
        else:
            w = np.zeros(space.shape, dtype=float)
        seen = set()
        for cell, p in cells.items():
            if len(cell) != 5:
                raise UsageError(f"cell {cell!r} must assign all five variables")
            index = tuple(space.index(v, x) for v, x in zip(VARIABLES, cell))
            if index in seen:
                raise UsageError(f"cell {cell!r} given twice")
            seen.add(index)
            w[index] = to_exact(p) if exact else float(p)
        return cls(space, w, exact)

    @classmethod
    def from_array(cls, space: VariableSpace, weights: np.ndarray) -> "JointDistribution":
        weights = np.asarray(weights)
        return cls(space, weights, weights.dtype == object)

    # access ----------------------------------------------------------------

    def __getitem__(self, cell: tuple):
        if len(cell) != 5:
            raise UsageError("a cell assigns (alpha, beta, a, b, lambda)")
        return self.weights[tuple(self.space.index(v, x) for v, x in zip(VARIABLES, cell))]

    def cells(self, nonzero: bool = True) -> Iterator[tuple[tuple, object]]:
        s = self.space
        for index in np.ndindex(*s.shape):
            p = self.weights[index]
            if nonzero and p == 0:
                continue
            yield tuple(s.values(v)[i] for v, i in zip(VARIABLES, index)), p

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return (
            self.space == other.space
            and self.exact == other.exact
            and bool(np.all(self.weights == other.weights))
        )

    __hash__ = None  # type: ignore[assignment]

    def zero(self):
        return Fraction(0) if self.exact else 0.0

    def to_float(self) -> "JointDistribution":
        if not self.exact:
            return self
        return JointDistribution(self.space, self.weights.astype(float), False)

    def table(self) -> ProbabilityTable:
        return ProbabilityTable(self.space, VARIABLES, self.weights)


# ---------------------------------------------------------------------------
# operations


def _table_of(P: JointDistribution | ProbabilityTable) -> ProbabilityTable:
    return P.table() if isinstance(P, JointDistribution) else P


def marginal(P: JointDistribution | ProbabilityTable, keep: Iterable[str]) -> ProbabilityTable:
    """Sum P over the variables not in ``keep``."""
    return _table_of(P).marginal(keep)


def conditional(
    P: JointDistribution | ProbabilityTable,
    target: Iterable[str],
    given: Condition | Mapping | None = None,
):
    """P(target | given) as a table over ``target``, or UNDEFINED on zero mass."""
    table = _table_of(P)
    given = Condition.of(given)
    target = _check_subset(target, set(table.variables), "conditional")
    if target & given.variables:
        raise UsageError("target and given variables overlap")
    if not given.variables <= set(table.variables):
        raise UsageError("conditioning on a variable the table does not carry")
    joint = keep_sum(table.values, target | given.variables)
    index: list = [slice(None)] * 5
    for var, i in given.resolve(table.space).items():
        index[AXIS[var]] = slice(i, i + 1)
    joint = joint[tuple(index)]
    mass = joint.sum()
    if mass == 0:
        return UNDEFINED
    return ProbabilityTable(table.space, _ordered(target), joint / mass)


def is_conditionally_irrelevant(
    P: JointDistribution,
    target: str,
    dropped: str,
    retained: Iterable[str],
    tol=DEFAULT_TOL,
) -> bool:
    """Whether P(target | dropped, retained) = P(target | retained) wherever defined."""
    retained = set([retained] if isinstance(retained, str) else retained)
    for var in (target, dropped, *retained):
        if var not in VARIABLES:
            raise UsageError(f"unknown variable {var!r}")
    if target == dropped or target in retained or dropped in retained:
        raise UsageError("target, dropped and retained variables must be disjoint")
    w = P.weights
    full = keep_sum(w, {target, dropped} | retained)
    full_mass = full.sum(axis=AXIS[target], keepdims=True)
    reduced = full.sum(axis=AXIS[dropped], keepdims=True)
    reduced_mass = reduced.sum(axis=AXIS[target], keepdims=True)
    lhs = safe_divide(full, full_mass)
    rhs = safe_divide(reduced, reduced_mass)
    diff = np.broadcast_to(lhs - rhs, np.broadcast_shapes(lhs.shape, full_mass.shape))
    ok = within(diff, tol) | np.broadcast_to(full_mass == 0, diff.shape)
    return bool(np.all(ok))


def check_autonomy(P: JointDistribution, tol=DEFAULT_TOL) -> bool:
    """Whether P(lambda | a, b) = P(lambda) for every setting pair of positive mass."""
    w = P.weights
    per_setting = keep_sum(w, {A, B, LAMBDA})
    setting_mass = keep_sum(w, {A, B})
    lam = keep_sum(w, {LAMBDA})
    cond = safe_divide(per_setting, setting_mass)
    diff = cond - lam
    ok = within(diff, tol) | np.broadcast_to(setting_mass == 0, diff.shape)
    return bool(np.all(ok))


def hidden_joint(P: JointDistribution) -> tuple[np.ndarray, np.ndarray]:
    """P(alpha beta | a b lambda) and the mask of (a, b, lambda) with positive mass."""
    mass = keep_sum(P.weights, {A, B, LAMBDA})
    return safe_divide(P.weights, mass), mass != 0


def empirical_joint(P: JointDistribution) -> tuple[np.ndarray, np.ndarray]:
    """P(alpha beta | a b) with lambda summed out, shape (2, 2, |A|, |B|, 1)."""
    per_setting = keep_sum(P.weights, {ALPHA, BETA, A, B})
    mass = keep_sum(P.weights, {A, B})
    return safe_divide(per_setting, mass), mass != 0


# ---------------------------------------------------------------------------
# deviation from perfect (anti-)correlation


def _cube_root(x) -> float:
    return float(x) ** (1.0 / 3.0) if x > 0 else 0.0


@dataclass(frozen=True)
class DeviationProfile:
    """Deviation from perfect correlation per constrained setting pair.

    ``parallel`` maps each parallel pair (a, b) to the total probability of
    the two disagreeing outcome cells; ``perpendicular`` maps each
    perpendicular pair to the total probability of the two agreeing cells.
    ``epsilon`` is the largest cube root among them.
    """

    parallel: Mapping[tuple, object]
    perpendicular: Mapping[tuple, object]

    @property
    def deltas(self) -> list:
        return list(self.parallel.values()) + list(self.perpendicular.values())

    @property
    def max_delta(self):
        return max(self.deltas)

    @property
    def epsilon(self) -> float:
        return max(_cube_root(d) for d in self.deltas)

    @classmethod
    def uniform(cls, delta, directions=(0,)) -> "DeviationProfile":
        """The same deviation ``delta`` on the parallel and perpendicular pair of each direction."""
        par = {(d, d): delta for d in directions}
        perp = {(d, normalize_angle(d + 90)): delta for d in directions}
        return cls(par, perp)


def deviation_profile(P: JointDistribution) -> DeviationProfile:
    s = P.space
    emp, has_mass = empirical_joint(P)
    parallel, perpendicular = {}, {}
    for pairs, cells, out in (
        (s.parallel_pairs(), ((0, 1), (1, 0)), parallel),
        (s.perpendicular_pairs(), ((0, 0), (1, 1)), perpendicular),
    ):
        for x, y in pairs:
            i, j = s.index(A, x), s.index(B, y)
            if not has_mass[0, 0, i, j, 0]:
                continue
            out[(x, y)] = sum((emp[c0, c1, i, j, 0] for c0, c1 in cells), P.zero())
    if not parallel and not perpendicular:
        raise ConfigurationError("the space has no parallel or perpendicular setting pair")
    return DeviationProfile(parallel, perpendicular)


def uniform_settings_weights(space: VariableSpace, exact: bool) -> np.ndarray:
    """P(a) P(b) with uniform settings, shaped to broadcast over the full table."""
    n = len(space.a_settings) * len(space.b_settings)
    value = Fraction(1, n) if exact else 1.0 / n
    dtype = object if exact else float
    return np.full((1, 1, len(space.a_settings), len(space.b_settings), 1), value, dtype=dtype)


def isclose_number(x, y, tol=DEFAULT_TOL) -> bool:
    return math.isclose(float(x), float(y), rel_tol=0.0, abs_tol=tol) if tol else x == y
