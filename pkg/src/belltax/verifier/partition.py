"""Hidden-state partition used to bound purely outcome dependent models.

For a direction d and deviation measure eps, hidden states split into

    part 1: P(λ) > eps and P(α+ | β- a_d λ) <= eps
    part 2: P(λ) > eps and P(α+ | β- a_d λ) >= 1 - eps
    part 3: P(λ) <= eps

and on each intersection part_k(d) ∩ part_l(d') with k, l in {1, 2} the
hidden joint P(αβ | a_d b_d' λ) obeys the cell bounds returned by ``_bounds``.
The case analysis behind the bounds needs 1 - eps > eps, so
``in_domain`` records whether eps < 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..factors import build_model, first_shape, second_shape
from ..inequalities import generalized_wbi, triple_from
from ..probcore import (
    A,
    ALPHA,
    B,
    BETA,
    LAMBDA,
    JointDistribution,
    UsageError,
    VariableSpace,
    deviation_profile,
    hidden_joint,
    keep_sum,
    normalize_angle,
    safe_divide,
)
from ..taxonomy import form_of, form_valid_for
from .regime import desk_space

LE, GE = "<=", ">="
CELLS = ((0, 0), (0, 1), (1, 0), (1, 1))  # (α, β) with index 0 = "+"


def _bounds(k: int, l: int, eps: float) -> tuple:
    """(relation, bound) for the cells ++, +-, -+, -- on part_k(d) ∩ part_l(d')."""
    small, tiny, big = (LE, eps), (LE, eps * eps), (GE, (1 - eps) ** 2)
    return {
        (1, 1): (tiny, small, small, big),
        (1, 2): (small, tiny, big, small),
        (2, 1): (small, big, tiny, small),
        (2, 2): (big, small, small, tiny),
    }[(k, l)]


@dataclass(frozen=True)
class LambdaPartition:
    direction: object
    epsilon: float
    parts: tuple[frozenset, frozenset, frozenset]
    lambda_values: tuple

    @property
    def unassigned(self) -> frozenset:
        return frozenset(self.lambda_values) - frozenset().union(*self.parts)

    @property
    def is_disjoint(self) -> bool:
        p1, p2, p3 = self.parts
        return not (p1 & p2 or p1 & p3 or p2 & p3)

    @property
    def is_exhaustive(self) -> bool:
        return not self.unassigned

    def parts_of(self, lam) -> tuple[int, ...]:
        return tuple(k + 1 for k, part in enumerate(self.parts) if lam in part)


@dataclass(frozen=True)
class BoundViolation:
    a_direction: object
    b_direction: object
    lam: str
    parts: tuple[int, int]
    cell: tuple[int, int]
    value: float
    relation: str
    bound: float

    def __str__(self) -> str:
        signs = "".join("+-"[c] for c in self.cell)
        return (
            f"P(α{signs[0]}β{signs[1]}|a={self.a_direction} b={self.b_direction} {self.lam}) = "
            f"{self.value:.6g} violates {self.relation} {self.bound:.6g} on parts {self.parts}"
        )


@dataclass(frozen=True)
class PartitionReport:
    epsilon: float
    partitions: dict
    violations: tuple[BoundViolation, ...] = field(default_factory=tuple)

    @property
    def in_domain(self) -> bool:
        return self.epsilon < 0.5

    @property
    def partitions_ok(self) -> bool:
        return all(p.is_disjoint and p.is_exhaustive for p in self.partitions.values())

    @property
    def ok(self) -> bool:
        return self.partitions_ok and not self.violations


def _alpha_plus_given_beta_minus(P: JointDistribution) -> np.ndarray:
    """P(α+ | β- a λ), shape (|A|, L); 0 where (β-, a, λ) has no mass."""
    joint = keep_sum(P.weights, {ALPHA, BETA, A, LAMBDA})
    cond = safe_divide(joint, joint.sum(axis=0, keepdims=True))
    return cond[0, 1, :, 0, :]


def directions(space: VariableSpace) -> list:
    """Directions d with a = d, b = d and b = d⊥ all available."""
    return [
        d
        for d in space.a_settings
        if any(normalize_angle(b) == d for b in space.b_settings)
        and any(normalize_angle(b) == normalize_angle(d + 90) for b in space.b_settings)
    ]


def _check_form(P: JointDistribution, tol) -> None:
    if not form_valid_for(P, form_of(16), tol):
        raise UsageError("the hidden joint probability is not of the purely outcome dependent form")


def lambda_partition(P: JointDistribution, direction, eps=None, tol=None) -> LambdaPartition:
    _check_form(P, tol)
    if eps is None:
        eps = deviation_profile(P).epsilon
    s = P.space
    i = s.index(A, direction)
    lam_mass = keep_sum(P.weights, {LAMBDA}).ravel()
    f = _alpha_plus_given_beta_minus(P)[i]
    p1, p2, p3 = set(), set(), set()
    for l, lam in enumerate(s.lambda_values):
        if lam_mass[l] <= eps:
            p3.add(lam)
            continue
        if f[l] <= eps:
            p1.add(lam)
        if f[l] >= 1 - eps:
            p2.add(lam)
    return LambdaPartition(direction, float(eps), (frozenset(p1), frozenset(p2), frozenset(p3)), s.lambda_values)


def check_partition_bounds(P: JointDistribution, eps=None, tol=None, bound_tol: float = 1e-12) -> PartitionReport:
    """Partitions for every usable direction plus all intersection cell bounds."""
    _check_form(P, tol)
    if eps is None:
        eps = deviation_profile(P).epsilon
    eps = float(eps)
    s = P.space
    dirs = directions(s)
    parts = {d: lambda_partition(P, d, eps, tol) for d in dirs}
    hidden, has_mass = hidden_joint(P)
    violations = []
    for di in dirs:
        i = s.index(A, di)
        for dj in dirs:
            j = s.index(B, dj)
            for l, lam in enumerate(s.lambda_values):
                if not has_mass[0, 0, i, j, l]:
                    continue
                for k in parts[di].parts_of(lam):
                    for m in parts[dj].parts_of(lam):
                        if k == 3 or m == 3:
                            continue
                        for cell, (rel, bound) in zip(CELLS, _bounds(k, m, eps)):
                            value = float(hidden[cell[0], cell[1], i, j, l])
                            bad = value > bound + bound_tol if rel == LE else value < bound - bound_tol
                            if bad:
                                violations.append(BoundViolation(di, dj, lam, (k, m), cell, value, rel, bound))
    return PartitionReport(eps, parts, tuple(violations))


# ---------------------------------------------------------------------------
# random purely outcome dependent models


def random_h16_model(rng: np.random.Generator, space: VariableSpace | None = None, concentration: float = 1.0):
    """P(λ) from a Dirichlet draw and both factor tables uniform per entry."""
    space = space or desk_space()
    form = form_of(16)
    lam = rng.dirichlet(np.full(space.shape[4], concentration))
    lam = np.maximum(lam, 1e-12)
    first = rng.uniform(size=first_shape(form, space))
    second = rng.uniform(size=second_shape(form, space))
    return build_model(space, form, lam / lam.sum(), first, second, exact=False)


def near_perfect_h16_model(
    rng: np.random.Generator,
    n_lambda: int | None = None,
    noise: float | None = None,
    junk_weight: float | None = None,
    angles=(0, 30, 60, 90, 120, 150),
):
    """A purely outcome dependent model close to deterministic local sign patterns.

    Each hidden state fixes a ± sign for the first half of the angle grid and
    the opposite sign at the perpendicular directions, the same for both wings;
    the factor tables are then blurred by uniform noise. Optionally one hidden
    state gets a small weight and arbitrary tables. Most draws have eps below
    1/2, where the partition bounds apply.
    """
    n_lambda = n_lambda if n_lambda is not None else int(rng.integers(2, 9))
    noise = noise if noise is not None else 10 ** rng.uniform(-4, -0.5)
    if junk_weight is None:
        junk_weight = 10 ** rng.uniform(-7, -1) if rng.random() < 0.5 else 0.0
    space = VariableSpace(tuple(angles), tuple(angles), tuple(f"l{k + 1}" for k in range(n_lambda)))
    half = len(angles) // 2
    form = form_of(16)
    first = np.zeros(first_shape(form, space))
    second = np.zeros(second_shape(form, space))
    for l in range(n_lambda):
        signs = rng.choice([0.0, 1.0], size=half)
        pattern = np.concatenate([signs, 1 - signs])
        first[0, :, :, 0, l] = pattern[None, :]
        second[0, 0, 0, :, l] = pattern
    first = np.abs(first - rng.uniform(0, noise, size=first.shape))
    second = np.abs(second - rng.uniform(0, noise, size=second.shape))
    lam = rng.dirichlet(np.ones(n_lambda))
    if junk_weight and n_lambda > 1:
        first[..., 0] = rng.uniform(size=first[..., 0].shape)
        second[..., 0] = rng.uniform(size=second[..., 0].shape)
        lam[0] = junk_weight
        lam[1:] *= (1 - junk_weight) / lam[1:].sum()
    return build_model(space, form, lam, first, second, exact=False)


GENERATORS = {"uniform": random_h16_model, "near-perfect": near_perfect_h16_model}


@dataclass
class SuiteSummary:
    """Counts over a batch of random purely outcome dependent models."""

    generator: str
    models: int = 0
    in_domain: int = 0
    inequality_violations: int = 0
    worst_margin: float = -np.inf
    bound_failures: int = 0
    bound_failures_in_domain: int = 0
    partition_failures: int = 0
    partition_failures_in_domain: int = 0
    first_failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.inequality_violations == 0 and self.bound_failures == 0 and self.partition_failures == 0

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {"ok": self.ok}


def partition_suite(n_models: int = 1000, seed: int = 0, generator: str = "uniform") -> SuiteSummary:
    """Generalized inequality at each model's own eps plus the partition bounds."""
    if generator not in GENERATORS:
        raise UsageError(f"unknown generator {generator!r}; expected one of {sorted(GENERATORS)}")
    make = GENERATORS[generator]
    summary = SuiteSummary(generator)
    for n, child in enumerate(np.random.SeedSequence(seed).spawn(n_models)):
        P = make(np.random.default_rng(child))
        eps = deviation_profile(P).epsilon
        summary.models += 1
        summary.in_domain += eps < 0.5
        if eps < 1:
            r = generalized_wbi(triple_from(P), eps)
            summary.worst_margin = max(summary.worst_margin, float(r.margin))
            summary.inequality_violations += r.violated
        report = check_partition_bounds(P, eps)
        if report.violations:
            summary.bound_failures += 1
            summary.bound_failures_in_domain += report.in_domain
        if not report.partitions_ok:
            summary.partition_failures += 1
            summary.partition_failures_in_domain += report.in_domain
        if not report.ok and summary.first_failure is None:
            detail = str(report.violations[0]) if report.violations else "partition not exhaustive or not disjoint"
            summary.first_failure = f"model {n} (eps={eps:.4f}): {detail}"
    return summary
