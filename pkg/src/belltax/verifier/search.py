"""Numerical feasibility and maximal-violation search over one product form.

A point is P(λ) plus the two factor tables of an alpha-led form, with
uniform settings, so autonomy and the form hold by construction and only
the correlation constraints need solving for. Everything reported here is
search evidence; the exact arguments live in ``structural``.

Two mixtures over disjoint hidden labels of points of the same form are again
points of that form satisfying the same constraints, and the set of forms
valid for the mixture is the intersection of the two sets. Both searches
use this to turn accidentally degenerate optima into witnesses of the exact
target class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize

from ..factors import build_model, first_shape, second_shape
from ..inequalities import InequalityReport, generalized_wbi, triple_from, usual_wbi
from ..probcore import (
    A,
    ALPHA,
    B,
    BETA,
    LAMBDA,
    ConfigurationError,
    JointDistribution,
    UsageError,
    VariableSpace,
    deviation_profile,
)
from ..taxonomy import ClassId, Partition, ProductForm, _factor, classification, form_of
from .regime import AssumptionRegime, desk_space

WITNESS, REDUCES, INFEASIBLE = "witness", "reduces", "infeasible"
RESIDUAL_TOL = 1e-10
CLASSIFY_TOL = 1e-9
SNAP_LEVELS = (0.0, 1e-12, 1e-9, 1e-7, 1e-5)
MAX_LAMBDA = 8


def _alpha_form(target) -> ProductForm:
    if isinstance(target, ProductForm):
        form = target
    elif isinstance(target, ClassId):
        form = form_of(target)
    else:
        form = form_of(int(target))
    if form.partition is not Partition.ALPHA:
        raise UsageError("searches run on alpha-led forms; use the role swap for beta-led classes")
    return form


def _reduce_to(arr: np.ndarray, shape: tuple) -> np.ndarray:
    axes = tuple(k for k, (n, m) in enumerate(zip(arr.shape, shape)) if m == 1 and n > 1)
    return arr.sum(axis=axes, keepdims=True) if axes else arr


# ---------------------------------------------------------------------------
# parameterization


@dataclass
class Point:
    weights: np.ndarray  # unnormalized P(λ), entries in [floor, 1]
    first: np.ndarray  # P(α+ | first factor conditions)
    second: np.ndarray  # P(β+ | second factor conditions)

    @property
    def lam(self) -> np.ndarray:
        return self.weights / self.weights.sum()

    def copy(self) -> "Point":
        return Point(self.weights.copy(), self.first.copy(), self.second.copy())


class FormModel:
    """Constraint and objective structure of one form on one space."""

    def __init__(self, form: ProductForm, space: VariableSpace, weight_floor: float = 0.05):
        self.form = form
        self.space = space
        self.weight_floor = weight_floor
        self.fshape = first_shape(form, space)
        self.gshape = second_shape(form, space)
        self.n_lambda = space.shape[4]
        n_a, n_b = space.shape[2:4]
        self.eshape = (2, 2, n_a, n_b)
        self.full = (2, 2, n_a, n_b, self.n_lambda)
        rows = []
        for pairs, cells in (
            (space.parallel_pairs(), ((0, 1), (1, 0))),
            (space.perpendicular_pairs(), ((0, 0), (1, 1))),
        ):
            for x, y in pairs:
                row = np.zeros(self.eshape)
                i, j = space.index(A, x), space.index(B, y)
                for c0, c1 in cells:
                    row[c0, c1, i, j] = 1.0
                rows.append(row.ravel())
        if not rows:
            raise UsageError("the space has no parallel or perpendicular pairs to constrain")
        self.constraints = np.array(rows)
        self.objective = None
        try:
            i1, i2 = space.index(A, 0), space.index(A, 30)
            j2, j3 = space.index(B, 30), space.index(B, 60)
        except ConfigurationError:
            pass
        else:
            o = np.zeros(self.eshape)
            o[1, 0, i1, j3] += 1.0
            o[1, 0, i1, j2] -= 1.0
            o[1, 0, i2, j3] -= 1.0
            self.objective = o.ravel()

    # --- evaluation

    def random_point(self, rng: np.random.Generator) -> Point:
        return Point(
            rng.uniform(self.weight_floor, 1.0, size=self.n_lambda),
            rng.uniform(size=self.fshape),
            rng.uniform(size=self.gshape),
        )

    def full_first(self, p: Point) -> np.ndarray:
        return np.concatenate([p.first, 1 - p.first], axis=0)

    def full_second(self, p: Point) -> np.ndarray:
        return np.concatenate([p.second, 1 - p.second], axis=1)

    def hidden(self, p: Point) -> np.ndarray:
        return np.broadcast_to(self.full_first(p) * self.full_second(p), self.full)

    def empirical(self, p: Point) -> np.ndarray:
        return self.hidden(p) @ p.lam

    def excess(self, p: Point, cap: float) -> np.ndarray:
        return self.constraints @ self.empirical(p).ravel() - cap

    def residual(self, p: Point, cap: float) -> float:
        return float(max(0.0, self.excess(p, cap).max()))

    def margin(self, p: Point) -> float:
        return float(self.objective @ self.empirical(p).ravel())

    def distribution(self, p: Point) -> JointDistribution:
        return build_model(self.space, self.form, p.lam, p.first, p.second, exact=False)

    # --- flat vectors for the descent

    def pack(self, p: Point) -> np.ndarray:
        return np.concatenate([p.weights, p.first.ravel(), p.second.ravel()])

    def unpack(self, x: np.ndarray) -> Point:
        n_f = int(np.prod(self.fshape))
        w = x[: self.n_lambda]
        f = x[self.n_lambda : self.n_lambda + n_f].reshape(self.fshape)
        g = x[self.n_lambda + n_f :].reshape(self.gshape)
        return Point(w, f, g)

    def bounds(self) -> list:
        n = int(np.prod(self.fshape)) + int(np.prod(self.gshape))
        return [(self.weight_floor, 1.0)] * self.n_lambda + [(0.0, 1.0)] * n

    def penalty(self, x: np.ndarray, cap: float) -> tuple[float, np.ndarray]:
        """Sum of squared constraint excesses and its gradient."""
        p = self.unpack(x)
        ff, gg = self.full_first(p), self.full_second(p)
        hidden = np.broadcast_to(ff * gg, self.full)
        lam = p.lam
        emp = hidden @ lam
        over = np.maximum(self.constraints @ emp.ravel() - cap, 0.0)
        value = float(over @ over)
        d_emp = (2.0 * over @ self.constraints).reshape(self.eshape)
        d_hidden = d_emp[..., None] * lam
        d_lam = np.einsum("ijabl,ijab->l", hidden, d_emp)
        d_ff = _reduce_to(d_hidden * gg, ff.shape)
        d_gg = _reduce_to(d_hidden * ff, gg.shape)
        d_f = d_ff[:1] - d_ff[1:]
        d_g = d_gg[:, :1] - d_gg[:, 1:]
        d_w = (d_lam - lam @ d_lam) / p.weights.sum()
        return value, np.concatenate([d_w, d_f.ravel(), d_g.ravel()])

    # --- linear blocks for the see-saw

    def linear_block(self, p: Point, block: str) -> tuple[np.ndarray, np.ndarray]:
        """(offset, matrix) with empirical = offset + matrix @ block values."""
        rows = np.broadcast_to(np.arange(int(np.prod(self.eshape))).reshape(self.eshape + (1,)), self.full)
        lam = p.lam
        if block == LAMBDA:
            return np.zeros(rows.shape[:4]).ravel(), self.hidden(p).reshape(-1, self.n_lambda)
        sign = np.array([1.0, -1.0])
        if block == ALPHA:
            other = self.full_second(p)
            coef = np.broadcast_to(sign.reshape(2, 1, 1, 1, 1) * other * lam, self.full)
            offset = np.broadcast_to(np.array([0.0, 1.0]).reshape(2, 1, 1, 1, 1) * other * lam, self.full)
            shape = self.fshape
        else:
            other = self.full_first(p)
            coef = np.broadcast_to(sign.reshape(1, 2, 1, 1, 1) * other * lam, self.full)
            offset = np.broadcast_to(np.array([0.0, 1.0]).reshape(1, 2, 1, 1, 1) * other * lam, self.full)
            shape = self.gshape
        cols = np.broadcast_to(np.arange(int(np.prod(shape))).reshape(shape), self.full)
        matrix = np.zeros((rows.size // self.n_lambda, int(np.prod(shape))))
        np.add.at(matrix, (rows.ravel(), cols.ravel()), coef.ravel())
        return offset.sum(axis=-1).ravel(), matrix

    def set_block(self, p: Point, block: str, values: np.ndarray) -> Point:
        q = p.copy()
        if block == LAMBDA:
            q.weights = values / values.max()
        elif block == ALPHA:
            q.first = values.reshape(self.fshape)
        else:
            q.second = values.reshape(self.gshape)
        return q

    def block_bounds(self, block: str, n: int) -> list:
        if block == LAMBDA:
            return [(self.weight_floor / (self.weight_floor + self.n_lambda - 1), 1.0)] * n
        return [(0.0, 1.0)] * n

    def snap(self, p: Point, level: float) -> Point:
        q = p.copy()
        for name in ("first", "second"):
            t = getattr(q, name)
            t = np.clip(t, 0.0, 1.0)
            if level:
                t = np.where(t < level, 0.0, np.where(t > 1 - level, 1.0, t))
            setattr(q, name, t)
        return q

    def snapped(self, p: Point, cap: float) -> Point | None:
        """First snapping of near-deterministic entries that meets the residual tolerance."""
        for level in SNAP_LEVELS:
            q = self.snap(p, level)
            if self.residual(q, cap) < RESIDUAL_TOL:
                return q
        return None


def mixture(parts: list[tuple[float, JointDistribution]], prefixes: str = "vgxyz") -> JointDistribution:
    """Weighted mixture of distributions on disjoint relabeled hidden states."""
    first = parts[0][1]
    labels, blocks = [], []
    for k, (t, P) in enumerate(parts):
        if P.space.a_settings != first.space.a_settings or P.space.b_settings != first.space.b_settings:
            raise UsageError("mixtures need identical setting grids")
        labels += [f"{prefixes[k % len(prefixes)]}{k}.{lam}" for lam in P.space.lambda_values]
        blocks.append(t * np.asarray(P.to_float().weights, dtype=float))
    weights = np.concatenate(blocks, axis=-1)
    weights = weights / weights.sum()
    return JointDistribution(first.space.with_lambdas(labels), weights, exact=False)


def outcome_variation(P: JointDistribution, form: ProductForm) -> float:
    """Largest change of the form's first factor when only the distant outcome flips."""
    target, conditioners = form.first_factor()
    other = BETA if target == ALPHA else ALPHA
    cond, mass = _factor(P.weights, target, conditioners | {other})
    axis = 1 if other == BETA else 0
    plus = np.take(cond, [0], axis=axis)
    minus = np.take(cond, [1], axis=axis)
    ok = (np.take(mass, [0], axis=axis) > 0) & (np.take(mass, [1], axis=axis) > 0)
    diff = np.abs(np.asarray(plus - minus, dtype=float))
    diff = np.where(np.broadcast_to(ok, diff.shape), diff, 0.0)
    return float(diff.max()) if diff.size else 0.0


def _seed_sequence(seed, *keys) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed)] + [int(k) for k in keys])


# ---------------------------------------------------------------------------
# feasibility


@dataclass
class FeasibilityResult:
    class_id: ClassId
    regime: AssumptionRegime
    status: str
    witness: JointDistribution | None
    restarts: int
    feasible_points: int
    best_residual: float
    classes_found: dict = field(default_factory=dict)
    max_outcome_variation: float = 0.0
    variations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "class": str(self.class_id),
            "regime": self.regime.name,
            "status": self.status,
            "restarts": self.restarts,
            "feasible_points": self.feasible_points,
            "best_residual": self.best_residual,
            "classes_found": {str(k): v for k, v in sorted(self.classes_found.items())},
            "max_outcome_variation": self.max_outcome_variation,
        }


def _descend(model: FormModel, rng: np.random.Generator, cap: float) -> Point:
    x0 = model.pack(model.random_point(rng))
    res = minimize(
        model.penalty,
        x0,
        args=(cap,),
        jac=True,
        method="L-BFGS-B",
        bounds=model.bounds(),
        options={"maxiter": 3000, "ftol": 0.0, "gtol": 1e-16},
    )
    return model.unpack(res.x)


def _jitter(model: FormModel, p: Point, rng: np.random.Generator, delta_max: float) -> Point:
    """Move part way toward a random interior point while the constraints keep some slack.

    Bound-constrained descent stops on faces where some table entries are
    exactly 0 or 1, which can make smaller forms valid by accident.
    """
    r = model.random_point(rng)
    for s in (0.1, 0.03, 0.01, 0.003, 0.001, 3e-4, 1e-4, 3e-5, 1e-5, 1e-6):
        q = Point(
            (1 - s) * p.weights + s * r.weights,
            (1 - s) * p.first + s * r.first,
            (1 - s) * p.second + s * r.second,
        )
        if model.residual(q, 0.9 * delta_max) == 0.0:
            return q
    return p


def _descent_cap(regime: AssumptionRegime) -> float:
    # aim inside the allowed region so that the final point has slack
    return 0.5 * float(regime.delta_max)


def feasibility_search(
    target,
    regime: AssumptionRegime,
    space: VariableSpace | None = None,
    seed: int = 0,
    restarts: int = 100,
    stop_at_witness: bool = True,
    weight_floor: float = 0.05,
) -> FeasibilityResult:
    """Random-restart descent on the squared constraint excess of one form.

    Feasible points are classified; the witness is the first feasible point
    of exactly the target class, or a mixture of feasible points over
    disjoint hidden labels (at most eight labels) whose class is the target.
    If feasible points exist but none and no such mixture reaches the target
    class, the form reduces under the regime.
    """
    form = _alpha_form(target)
    space = space or desk_space()
    model = FormModel(form, space, weight_floor)
    cap = _descent_cap(regime)
    ss = _seed_sequence(seed, form.index, 0 if regime.strict else 1)
    result = FeasibilityResult(form.class_id, regime, INFEASIBLE, None, 0, 0, np.inf)
    pool: list[JointDistribution] = []
    for child in ss.spawn(restarts):
        result.restarts += 1
        rng = np.random.default_rng(child)
        p = _descend(model, rng, cap)
        result.best_residual = min(result.best_residual, model.residual(p, float(regime.delta_max)))
        q = model.snapped(p, float(regime.delta_max))
        if q is None:
            continue
        if not regime.strict:
            q = _jitter(model, q, rng, float(regime.delta_max))
        P = model.distribution(q)
        if regime.residual(P) >= RESIDUAL_TOL:
            continue
        result.best_residual = min(result.best_residual, regime.residual(P))
        result.feasible_points += 1
        variation = outcome_variation(P, form)
        result.variations.append(variation)
        result.max_outcome_variation = max(result.max_outcome_variation, variation)
        cls = classification(P, Partition.ALPHA, CLASSIFY_TOL).class_id.index
        result.classes_found[cls] = result.classes_found.get(cls, 0) + 1
        if result.witness is None:
            if cls == form.index:
                result.witness = P
            else:
                pool = _grow_pool(pool, P, form)
                if pool and classification(mixture([(1.0, Q) for Q in pool]), Partition.ALPHA, CLASSIFY_TOL).class_id.index == form.index:
                    result.witness = mixture([(1.0, Q) for Q in pool])
        if result.witness is not None and stop_at_witness:
            break
    if result.witness is not None:
        result.status = WITNESS
    elif result.feasible_points:
        result.status = REDUCES
    return result


def _valid_set(P: JointDistribution) -> frozenset:
    return frozenset(classification(P, Partition.ALPHA, CLASSIFY_TOL).valid)


def _grow_pool(pool: list, P: JointDistribution, form: ProductForm) -> list:
    """Add P when it removes a spurious valid form and the label budget allows."""
    labels = sum(Q.space.shape[4] for Q in pool)
    if labels + P.space.shape[4] > MAX_LAMBDA:
        return pool
    if not pool:
        return [P]
    current = frozenset.intersection(*(_valid_set(Q) for Q in pool))
    if current & _valid_set(P) < current:
        return pool + [P]
    return pool


# ---------------------------------------------------------------------------
# maximal violation


@dataclass
class MaxViolationResult:
    class_id: ClassId
    regime: AssumptionRegime
    restarts: int
    best_margin: float
    best_point: JointDistribution | None
    best_generalized_margin: float = -np.inf
    report: InequalityReport | None = None
    witness: JointDistribution | None = None
    witness_margin: float | None = None
    witness_residual: float | None = None
    feasible_runs: int = 0

    def to_dict(self) -> dict:
        return {
            "class": str(self.class_id),
            "regime": self.regime.name,
            "restarts": self.restarts,
            "feasible_runs": self.feasible_runs,
            "best_margin": self.best_margin,
            "best_generalized_margin": self.best_generalized_margin,
            "witness_margin": self.witness_margin,
            "witness_residual": self.witness_residual,
        }


def _solve_block(model: FormModel, p: Point, block: str, cap: float, phase: int) -> Point | None:
    offset, matrix = model.linear_block(p, block)
    n = matrix.shape[1]
    a_con = model.constraints @ matrix
    b_con = cap - model.constraints @ offset
    bounds = model.block_bounds(block, n)
    a_eq = b_eq = None
    if block == LAMBDA:
        a_eq, b_eq = np.ones((1, n)), np.ones(1)
    opts = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
    if phase == 1:
        m = a_con.shape[0]
        c = np.concatenate([np.zeros(n), np.ones(m)])
        a_ub = np.hstack([a_con, -np.eye(m)])
        bounds = bounds + [(0.0, None)] * m
        if a_eq is not None:
            a_eq = np.hstack([a_eq, np.zeros((1, m))])
        res = linprog(c, A_ub=a_ub, b_ub=b_con, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs", options=opts)
        values = res.x[:n] if res.status == 0 else None
    else:
        c = -(model.objective @ matrix)
        res = linprog(c, A_ub=a_con, b_ub=b_con, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs", options=opts)
        values = res.x if res.status == 0 else None
    if values is None:
        return None
    if block != LAMBDA:
        values = np.clip(values, 0.0, 1.0)
    return model.set_block(p, block, values)


def _seesaw(model: FormModel, p: Point, cap: float, rounds: int = 40) -> Point | None:
    """Alternating linear programs: drive the constraint excess to zero, then raise the margin."""
    feasible = model.residual(p, cap) < 1e-13
    for _ in range(rounds):
        for block in (ALPHA, BETA, LAMBDA):
            if feasible:
                break
            q = _solve_block(model, p, block, cap, phase=1)
            if q is not None:
                p = q
            feasible = model.residual(p, cap) < 1e-13
    if not feasible:
        return None
    last = model.margin(p)
    for _ in range(rounds):
        for block in (ALPHA, BETA, LAMBDA):
            q = _solve_block(model, p, block, cap, phase=2)
            if q is not None and model.residual(q, cap) <= model.residual(p, cap) + 1e-12:
                p = q
        now = model.margin(p)
        if now - last < 1e-10:
            break
        last = now
    return p


def _caps(regime: AssumptionRegime, restart: int) -> float:
    if regime.strict:
        return 0.0
    # cycle through tighter deviation budgets so that small-eps points are probed too
    return float(regime.delta_max) * (1.0, 0.1, 0.01, 0.0)[restart % 4] * (1 - 1e-6)


def max_violation_search(
    target,
    regime: AssumptionRegime,
    space: VariableSpace | None = None,
    seed: int = 0,
    restarts: int = 100,
    stop_margin: float | None = None,
    blend: float = 0.9,
    weight_floor: float = 0.05,
    need_witness: bool = True,
) -> MaxViolationResult:
    """Largest usual-inequality margin found over feasible points of one form.

    Each restart runs a see-saw of linear programs over the first table, the
    second table and P(λ) in turn. The best point is then mixed with a
    generic feasible point of the target class (weight ``blend`` on the best
    point) so that the witness classifies exactly to the target class.
    ``best_generalized_margin`` evaluates the corrected inequality at each
    point's own eps.
    """
    form = _alpha_form(target)
    space = space or desk_space()
    model = FormModel(form, space, weight_floor)
    if model.objective is None:
        raise UsageError("the space lacks the settings a = 0, 30 and b = 30, 60 of the Wigner triple")
    ss = _seed_sequence(seed, form.index, 2 if regime.strict else 3)
    result = MaxViolationResult(form.class_id, regime, 0, -np.inf, None)
    best = None
    for k, child in enumerate(ss.spawn(restarts)):
        result.restarts += 1
        cap = _caps(regime, k)
        rng = np.random.default_rng(child)
        p = _seesaw(model, model.random_point(rng), cap)
        if p is None:
            continue
        p = model.snapped(p, float(regime.delta_max))
        if p is None:
            continue
        P = model.distribution(p)
        if regime.residual(P) >= RESIDUAL_TOL:
            continue
        result.feasible_runs += 1
        triple = triple_from(P)
        margin = float(usual_wbi(triple).margin)
        if not regime.strict:
            eps = _epsilon(P)
            if eps < 1:
                gen = float(generalized_wbi(triple, eps).margin)
                result.best_generalized_margin = max(result.best_generalized_margin, gen)
        if margin > result.best_margin:
            result.best_margin, best = margin, P
        if stop_margin is not None and result.best_margin > stop_margin:
            break
    result.best_point = best
    if best is None:
        return result
    result.report = usual_wbi(triple_from(best))
    if need_witness:
        _attach_witness(result, form, regime, space, seed, blend, weight_floor)
    return result


def _epsilon(P: JointDistribution) -> float:
    return deviation_profile(P).epsilon


def _attach_witness(result, form, regime, space, seed, blend, weight_floor) -> None:
    best = result.best_point
    if classification(best, Partition.ALPHA, CLASSIFY_TOL).class_id.index == form.index:
        witness = best
    else:
        generic = feasibility_search(form, regime, space, seed, restarts=100, weight_floor=weight_floor)
        if generic.witness is None:
            return
        witness = mixture([(blend, best), (1 - blend, generic.witness)])
        if classification(witness, Partition.ALPHA, CLASSIFY_TOL).class_id.index != form.index:
            return
    result.witness = witness
    result.witness_margin = float(usual_wbi(triple_from(witness)).margin)
    result.witness_residual = regime.residual(witness)
