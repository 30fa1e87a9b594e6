import numpy as np
import pytest

from belltax.constructors import h29_perfect_example
from belltax.factors import random_model
from belltax.inequalities import triple_from, usual_wbi
from belltax.probcore import UsageError
from belltax.taxonomy import ClassId, classify, form_of
from belltax.verifier import (
    INFEASIBLE,
    REDUCES,
    STRICT,
    WITNESS,
    desk_space,
    feasibility_search,
    max_violation_search,
    mixture,
    nearly,
    outcome_variation,
)
from belltax.verifier.search import FormModel


def test_local_form_has_strict_witness():
    r = feasibility_search(29, STRICT, restarts=20)
    assert r.status == WITNESS
    assert classify(r.witness, tol=1e-9) == ClassId(29)
    assert STRICT.residual(r.witness) < 1e-10


def test_missing_setting_form_finds_nothing():
    r = feasibility_search(26, STRICT, restarts=10)
    assert r.status == INFEASIBLE
    assert r.feasible_points == 0 and r.best_residual > 0.1


def test_outcome_dependent_form_collapses_under_strict():
    r = feasibility_search(16, STRICT, restarts=20, stop_at_witness=False)
    assert r.status == REDUCES
    assert r.feasible_points > 0
    assert r.max_outcome_variation <= 1e-6
    assert 16 not in r.classes_found


def test_outcome_dependent_form_survives_near_perfection():
    regime = nearly(1e-3)
    r = feasibility_search(16, regime, restarts=40)
    assert r.status == WITNESS
    assert classify(r.witness, tol=1e-9) == ClassId(16)
    assert regime.residual(r.witness) < 1e-10


def test_search_is_deterministic():
    a = feasibility_search(22, STRICT, restarts=5, seed=7)
    b = feasibility_search(22, STRICT, restarts=5, seed=7)
    assert a.to_dict() == b.to_dict()
    assert a.witness == b.witness


def test_strongly_nonlocal_form_violates():
    r = max_violation_search(14, STRICT, restarts=8, stop_margin=0.5)
    assert r.best_margin > 0.5
    assert classify(r.witness, tol=1e-9) == ClassId(14)
    assert r.witness_margin == pytest.approx(float(usual_wbi(triple_from(r.witness)).margin))
    assert r.witness_residual < 1e-10


def test_local_form_cannot_violate_under_strict():
    r = max_violation_search(29, STRICT, restarts=20, need_witness=False)
    assert r.feasible_runs > 0
    assert r.best_margin <= 1e-9


def test_local_form_under_near_perfection_has_small_usual_margin():
    # the usual inequality can be exceeded by about delta, the corrected one cannot
    delta = 1e-3
    r = max_violation_search(29, nearly(delta), restarts=20, need_witness=False)
    assert 0 < r.best_margin <= delta * (1 + 1e-6)
    assert r.best_generalized_margin <= 0


def test_objective_needs_triple_settings():
    space = desk_space(2, angles=(0, 90))
    with pytest.raises(UsageError):
        max_violation_search(14, STRICT, space=space, restarts=1)


def test_mixture_relabels_and_keeps_class():
    P = h29_perfect_example(extra_directions=(30, 60, 120, 150))
    Q = mixture([(1.0, P), (1.0, P)])
    assert len(Q.space.lambda_values) == 4
    assert classify(Q, tol=0) == ClassId(29)
    assert np.isclose(float(Q.weights.sum()), 1.0)


def test_outcome_variation_zero_without_outcome():
    P = random_model(form_of(16), desk_space(2), np.random.default_rng(0))
    assert outcome_variation(P, form_of(16)) > 1e-3
    P = random_model(form_of(29), desk_space(2), np.random.default_rng(0))
    assert outcome_variation(P, form_of(16)) < 1e-12


def test_penalty_gradient_matches_finite_differences():
    model = FormModel(form_of(10), desk_space(2))
    rng = np.random.default_rng(4)
    x = model.pack(model.random_point(rng))
    value, grad = model.penalty(x, 1e-3)
    h = 1e-7
    for k in rng.choice(len(x), 8, replace=False):
        e = np.zeros_like(x)
        e[k] = h
        fd = (model.penalty(x + e, 1e-3)[0] - model.penalty(x - e, 1e-3)[0]) / (2 * h)
        assert fd == pytest.approx(grad[k], rel=1e-4, abs=1e-8)
