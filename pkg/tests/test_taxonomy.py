from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from belltax.constructors import h10_violating_example, h14_violating_example, h29_perfect_example, quantum_distribution
from belltax.factors import random_model
from belltax.inequalities import triple_from
from belltax.probcore import UsageError, VariableSpace
from belltax.taxonomy import (
    FORM_BITS,
    ClassId,
    Partition,
    Strength,
    all_forms,
    class_table,
    classification,
    classify,
    flip_outcomes,
    form_key,
    form_of,
    form_valid_for,
    mirror_to_beta,
    pbc_holds,
    reflect_settings,
    strength_of,
    swap_outcome_roles,
    swap_settings,
)
from belltax.verifier import desk_space

GRID = VariableSpace((0, 30, 60, 90, 120, 150), (0, 30, 60, 90, 120, 150), ("l1", "l2", "l3"))


def test_form_table_is_a_bijection():
    assert len(set(FORM_BITS)) == 32
    assert form_of(1).count == 5 and form_of(32).count == 0
    assert [form_of(i).index for i in range(1, 33)] == list(range(1, 33))


def test_form_key_is_total_and_ordered_by_index():
    keys = [form_key(f) for f in all_forms()]
    assert len(set(keys)) == 32
    assert sorted(f.count for f in all_forms()) == sorted(sum(bits) for bits in FORM_BITS)


def test_named_forms():
    assert form_of(16).describe() == "P(α|βaλ)·P(β|bλ)"
    assert form_of(29).describe() == "P(α|aλ)·P(β|bλ)"
    assert form_of(14).describe() == "P(α|λ)·P(β|baλ)"
    assert form_of(16, "beta").describe() == "P(β|αbλ)·P(α|aλ)"


def test_strength_groups():
    assert [strength_of(i) for i in (1, 14, 15, 28, 29, 32)] == [
        Strength.STRONGLY_NONLOCAL,
        Strength.STRONGLY_NONLOCAL,
        Strength.WEAKLY_NONLOCAL,
        Strength.WEAKLY_NONLOCAL,
        Strength.LOCAL,
        Strength.LOCAL,
    ]
    # strongly non-local exactly when a factor conditions on both settings
    for f in all_forms():
        both = any({"a", "b"} <= vars_ for vars_ in (f.first_factor()[1], f.second_factor()[1]))
        assert both == (strength_of(f.index) is Strength.STRONGLY_NONLOCAL)
    assert len(class_table()) == 32


def test_class_id_parse():
    assert ClassId.parse("H16a") == ClassId(16, Partition.ALPHA)
    assert ClassId.parse("h7beta") == ClassId(7, Partition.BETA)
    assert str(ClassId.parse("22")) == "H22a"
    for bad in ("H33a", "H0", "X5", ""):
        with pytest.raises(UsageError):
            ClassId.parse(bad)


def test_known_distributions():
    assert classify(quantum_distribution(), tol=0) == ClassId(7)
    assert classify(h29_perfect_example(), tol=0) == ClassId(29)
    assert classify(h14_violating_example(), tol=0) == ClassId(14)
    assert classify(h10_violating_example(Fraction(1, 1000)), tol=0) == ClassId(10)
    assert classify(swap_settings(h29_perfect_example()), tol=0) == ClassId(22)
    assert pbc_holds(quantum_distribution())
    assert not pbc_holds(h29_perfect_example())


def test_tie_prefers_form_without_distant_outcome():
    # beta is a deterministic function of b, so conditioning alpha on b or on beta is the same
    from belltax.factors import build_model

    space = VariableSpace((0, 90), (0, 90), ("l1",))
    first = np.array([[0.2, 0.7], [0.4, 0.9]]).reshape(1, 1, 2, 2, 1).transpose(0, 1, 3, 2, 4)
    second = np.array([1.0, 0.0]).reshape(1, 1, 1, 2, 1)
    P = build_model(space, form_of(9), [1.0], first, second)
    c = classification(P)
    assert c.class_id == ClassId(9)
    assert c.tie and 16 in c.tied_with
    assert "tie" in str(c)


@pytest.mark.parametrize("index", range(1, 33))
def test_generic_model_lands_in_its_own_class(index):
    rng = np.random.default_rng(index)
    P = random_model(form_of(index), GRID, rng)
    assert classify(P) == ClassId(index)


@given(st.integers(1, 32), st.integers(0, 2**32 - 1))
def test_valid_for_own_form_and_every_coarser_form(index, seed):
    P = random_model(form_of(index), GRID, np.random.default_rng(seed))
    form = form_of(index)
    for other in all_forms():
        if other.first >= form.first and other.second >= form.second:
            assert form_valid_for(P, other)


@given(st.integers(1, 32), st.integers(0, 2**32 - 1))
def test_outcome_role_swap_exchanges_partitions(index, seed):
    P = random_model(form_of(index), GRID, np.random.default_rng(seed))
    Q = swap_outcome_roles(P)
    assert classify(Q, "beta") == classify(P, "alpha").__class__(index, Partition.BETA)
    assert classify(swap_outcome_roles(Q), "alpha") == ClassId(index)


@given(st.integers(1, 32), st.integers(0, 2**32 - 1))
def test_mirror_maps_alpha_class_to_beta_and_keeps_margin(index, seed):
    P = random_model(form_of(index), desk_space(3), np.random.default_rng(seed))
    M = mirror_to_beta(P)
    assert classify(M, "beta") == ClassId(index, Partition.BETA)
    t, u = triple_from(P), triple_from(M)
    assert u.p13 == pytest.approx(t.p13)
    assert (u.p12, u.p23) == pytest.approx((t.p23, t.p12))


@given(st.integers(1, 32), st.integers(0, 2**32 - 1))
def test_flip_and_reflection_preserve_class(index, seed):
    P = random_model(form_of(index), desk_space(2), np.random.default_rng(seed))
    assert classify(flip_outcomes(P)) == ClassId(index)
    assert classify(reflect_settings(P)) == ClassId(index)


def test_reflection_needs_symmetric_grid():
    with pytest.raises(UsageError):
        reflect_settings(h14_violating_example())
    with pytest.raises(UsageError):
        swap_settings(quantum_distribution(a_settings=(0, 30), b_settings=(0,)))
