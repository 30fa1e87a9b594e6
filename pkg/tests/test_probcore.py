from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from belltax.probcore import (
    UNDEFINED,
    ConfigurationError,
    JointDistribution,
    UsageError,
    VariableSpace,
    check_autonomy,
    conditional,
    deviation_profile,
    is_conditionally_irrelevant,
    marginal,
    normalize_angle,
)

SPACE = VariableSpace((0, 90), (0, 90), ("l1", "l2"))


def random_distribution(seed, space=SPACE):
    w = np.random.default_rng(seed).random(space.shape)
    return JointDistribution(space, w / w.sum(), exact=False)


def test_rejects_bad_totals():
    with pytest.raises(UsageError):
        JointDistribution(SPACE, np.full(SPACE.shape, 0.1), exact=False)
    w = np.full(SPACE.shape, Fraction(1, 32), dtype=object)
    w[0, 0, 0, 0, 0] = Fraction(-1, 32)
    with pytest.raises(UsageError):
        JointDistribution(SPACE, w, exact=True)


def test_float_sum_tolerance_is_tight():
    w = np.full(SPACE.shape, 1 / 32)
    w[0, 0, 0, 0, 0] += 1e-11
    with pytest.raises(UsageError):
        JointDistribution(SPACE, w, exact=False)


def test_angles_normalize_mod_180():
    assert normalize_angle(270) == 90
    assert normalize_angle(-30) == 150
    assert VariableSpace((180,), (0,), ("x",)).a_settings == (0,)


def test_duplicate_settings_rejected():
    with pytest.raises(UsageError):
        VariableSpace((0, 180), (0,), ("x",))


def test_weights_are_read_only():
    P = random_distribution(1)
    with pytest.raises(ValueError):
        P.weights[0, 0, 0, 0, 0] = 0.5


def test_exact_uniform_conditional():
    w = np.full(SPACE.shape, Fraction(1, 32), dtype=object)
    P = JointDistribution(SPACE, w, exact=True)
    cond = conditional(P, ["alpha"], {"a": 0, "lambda": "l1"})
    assert cond["+"] == Fraction(1, 2)
    assert check_autonomy(P, 0)


def test_conditional_on_zero_mass_is_undefined():
    cells = {("+", "+", 0, 0, "l1"): Fraction(1)}
    P = JointDistribution.from_cells(SPACE, cells)
    assert conditional(P, ["alpha"], {"a": 90}) is UNDEFINED


def test_conditional_argument_errors():
    P = random_distribution(2)
    with pytest.raises(UsageError):
        conditional(P, ["alpha"], {"alpha": "+"})
    with pytest.raises(UsageError):
        marginal(P, [])


def test_deviation_profile_counts_both_mismatch_cells():
    # perfect correlation at (0,0), anti-correlation at (0,90), one mismatch cell of 1/10 each
    cells = {}
    for a in (0, 90):
        for b in (0, 90):
            agree = a == b
            good = [("+", "+"), ("-", "-")] if agree else [("+", "-"), ("-", "+")]
            bad = [("+", "-"), ("-", "+")] if agree else [("+", "+"), ("-", "-")]
            cells[(*good[0], a, b, "l1")] = Fraction(1, 4) * Fraction(9, 20)
            cells[(*good[1], a, b, "l1")] = Fraction(1, 4) * Fraction(9, 20)
            cells[(*bad[0], a, b, "l1")] = Fraction(1, 4) * Fraction(1, 10)
    P = JointDistribution.from_cells(SPACE, cells)
    prof = deviation_profile(P)
    assert prof.parallel[(0, 0)] == Fraction(1, 10)
    assert prof.perpendicular[(0, 90)] == Fraction(1, 10)
    assert prof.epsilon == pytest.approx(0.1 ** (1 / 3))


def test_deviation_needs_constrained_pair():
    space = VariableSpace((0,), (30,), ("x",))
    P = JointDistribution.from_cells(space, {("+", "+", 0, 30, "x"): 1})
    with pytest.raises(ConfigurationError):
        deviation_profile(P)


@given(st.integers(0, 2**32 - 1))
def test_chain_rule(seed):
    P = random_distribution(seed)
    joint = marginal(P, ["alpha", "beta", "a"])
    for a in (0, 90):
        pa = marginal(P, ["a"])[a]
        pab = conditional(P, ["alpha", "beta"], {"a": a})
        pb = conditional(P, ["beta"], {"a": a})
        for alpha in "+-":
            for beta in "+-":
                pa_b = conditional(P, ["alpha"], {"beta": beta, "a": a})
                assert joint[alpha, beta, a] == pytest.approx(pa * pab[alpha, beta])
                assert pab[alpha, beta] == pytest.approx(pa_b[alpha] * pb[beta])


@given(st.integers(0, 2**32 - 1), st.sampled_from(["alpha", "beta", "a", "b", "lambda"]))
def test_marginals_sum_to_one_and_nest(seed, var):
    P = random_distribution(seed)
    m = marginal(P, [var])
    assert float(m.total()) == pytest.approx(1.0)
    two = marginal(P, [var, "lambda" if var != "lambda" else "a"])
    assert np.allclose(two.marginal([var]).values, m.values)


@given(st.integers(0, 2**32 - 1))
def test_irrelevance_of_independent_setting(seed):
    # alpha depends on a and lambda only; b is irrelevant for alpha given a, lambda
    rng = np.random.default_rng(seed)
    pa = rng.random((2, 2))  # P(alpha=+ | a, lambda)
    rest = rng.random((2, 2, 2, 2))  # beta, a, b, lambda
    w = np.empty(SPACE.shape)
    w[0] = pa[None, :, None, :] * rest
    w[1] = (1 - pa)[None, :, None, :] * rest
    P = JointDistribution(SPACE, w / w.sum(), exact=False)
    assert is_conditionally_irrelevant(P, "alpha", "b", ["a", "lambda"])
