"""Constructors against tables transcribed by hand from the worked examples."""

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from belltax.constructors import (
    QuantumConfig,
    construct,
    derive_class_variant,
    h10_nearly_perfect_example,
    h10_violating_example,
    h14_violating_example,
    h29_perfect_example,
    quantum_distribution,
)
from belltax.inequalities import triple_from, usual_wbi
from belltax.probcore import DomainError, UsageError, check_autonomy, deviation_profile
from belltax.taxonomy import swap_outcome_roles, swap_settings

# (alpha, beta, a, b, lambda) -> p; every other cell is 0
H29_TABLE = {}
for lam, flip in (("l1", False), ("l2", True)):
    for a, b, signs in ((0, 0, "--"), (0, 90, "-+"), (90, 0, "+-"), (90, 90, "++")):
        if flip:
            signs = "".join("+" if s == "-" else "-" for s in signs)
        H29_TABLE[(signs[0], signs[1], a, b, lam)] = F(1, 8)

H14_TABLE = {
    ("-", "+", 0, 30, "l1"): F(1, 32), ("-", "-", 0, 30, "l1"): F(3, 32),
    ("-", "+", 0, 60, "l1"): F(3, 32), ("-", "-", 0, 60, "l1"): F(1, 32),
    ("-", "-", 30, 30, "l1"): F(1, 8),
    ("-", "+", 30, 60, "l1"): F(1, 32), ("-", "-", 30, 60, "l1"): F(3, 32),
    ("+", "+", 0, 30, "l2"): F(3, 32), ("+", "-", 0, 30, "l2"): F(1, 32),
    ("+", "+", 0, 60, "l2"): F(1, 32), ("+", "-", 0, 60, "l2"): F(3, 32),
    ("+", "+", 30, 30, "l2"): F(1, 8),
    ("+", "+", 30, 60, "l2"): F(3, 32), ("+", "-", 30, 60, "l2"): F(1, 32),
}


def h10_table(d):
    """Closed-form cells of the nearly perfect outcome-dependent example, i = 0, i⊥ = 90."""
    big = (1 - 4 * d) / (8 * (1 - 2 * d))
    sq = d * d / (2 * (1 - 2 * d))
    main = (1 - 2 * d) / 8
    q = d / 4
    t = {}
    par, perp = ((0, 0), (90, 90)), ((0, 90), (90, 0))
    for a, b in par:
        t[("+", "-", a, b, "l1")] = q
        t[("-", "-", a, b, "l1")] = main
        t[("+", "+", a, b, "l2")] = main
        t[("-", "+", a, b, "l2")] = q
    for a, b in perp:
        t[("-", "+", a, b, "l1")] = big
        t[("+", "-", a, b, "l1")] = sq
        t[("-", "-", a, b, "l1")] = q
        t[("+", "+", a, b, "l2")] = q
        t[("-", "+", a, b, "l2")] = sq
        t[("+", "-", a, b, "l2")] = big
    return t


def assert_matches(P, table):
    seen = dict(P.cells(nonzero=True))
    assert seen == {k: v for k, v in table.items() if v != 0}


def test_h29_matches_table():
    P = h29_perfect_example()
    assert P.exact
    assert_matches(P, H29_TABLE)


def test_h14_matches_table():
    P = h14_violating_example()
    assert P.exact
    assert_matches(P, H14_TABLE)


@pytest.mark.parametrize("delta", [F(1, 1000), F(1, 100)])
def test_h10_matches_closed_form(delta):
    assert_matches(h10_nearly_perfect_example(delta), h10_table(delta))


def test_h10_deviation_is_two_cells():
    prof = deviation_profile(h10_nearly_perfect_example(F(1, 1000)))
    assert set(prof.deltas) == {F(2, 1000)}


@pytest.mark.parametrize("delta", [F(1, 1000), F(1, 100), F(1, 9)])
def test_h10_violating_triple_is_quantum(delta):
    P = h10_violating_example(delta)
    assert triple_from(P).as_tuple() == (F(3, 8), F(1, 8), F(1, 8))
    assert deviation_profile(P).max_delta == 2 * delta
    assert check_autonomy(P, 0)


def test_quantum_statistics_exact():
    P = quantum_distribution()
    assert P.exact
    assert usual_wbi(triple_from(P)).margin == F(1, 8)
    prof = deviation_profile(P)
    assert set(prof.deltas) == {0}


def test_quantum_partial_entanglement_is_float():
    P = quantum_distribution(QuantumConfig(p=0.3))
    assert not P.exact
    assert check_autonomy(P)
    # with p != 1/2 the statistics at parallel settings still agree perfectly at 0 and 90
    P = quantum_distribution(QuantumConfig((0, 90), (0, 90), 0.3))
    assert float(deviation_profile(P).max_delta) == pytest.approx(0.0, abs=1e-15)


@given(st.floats(0, 1))
def test_quantum_rows_normalized(p):
    P = quantum_distribution(QuantumConfig(p=p))
    assert float(P.weights.sum()) == pytest.approx(1.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        h10_nearly_perfect_example(F(1, 4))
    with pytest.raises(DomainError):
        h10_violating_example(F(1, 8))
    with pytest.raises(DomainError):
        QuantumConfig(p=2)
    with pytest.raises(DomainError):
        quantum_distribution(QuantumConfig(p=0.3), exact=True)


def test_construct_dispatch():
    assert construct("h29-perfect") == h29_perfect_example()
    assert construct("h10-violating", delta=F(1, 100)) == h10_violating_example(F(1, 100))
    with pytest.raises(UsageError):
        construct("h10-violating")
    with pytest.raises(UsageError):
        construct("nope")


def test_variants():
    P = h29_perfect_example()
    assert derive_class_variant(P) is P
    assert derive_class_variant(P, "swap-settings") == swap_settings(P)
    assert derive_class_variant(P, "swap-outcome-roles", "swap-outcome-roles") == P
    with pytest.raises(UsageError):
        derive_class_variant(P, "rotate")


def test_h29_extra_directions_keep_perfect_correlations():
    P = h29_perfect_example(extra_directions=(30, 60))
    assert set(deviation_profile(P).deltas) == {0}
    assert np.all(P.weights >= 0)
