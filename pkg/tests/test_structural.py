from fractions import Fraction

import pytest

from belltax.probcore import DomainError
from belltax.taxonomy import Partition, form_of
from belltax.verifier import (
    missing_setting_inconsistency,
    reduction_applies,
    reduction_under_strict_perfectness,
)

MISSING = {17, 18, 19, 20, 21, 23, 24, 25, 26, 27, 28, 30, 31, 32}
REDUCTIONS = {4: 11, 5: 12, 10: 14, 15: 22, 16: 29}


@pytest.mark.parametrize("index", range(1, 33))
def test_missing_setting_classes(index):
    proof = missing_setting_inconsistency(form_of(index))
    assert (proof is not None) == (index in MISSING)
    if proof is not None:
        assert proof.missing not in form_of(index).settings_used()
        assert f"H{index}a" in proof.statement


def test_missing_setting_holds_below_half_and_fails_above():
    form = form_of(26)
    assert missing_setting_inconsistency(form, Fraction(1, 1000)) is not None
    assert missing_setting_inconsistency(form, Fraction(499, 1000)) is not None
    assert missing_setting_inconsistency(form, Fraction(1, 2)) is None
    with pytest.raises(DomainError):
        missing_setting_inconsistency(form, -1)


@pytest.mark.parametrize("index", range(1, 33))
def test_reduction_targets(index):
    form = form_of(index)
    proof = reduction_under_strict_perfectness(form) if reduction_applies(form) else None
    if index in REDUCTIONS:
        assert proof is not None
        assert proof.reduced.index == REDUCTIONS[index]
        assert 0 < proof.consistent <= proof.assignments
    else:
        assert proof is None


def test_reduced_form_drops_only_the_outcome():
    for index, reduced in REDUCTIONS.items():
        a, b = form_of(index), form_of(reduced)
        assert a.first - b.first == {"outcome"} and a.second == b.second


def test_beta_partition_mirrors_alpha():
    for index in REDUCTIONS:
        proof = reduction_under_strict_perfectness(form_of(index, Partition.BETA))
        assert proof is not None and proof.reduced.index == REDUCTIONS[index]
        assert str(proof.reduced.class_id).endswith("b")


def test_outcome_in_first_factor_with_both_settings_is_not_reduced():
    # forms 1, 2, 3, 7 keep both settings beside the outcome; the argument says nothing there
    for index in (1, 2, 3, 7):
        assert not reduction_applies(form_of(index))
