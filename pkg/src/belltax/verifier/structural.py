"""Inconsistency and reduction arguments that need no numerical search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..probcore import A, B, DomainError
from ..taxonomy import DISTANT, LOCAL, OUTCOME, Partition, ProductForm, form_of

# Three-valued probabilities: 0, strictly between 0 and 1, and 1.
ZERO, MID, ONE = 0, 1, 2
_LEVELS = (ZERO, MID, ONE)


def _complement(level: int) -> int:
    return 2 - level


def _alpha_form(form: ProductForm) -> ProductForm:
    return form if form.partition is Partition.ALPHA else form_of(form.index, Partition.ALPHA)


@dataclass(frozen=True)
class MissingSettingProof:
    """A form without one of the settings cannot meet both correlation constraints.

    If the form never conditions on ``missing``, P(αβ | a b) does not depend on
    it. Take a direction d and the pairs (d, d) and (d, d⊥) that differ only in
    the missing setting: the disagreeing mass of the first plus the agreeing
    mass of the second is then the total mass 1, yet both are at most delta.
    """

    form: ProductForm
    missing: str
    delta: object

    @property
    def statement(self) -> str:
        fixed = B if self.missing == A else A
        return (
            f"{self.form.class_id}: {self.form.describe()} ignores setting {self.missing}; "
            f"fixing {fixed} = d, P(disagree | parallel) + P(agree | perpendicular) = 1 "
            f"> 2 delta = {2 * float(self.delta):g}"
        )


def missing_setting_inconsistency(form: ProductForm, delta=0):
    """A proof object when ``form`` ignores a setting and delta < 1/2, else None."""
    if delta < 0:
        raise DomainError(f"delta must be nonnegative, got {delta}")
    if delta * 2 >= 1:
        return None
    used = form.settings_used()
    for setting in (A, B):
        if setting not in used:
            return MissingSettingProof(form, setting, delta)
    return None


def reduction_applies(form: ProductForm) -> bool:
    """Outcome in the first factor, at most one setting there, both settings overall."""
    f = _alpha_form(form)
    return (
        OUTCOME in f.first
        and len(f.first & {DISTANT, LOCAL}) <= 1
        and f.settings_used() == frozenset({A, B})
    )


@dataclass(frozen=True)
class ReductionProof:
    """Under exact perfect correlation the distant outcome drops from the first factor.

    Every three-valued assignment of the factor tables on the settings
    {d, d⊥} of both wings that satisfies the product-zero constraints makes
    P(α | β+ ...) and P(α | β- ...) equal and deterministic, with both values
    of β carrying mass.
    """

    form: ProductForm
    reduced: ProductForm
    assignments: int
    consistent: int

    @property
    def statement(self) -> str:
        return (
            f"{self.form.class_id} -> {self.reduced.class_id}: {self.consistent} of "
            f"{self.assignments} three-valued assignments are consistent and all "
            "make the first factor independent of the distant outcome"
        )


def _first_cells(form: ProductForm) -> list[tuple]:
    """(beta, a, b) argument tuples of the first factor; None marks an absent argument."""
    betas = (0, 1)
    a_vals = (0, 1) if LOCAL in form.first else (None,)
    b_vals = (0, 1) if DISTANT in form.first else (None,)
    return list(itertools.product(betas, a_vals, b_vals))


def _second_cells(form: ProductForm) -> list[tuple]:
    a_vals = (0, 1) if DISTANT in form.second else (None,)
    b_vals = (0, 1) if LOCAL in form.second else (None,)
    return list(itertools.product(a_vals, b_vals))


def _key(a_used, b_used, a, b):
    return (a if a_used else None, b if b_used else None)


def _consistent(form, f, g) -> bool:
    """Product-zero constraints on the four pairs over {d, d⊥} (index 0 = d, 1 = d⊥)."""
    fa, fb = LOCAL in form.first, DISTANT in form.first
    ga, gb = DISTANT in form.second, LOCAL in form.second
    for a, b in itertools.product((0, 1), repeat=2):
        forbidden = ((0, 1), (1, 0)) if a == b else ((0, 0), (1, 1))
        for alpha, beta in forbidden:
            g_plus = g[_key(ga, gb, a, b)]
            g_level = g_plus if beta == 0 else _complement(g_plus)
            f_plus = f[(beta,) + _key(fa, fb, a, b)]
            f_level = f_plus if alpha == 0 else _complement(f_plus)
            if g_level != ZERO and f_level != ZERO:
                return False
    return True


def _beta_irrelevant(form, f, g) -> bool:
    fa, fb = LOCAL in form.first, DISTANT in form.first
    ga, gb = DISTANT in form.second, LOCAL in form.second
    for _, a, b in _first_cells(form)[: len(_first_cells(form)) // 2]:
        # beta mass given the first factor's setting, pooled over the other setting
        pairs = [
            (x, y)
            for x, y in itertools.product((0, 1), repeat=2)
            if (a is None or x == a) and (b is None or y == b)
        ]
        plus_mass = any(g[_key(ga, gb, x, y)] != ZERO for x, y in pairs)
        minus_mass = any(g[_key(ga, gb, x, y)] != ONE for x, y in pairs)
        if not (plus_mass and minus_mass):
            return False
        f_plus, f_minus = f[(0, a, b)], f[(1, a, b)]
        if f_plus != f_minus or f_plus == MID:
            return False
    return True


def reduction_under_strict_perfectness(form: ProductForm):
    """A ReductionProof when strict perfect correlation removes β from the first factor."""
    if not reduction_applies(form):
        return None
    alpha = _alpha_form(form)
    f_cells, g_cells = _first_cells(alpha), _second_cells(alpha)
    total = consistent = 0
    for f_levels in itertools.product(_LEVELS, repeat=len(f_cells)):
        f = dict(zip(f_cells, f_levels))
        for g_levels in itertools.product(_LEVELS, repeat=len(g_cells)):
            g = dict(zip(g_cells, g_levels))
            total += 1
            if not _consistent(alpha, f, g):
                continue
            consistent += 1
            if not _beta_irrelevant(alpha, f, g):
                return None
    if consistent == 0:
        return None
    reduced = form.drop_first(OUTCOME)
    return ReductionProof(form, reduced, total, consistent)
