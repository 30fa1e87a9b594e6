"""Distributions assembled from alpha-led factor tables.

A model of class form F is given by P(lambda), a table for P(alpha=+ | S1, lambda)
and a table for P(beta=+ | S2, lambda), with uniform settings. Tables are
numpy arrays with five axes ``[alpha, beta, a, b, lambda]`` in which every
axis the factor does not condition on has length one, so broadcasting
expands them to the full grid. Autonomy holds by construction.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .probcore import JointDistribution, UsageError, VariableSpace, uniform_settings_weights
from .taxonomy import DISTANT, LOCAL, OUTCOME, Partition, ProductForm


def first_shape(form: ProductForm, space: VariableSpace) -> tuple[int, ...]:
    """Shape of the P(alpha=+ | ...) table of an alpha-led form."""
    _check_alpha(form)
    n_a, n_b, n_l = space.shape[2:]
    return (
        1,
        2 if OUTCOME in form.first else 1,
        n_a if LOCAL in form.first else 1,
        n_b if DISTANT in form.first else 1,
        n_l,
    )


def second_shape(form: ProductForm, space: VariableSpace) -> tuple[int, ...]:
    """Shape of the P(beta=+ | ...) table of an alpha-led form."""
    _check_alpha(form)
    n_a, n_b, n_l = space.shape[2:]
    return (1, 1, n_a if DISTANT in form.second else 1, n_b if LOCAL in form.second else 1, n_l)


def _check_alpha(form: ProductForm) -> None:
    if form.partition is not Partition.ALPHA:
        raise UsageError("factor tables are defined for alpha-led forms")


def hidden_from_factors(first_plus: np.ndarray, second_plus: np.ndarray) -> np.ndarray:
    """P(alpha beta | a b lambda) from the two tables of P(· = +)."""
    f = np.concatenate([first_plus, 1 - first_plus], axis=0)
    g = np.concatenate([second_plus, 1 - second_plus], axis=1)
    return f * g


def build_model(
    space: VariableSpace,
    form: ProductForm,
    lam_weights,
    first_plus,
    second_plus,
    exact: bool | None = None,
) -> JointDistribution:
    """Joint distribution with uniform settings from factor tables of ``form``."""
    first_plus = np.asarray(first_plus)
    second_plus = np.asarray(second_plus)
    lam = np.asarray(lam_weights)
    if exact is None:
        exact = first_plus.dtype == object
    if first_plus.shape != first_shape(form, space):
        raise UsageError(f"first table shape {first_plus.shape} != {first_shape(form, space)}")
    if second_plus.shape != second_shape(form, space):
        raise UsageError(f"second table shape {second_plus.shape} != {second_shape(form, space)}")
    if lam.shape != (space.shape[4],):
        raise UsageError(f"P(lambda) must have {space.shape[4]} entries")
    if exact:
        cast = np.vectorize(Fraction, otypes=[object])
        first_plus, second_plus, lam = cast(first_plus), cast(second_plus), cast(lam)
    else:
        first_plus, second_plus, lam = (x.astype(float) for x in (first_plus, second_plus, lam))
        lam = lam / lam.sum()
    hidden = hidden_from_factors(first_plus, second_plus)
    weights = uniform_settings_weights(space, exact) * lam.reshape(1, 1, 1, 1, -1) * hidden
    return JointDistribution(space, weights, exact)


def random_model(
    form: ProductForm,
    space: VariableSpace,
    rng: np.random.Generator,
    concentration: float = 1.0,
) -> JointDistribution:
    """P(lambda) from a symmetric Dirichlet draw, factor rows uniform on [0, 1]."""
    lam = rng.dirichlet(np.full(space.shape[4], concentration))
    lam = np.maximum(lam, 1e-12)
    first = rng.uniform(size=first_shape(form, space))
    second = rng.uniform(size=second_shape(form, space))
    return build_model(space, form, lam / lam.sum(), first, second, exact=False)
