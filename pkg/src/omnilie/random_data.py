"""Seeded random scalars and sections for property checks."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from .dercomplex import LForm
from .linebundle import Derivation, Jet1
from .omni import OmniSection
from .scalars import ONE, Chart, Scalar, as_scalar, cos, exp, sin, total


def random_scalar(chart: Chart, rng: np.random.Generator, degree: int = 2, transcendental: bool = True) -> Scalar:
    """Sparse polynomial with small rational coefficients, optionally with one sin/cos/exp factor."""
    coords = chart.coordinates()
    terms = []
    for _ in range(int(rng.integers(1, 4))):
        coeff = Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
        if coeff == 0:
            continue
        t = as_scalar(coeff)
        for _ in range(int(rng.integers(0, degree + 1))):
            t = t * coords[int(rng.integers(len(coords)))]
        terms.append(t)
    f = total(terms)
    if transcendental and rng.random() < 0.4:
        fn = (sin, cos, exp)[int(rng.integers(3))]
        arg = coords[int(rng.integers(len(coords)))]
        f = f + as_scalar(Fraction(int(rng.integers(1, 3)), 2)) * fn(arg)
    return f


def random_derivation(chart: Chart, rng: np.random.Generator, **kw) -> Derivation:
    return Derivation(chart, tuple(random_scalar(chart, rng, **kw) for _ in range(chart.dim)), random_scalar(chart, rng, **kw))


def random_jet(chart: Chart, rng: np.random.Generator, **kw) -> Jet1:
    return Jet1(chart, tuple(random_scalar(chart, rng, **kw) for _ in range(chart.dim)), random_scalar(chart, rng, **kw))


def random_section(chart: Chart, rng: np.random.Generator, **kw) -> OmniSection:
    return OmniSection(random_derivation(chart, rng, **kw), random_jet(chart, rng, **kw))


def random_nonvanishing(chart: Chart, rng: np.random.Generator) -> Scalar:
    """``exp`` of a random polynomial: safe as a line-bundle factor."""
    return exp(random_scalar(chart, rng, degree=1, transcendental=False) * as_scalar(Fraction(1, 4))) if chart.dim else ONE


def random_form(chart: Chart, form_degree: int, rng: np.random.Generator, **kw) -> LForm:
    keys = list(combinations(range(chart.dim + 1), form_degree))
    return LForm(chart, form_degree, {k: random_scalar(chart, rng, **kw) for k in keys if rng.random() < 0.8})
