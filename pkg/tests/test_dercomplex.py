import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import sympy_values, to_sympy
from omnilie.dercomplex import (
    LForm,
    NotClosed,
    cartan_identities,
    cocycle_from_precontact,
    contract,
    differential,
    form_kernel_at_point,
    form_to_jet,
    is_closed,
    jet_to_form,
    lie_derivative,
    precontact_from_cocycle,
    scalar_form,
    zero_form,
)
from omnilie.linebundle import Derivation, Jet1, jet_prolong
from omnilie.random_data import random_derivation, random_form, random_jet, random_scalar
from omnilie.scalars import Chart, Oracle, as_scalar, compare, parse_scalar, scalars_equal, values

seeds = st.integers(min_value=0, max_value=10_000)


def forms_equal(a, b, oracle=None):
    keys = sorted(set(a.keys()) | set(b.keys()))
    return compare([a.component(k) for k in keys], [b.component(k) for k in keys], a.chart, oracle or Oracle()) is None


def test_differential_of_function_is_prolongation(chart_x):
    x = chart_x.coordinate("x")
    assert forms_equal(differential(scalar_form(x * x, chart_x)), jet_to_form(jet_prolong(x * x, chart_x)))


def test_differential_squares_to_zero_example(chart_xy):
    X, Y = chart_xy.coordinates()
    dd = differential(differential(scalar_form(X * Y, chart_xy)))
    assert forms_equal(dd, zero_form(chart_xy, 2))


def test_differential_one_form_example(chart_x):
    x = chart_x.coordinate("x")
    w = differential(LForm(chart_x, 1, {(0,): x, (1,): x * x}))
    assert scalars_equal(w.component((0, 1)), x, Oracle(), chart_x)


def test_contraction_examples(chart_x):
    x = chart_x.coordinate("x")
    f = parse_scalar("exp(x) - 1", chart_x)
    assert scalars_equal(contract(Derivation.identity(chart_x), jet_to_form(jet_prolong(f, chart_x))).component(()), f, Oracle(), chart_x)
    h = parse_scalar("x^2 + 2", chart_x)
    w = contract(Derivation.coordinate(chart_x, 0), LForm(chart_x, 2, {(0, 1): h}))
    assert w.component((0,)).is_zero()
    assert scalars_equal(w.component((1,)), h, Oracle(), chart_x)


def test_lie_identity_on_prolongation(chart_xy):
    f = parse_scalar("x*y + sin(y)", chart_xy)
    j = jet_to_form(jet_prolong(f, chart_xy))
    assert forms_equal(lie_derivative(Derivation.identity(chart_xy), j), j)


def test_zero_precontact_gives_zero_cocycle(chart_xy):
    assert not cocycle_from_precontact([0, 0], chart_xy).comps
    assert all(t.is_zero() for t in precontact_from_cocycle(zero_form(chart_xy, 2), Oracle()))


def test_precontact_round_trip_example(chart_xy):
    theta = [-chart_xy.coordinate("x"), as_scalar(1)]
    w = cocycle_from_precontact(theta, chart_xy)
    assert is_closed(w, Oracle()) is None
    back = precontact_from_cocycle(w, Oracle())
    assert all(scalars_equal(a, as_scalar(b), Oracle(), chart_xy) for a, b in zip(back, theta))


def test_non_closed_cocycle_raises_with_witness(chart_xy):
    w = LForm(chart_xy, 2, {(0, 1): chart_xy.coordinate("x")})
    with pytest.raises(NotClosed) as info:
        precontact_from_cocycle(w, Oracle())
    assert info.value.witness is not None


def test_kernel_examples(chart_xyz):
    x, y, z = chart_xyz.coordinates()
    contact = cocycle_from_precontact([-y, as_scalar(0), as_scalar(1)], chart_xyz)
    for p in Oracle(samples=16).points(chart_xyz):
        k = form_kernel_at_point(contact, chart_xyz.point(*p))
        assert k.kernel.shape[1] == 0 and k.rank == 4
    k0 = form_kernel_at_point(zero_form(chart_xyz, 2), chart_xyz.point(0.1, 0.2, 0.3))
    assert k0.kernel.shape[1] == 4 and k0.symbols.shape[1] == 3


def test_kernel_of_nondegenerate_form(chart_x):
    k = form_kernel_at_point(LForm(chart_x, 2, {(0, 1): as_scalar(1)}), chart_x.point(0.4))
    assert k.kernel.shape[1] == 0


def test_bad_component_index(chart_x):
    with pytest.raises(ValueError):
        LForm(chart_x, 2, {(1, 0): as_scalar(1)})


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 3))
def test_cartan_calculus(seed, n):
    chart = Chart(("x", "y", "z")[:n])
    rng = np.random.default_rng(seed)
    D, B = random_derivation(chart, rng, degree=1), random_derivation(chart, rng, degree=1)
    w = random_form(chart, int(rng.integers(0, n + 2)), rng, degree=2)
    assert cartan_identities(D, B, w, Oracle(seed=seed)) is None


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_one_form_differential_matches_koszul(seed):
    chart = Chart(("x", "y"))
    rng = np.random.default_rng(seed)
    psi = random_jet(chart, rng)
    dw = differential(jet_to_form(psi))
    x, y = sympy.symbols("x y")
    e0, e1, g = (to_sympy(v, chart) for v in psi.components())
    expected = {
        (0, 1): sympy.diff(e1, x) - sympy.diff(e0, y),
        (0, 2): sympy.diff(g, x) - e0,
        (1, 2): sympy.diff(g, y) - e1,
    }
    pts = Oracle(seed=seed).points(chart)
    for key, expr in expected.items():
        assert np.allclose(values(dw.component(key), pts), sympy_values(expr, chart, pts), atol=1e-9, rtol=1e-9)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_precontact_round_trip(seed):
    chart = Chart(("x", "y", "z"))
    rng = np.random.default_rng(seed)
    theta = [random_scalar(chart, rng) for _ in range(3)]
    back = precontact_from_cocycle(cocycle_from_precontact(theta, chart), Oracle(seed=seed))
    assert compare(back, theta, chart, Oracle(seed=seed)) is None


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_cocycle_decomposition(seed):
    """Every closed 2-form is ``-d`` of its precontact form."""
    chart = Chart(("x", "y"))
    rng = np.random.default_rng(seed)
    w = differential(random_form(chart, 1, rng))
    theta = precontact_from_cocycle(w, Oracle(seed=seed))
    assert forms_equal(cocycle_from_precontact(theta, chart), w, Oracle(seed=seed))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_jet_form_round_trip(seed):
    chart = Chart(("x", "y"))
    psi = random_jet(chart, np.random.default_rng(seed))
    assert form_to_jet(jet_to_form(psi)) == psi
