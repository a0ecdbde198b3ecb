import numpy as np
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

import sympy_oracle as so
from conftest import sympy_values, to_sympy, worked_jacobi
from omnilie.diracization import (
    TangentCourantSection,
    characteristic_dimension_check,
    diracize,
    extended_chart,
    lift_laws,
    lift_omni,
    tangent_courant_axioms,
    tangent_dirac_verdict,
    tangent_dorfman,
)
from omnilie.dercomplex import LForm
from omnilie.random_data import random_scalar, random_section
from omnilie.scalars import Chart, Oracle, as_scalar, compare, values
from omnilie.zoo import (
    HomogeneousPoissonData,
    JacobiMatrix,
    from_flat_connection,
    from_homogeneous_poisson,
    from_jacobi,
    from_lcps,
    from_two_cocycle,
    unit_structure,
)

seeds = st.integers(min_value=0, max_value=10_000)


def zoo_structures():
    out = []
    for n in (1, 2):
        chart = Chart(("x", "y")[:n])
        x = chart.coordinate("x")
        out.append(unit_structure(chart))
        out.append(from_flat_connection([x] + [as_scalar(0)] * (n - 1), chart))
        out.append(from_two_cocycle(LForm(chart, 2, {(0, n): x})))
        if n == 2:
            y = chart.coordinate("y")
            out.append(from_jacobi(worked_jacobi(chart)))
            out.append(from_two_cocycle(LForm(chart, 2, {(0, 1): as_scalar(2), (0, 2): y, (1, 2): -x})))
            out.append(from_lcps([0, 0], [[0, 1], [-1, 0]], chart))
            out.append(from_homogeneous_poisson(HomogeneousPoissonData.from_upper(chart, [1], [x, 0])))
        else:
            out.append(from_jacobi(JacobiMatrix.from_parts(chart, [], [1])))
    return out


def test_zoo_diracizes_to_dirac():
    for frame in zoo_structures():
        d = diracize(frame, Oracle())
        assert d.ok, (frame.label, d.to_dict())


def test_unit_lift_frame(chart_x):
    d = diracize(unit_structure(chart_x), Oracle())
    s = d.chart.coordinate("s")
    expected = [[0, s, 0, 0], [0, 0, s, 0]]
    for sec, exp in zip(d.sections, expected):
        assert compare(list(sec.components()), [as_scalar(e) for e in exp], d.chart, Oracle()) is None


def test_non_closed_cocycle_lift_is_not_dirac(chart_xy):
    d = diracize(from_two_cocycle(LForm(chart_xy, 2, {(0, 1): chart_xy.coordinate("x")})), Oracle())
    assert not d.ok and d.verdict.involutive is False and d.verdict.first_witness() is not None


def test_non_isotropic_tangent_frame(chart_x):
    sec = [TangentCourantSection(chart_x, (1,), (1,))]
    v = tangent_dirac_verdict(sec, chart_x, Oracle())
    assert not v.isotropic and v.involutive is None and not v.dirac


def test_extended_chart_avoids_clash():
    ext = extended_chart(Chart(("s", "x")))
    assert ext.names == ("s", "x", "s_")


def test_dimension_relation(chart_x, chart_xy):
    assert characteristic_dimension_check(unit_structure(chart_xy), chart_xy.point(0.1, 0.2)).lifted_rank == 1
    flat = characteristic_dimension_check(from_flat_connection([0, 0], chart_xy), chart_xy.point(0.1, 0.2))
    assert flat.ok and flat.lifted_rank == 2
    contact = characteristic_dimension_check(from_jacobi(JacobiMatrix.from_parts(chart_x, [], [1])), chart_x.point(0.3))
    assert contact.ok and contact.tag == "precontact" and contact.lifted_rank == 2
    J = from_jacobi(worked_jacobi(chart_xy))
    for v in (0.0, 0.5):
        assert characteristic_dimension_check(J, chart_xy.point(v, 0.1), s_value=-1.3).ok


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 2))
def test_lift_intertwines(seed, n):
    chart = Chart(("x", "y")[:n])
    rng = np.random.default_rng(seed)
    a, b = random_section(chart, rng), random_section(chart, rng)
    assert lift_laws(a, b, random_scalar(chart, rng), Oracle(seed=seed)) is None


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_tangent_dorfman_matches_sympy(seed):
    chart = Chart(("x", "y"))
    rng = np.random.default_rng(seed)
    mk = lambda: TangentCourantSection(chart, tuple(random_scalar(chart, rng) for _ in range(2)), tuple(random_scalar(chart, rng) for _ in range(2)))
    a, b = mk(), mk()
    syms = so.symbols(chart)
    X, al = [to_sympy(v, chart) for v in a.vector], [to_sympy(v, chart) for v in a.form]
    Y, be = [to_sympy(v, chart) for v in b.vector], [to_sympy(v, chart) for v in b.form]
    br = [sum(X[i] * sympy.diff(Y[j], syms[i]) - Y[i] * sympy.diff(X[j], syms[i]) for i in range(2)) for j in range(2)]
    lie = [sum(X[i] * sympy.diff(be[j], syms[i]) + be[i] * sympy.diff(X[i], syms[j]) for i in range(2)) for j in range(2)]
    ctr = [sum(Y[i] * (sympy.diff(al[j], syms[i]) - sympy.diff(al[i], syms[j])) for i in range(2)) for j in range(2)]
    expected = br + [l - c for l, c in zip(lie, ctr)]
    pts = Oracle(seed=seed).points(chart)
    for got, exp in zip(tangent_dorfman(a, b).components(), expected):
        assert np.allclose(values(got, pts), sympy_values(exp, chart, pts), atol=1e-8, rtol=1e-8)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_tangent_courant_axioms(seed):
    chart = Chart(("x", "y", "s"))
    rng = np.random.default_rng(seed)
    mk = lambda: TangentCourantSection(chart, tuple(random_scalar(chart, rng, degree=1) for _ in range(3)), tuple(random_scalar(chart, rng, degree=1) for _ in range(3)))
    assert tangent_courant_axioms(mk(), mk(), mk(), random_scalar(chart, rng), Oracle(seed=seed)) is None
