import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import worked_jacobi
from omnilie.analysis import point_report
from omnilie.dercomplex import LForm, differential
from omnilie.linalg import column_basis, nullspace, same_span
from omnilie.linebundle import Derivation, LineBundleMorphism, identity_morphism
from omnilie.morphisms import (
    CleanIntersectionError,
    ThickeningError,
    backward_image_projection,
    backward_image_slice,
    forward_image_pointwise,
    projection_morphism,
    thicken,
)
from omnilie.omni import OmniSection, StructureFrame, classify_subbundle
from omnilie.random_data import random_form, random_scalar
from omnilie.scalars import Chart, Oracle, as_scalar, exp, grid_points
from omnilie.zoo import JacobiMatrix, from_flat_connection, from_jacobi, from_two_cocycle, gauge_transform, unit_structure

seeds = st.integers(min_value=0, max_value=10_000)


def slice_by_definition(frame, p_full, fixed):
    """Numeric backward image along a coordinate inclusion with unit factor.

    Keep combinations whose derivation part has no normal symbol component,
    then drop the normal rows of both parts.
    """
    n = frame.chart.dim
    mat = frame.matrix_at(p_full)
    c = nullspace(mat[fixed, :]) if fixed else np.eye(mat.shape[1])
    normal = set(fixed) | {n + 1 + a for a in fixed}
    rows = [r for r in range(2 * (n + 1)) if r not in normal]
    return column_basis((mat @ c)[rows])


def paper_slice_frame(chart_x):
    x = chart_x.coordinate("x")
    return StructureFrame(
        chart_x,
        (
            OmniSection.from_components(chart_x, [x, 1, 0, 0]),
            OmniSection.from_components(chart_x, [0, 0, 1, -x]),
        ),
    )


def test_worked_slice(chart_xy, chart_x, oracle):
    sl = backward_image_slice(from_jacobi(worked_jacobi(chart_xy)), {"y": 0.0}, oracle)
    assert sl.chart.names == ("x",)
    expected = paper_slice_frame(chart_x)
    pts = oracle.points(chart_x)
    for a, b in zip(sl.matrices(pts), expected.matrices(pts)):
        assert same_span(a, b)
    assert classify_subbundle(sl, oracle).dirac_jacobi


def test_worked_slice_null_ranks(chart_xy, oracle):
    sl = backward_image_slice(from_jacobi(worked_jacobi(chart_xy)), {"y": 0.0}, oracle)
    for v in (-0.9, -0.2, 0.0, 0.3, 0.8):
        rep = point_report(sl, sl.chart.point(v))
        assert rep.rank_null_der == 1
        assert rep.rank_null == (0 if v == 0.0 else 1)


def test_slice_of_cocycle_is_cocycle_of_pullback(chart_xy, chart_x, oracle):
    x, y = chart_xy.coordinates()
    w = LForm(chart_xy, 2, {(0, 1): as_scalar(2), (0, 2): y, (1, 2): -x})
    sl = backward_image_slice(from_two_cocycle(w), {"y": 0.0}, oracle)
    pulled = from_two_cocycle(LForm(chart_x, 2, {(0, 1): as_scalar(0)}))
    pts = oracle.points(chart_x)
    for a, b in zip(sl.matrices(pts), pulled.matrices(pts)):
        assert same_span(a, b)


def test_empty_slice_is_identity(chart_xy, oracle):
    frame = from_jacobi(worked_jacobi(chart_xy))
    assert backward_image_slice(frame, {}, oracle) is frame


class GridOracle(Oracle):
    """Samples a regular grid, which contains the origin."""

    def points(self, chart):
        return grid_points(chart, 5)


def test_clean_intersection_failure(chart_xy):
    x = chart_xy.coordinate("x")
    # x d/dx ^ d/dy meets the conormal of {y = 0} only over x = 0
    frame = from_jacobi(JacobiMatrix.from_parts(chart_xy, [x], [0, 0]))
    with pytest.raises(CleanIntersectionError) as info:
        backward_image_slice(frame, {"y": 0.0}, GridOracle())
    ranks = {row["rank_conormal_intersection"] for row in info.value.rank_table}
    assert ranks == {0, 1}


def test_projection_of_unit(oracle):
    base, total = Chart(("y",)), Chart(("x", "y"))
    lifted = backward_image_projection(unit_structure(base), total)
    assert classify_subbundle(lifted, oracle).dirac_jacobi
    target = np.array([1.0, 0, 0, 0, 0, 0])
    for mat in lifted.matrices(oracle.points(total)):
        assert np.linalg.matrix_rank(np.column_stack([mat, target]), tol=1e-9) == mat.shape[1]


def test_projection_then_slice_recovers(chart_xy, oracle):
    base, total = Chart(("y",)), Chart(("x", "y"))
    y = base.coordinate("y")
    frame = from_flat_connection([y], base)
    up = backward_image_projection(frame, total, exp(total.coordinate("x") * total.coordinate("y")))
    down = backward_image_slice(up, {"x": 0.0}, oracle)
    pts = oracle.points(base)
    for a, b in zip(down.matrices(pts), frame.matrices(pts)):
        assert same_span(a, b)


def test_forward_image_identity(chart_xy, oracle):
    frame = from_jacobi(worked_jacobi(chart_xy))
    p = chart_xy.point(0.3, -0.5)
    img = forward_image_pointwise(identity_morphism(chart_xy), frame, p)
    assert img.rank == 3 and img.isotropic and img.kernel_rank == 0
    assert same_span(img.basis, frame.matrix_at(p))


def test_forward_image_descends_at_fiber_mates(chart_xy):
    frame = from_flat_connection([0, 0], chart_xy)
    F = projection_morphism(chart_xy, Chart(("y",)))
    img = forward_image_pointwise(F, frame, chart_xy.point(0.1, 0.2), mates=[chart_xy.point(-0.6, 0.2), chart_xy.point(0.7, 0.2)])
    assert img.rank == 2 and img.isotropic and img.invariant


def test_thickening_of_worked_slice(chart_x, oracle):
    frame = paper_slice_frame(chart_x)
    x = chart_x.coordinate("x")
    th = thicken(frame, [Derivation(chart_x, (x,), 1)], [Derivation.coordinate(chart_x, 0)], oracle)
    assert th.ok, th.checks
    assert th.frame.chart.names == ("x", "eps")
    assert classify_subbundle(th.frame, oracle).dirac_jacobi


def test_thickening_without_null_part(chart_xy, oracle):
    frame = from_jacobi(worked_jacobi(chart_xy))
    th = thicken(frame, [], [Derivation.coordinate(chart_xy, i) for i in range(3)], oracle)
    assert th.frame is frame and th.fiber == []


def test_thickening_rejects_foreign_null_frame(chart_x, oracle):
    with pytest.raises(ThickeningError):
        thicken(paper_slice_frame(chart_x), [Derivation.coordinate(chart_x, 0)], [Derivation.identity(chart_x)], oracle)


def _random_structure(seed):
    chart = Chart(("x", "y"))
    rng = np.random.default_rng(seed)
    base = (from_jacobi(worked_jacobi(chart)), unit_structure(chart), from_flat_connection([0, 0], chart))[seed % 3]
    return gauge_transform(base, differential(random_form(chart, 1, rng, degree=1)))


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from([-0.5, 0.0, 0.4]))
def test_slice_matches_definition(seed, y0):
    frame = _random_structure(seed)
    oracle = Oracle(seed=seed, samples=8)
    try:
        sl = backward_image_slice(frame, {"y": y0}, oracle)
    except CleanIntersectionError:
        return
    for p in oracle.points(sl.chart):
        expected = slice_by_definition(frame, frame.chart.point(p[0], y0), [1])
        assert same_span(sl.matrix_at(sl.chart.point(*p)), expected, 1e-7)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_projection_preserves_dirac(seed):
    base = Chart(("y",))
    total = Chart(("x", "y"))
    rng = np.random.default_rng(seed)
    frame = (unit_structure(base), from_flat_connection([base.coordinate("y")], base), from_jacobi(_jacobi_1d(base)))[seed % 3]
    c = exp(random_scalar(total, rng, degree=1, transcendental=False) * as_scalar(0.25))
    up = backward_image_projection(frame, total, c)
    assert classify_subbundle(up, Oracle(seed=seed)).dirac_jacobi


def _jacobi_1d(chart):
    return JacobiMatrix.from_parts(chart, [], [chart.coordinate(0)])
