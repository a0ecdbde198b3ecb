import numpy as np
import pytest
import sympy

from omnilie.scalars import Chart, Oracle, to_text
from omnilie.zoo import JacobiMatrix, from_jacobi


@pytest.fixture
def oracle():
    return Oracle(seed=0, samples=32)


@pytest.fixture
def chart_x():
    return Chart(("x",))


@pytest.fixture
def chart_xy():
    return Chart(("x", "y"))


@pytest.fixture
def chart_xyz():
    return Chart(("x", "y", "z"))


def worked_jacobi(chart):
    """``J = x d/dy ^ d/dx + d/dy ^ 1``: bivector component -x, vector part d/dy."""
    x = chart.coordinate("x")
    return JacobiMatrix.from_parts(chart, [-x], [0, 1])


@pytest.fixture
def worked_structure(chart_xy):
    return from_jacobi(worked_jacobi(chart_xy))


def to_sympy(f, chart):
    symbols = {name: sympy.Symbol(name) for name in chart.names}
    return sympy.sympify(to_text(f), locals=symbols)


def sympy_values(expr, chart, pts):
    symbols = [sympy.Symbol(name) for name in chart.names]
    fn = sympy.lambdify(symbols, expr, "numpy")
    return np.broadcast_to(np.asarray(fn(*pts.T), dtype=float), (pts.shape[0],))


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
