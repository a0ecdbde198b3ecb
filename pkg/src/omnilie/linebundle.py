"""Derivations and first jets of the trivialized line bundle L = span(mu).

A derivation ``(X, a)`` acts on a section ``f mu`` as ``X(f) + a f``; a jet
``(eta, g)`` stands for ``sum eta_i dz^i (x) mu + g j1(mu)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scalars import (
    ONE,
    ZERO,
    Chart,
    ChartMismatch,
    Oracle,
    Point,
    Scalar,
    Witness,
    as_scalar,
    compare,
    differentiate,
    substitute,
    total,
    values,
)


def _same_chart(a: Chart, b: Chart) -> None:
    if a != b:
        raise ChartMismatch(f"chart mismatch: {a.names} vs {b.names}")


@dataclass(frozen=True)
class Derivation:
    """Element of Der L: symbol components ``X`` and identity coefficient ``a``."""

    chart: Chart
    X: tuple[Scalar, ...]
    a: Scalar = ZERO

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(as_scalar(v) for v in self.X))
        object.__setattr__(self, "a", as_scalar(self.a))
        if len(self.X) != self.chart.dim:
            raise ValueError(f"expected {self.chart.dim} symbol components, got {len(self.X)}")

    @classmethod
    def zero(cls, chart: Chart) -> "Derivation":
        return cls(chart, (ZERO,) * chart.dim, ZERO)

    @classmethod
    def coordinate(cls, chart: Chart, i: int) -> "Derivation":
        """``delta_i`` for ``i < n``; the identity derivation for ``i == n``."""
        if i == chart.dim:
            return cls.identity(chart)
        return cls(chart, tuple(ONE if j == i else ZERO for j in range(chart.dim)), ZERO)

    @classmethod
    def identity(cls, chart: Chart) -> "Derivation":
        return cls(chart, (ZERO,) * chart.dim, ONE)

    def components(self) -> tuple[Scalar, ...]:
        """Coefficients over the frame ``(delta_1..delta_n, 1)``."""
        return self.X + (self.a,)

    @classmethod
    def from_components(cls, chart: Chart, comps: Sequence[Scalar]) -> "Derivation":
        comps = list(comps)
        return cls(chart, tuple(comps[:-1]), comps[-1])

    def __add__(self, other: "Derivation") -> "Derivation":
        _same_chart(self.chart, other.chart)
        return Derivation(self.chart, tuple(x + y for x, y in zip(self.X, other.X)), self.a + other.a)

    def __sub__(self, other: "Derivation") -> "Derivation":
        _same_chart(self.chart, other.chart)
        return Derivation(self.chart, tuple(x - y for x, y in zip(self.X, other.X)), self.a - other.a)

    def __neg__(self) -> "Derivation":
        return Derivation(self.chart, tuple(-x for x in self.X), -self.a)

    def scale(self, f) -> "Derivation":
        f = as_scalar(f)
        return Derivation(self.chart, tuple(f * x for x in self.X), f * self.a)

    def symbol(self) -> tuple[Scalar, ...]:
        return self.X


@dataclass(frozen=True)
class Jet1:
    """Element of J1 L: covector part ``eta`` and ``j1(mu)`` coefficient ``g``."""

    chart: Chart
    eta: tuple[Scalar, ...]
    g: Scalar = ZERO

    def __post_init__(self):
        object.__setattr__(self, "eta", tuple(as_scalar(v) for v in self.eta))
        object.__setattr__(self, "g", as_scalar(self.g))
        if len(self.eta) != self.chart.dim:
            raise ValueError(f"expected {self.chart.dim} covector components, got {len(self.eta)}")

    @classmethod
    def zero(cls, chart: Chart) -> "Jet1":
        return cls(chart, (ZERO,) * chart.dim, ZERO)

    @classmethod
    def coordinate(cls, chart: Chart, i: int) -> "Jet1":
        """``dz^i (x) mu`` for ``i < n``; ``j1(mu)`` for ``i == n``."""
        if i == chart.dim:
            return cls(chart, (ZERO,) * chart.dim, ONE)
        return cls(chart, tuple(ONE if j == i else ZERO for j in range(chart.dim)), ZERO)

    def components(self) -> tuple[Scalar, ...]:
        return self.eta + (self.g,)

    @classmethod
    def from_components(cls, chart: Chart, comps: Sequence[Scalar]) -> "Jet1":
        comps = list(comps)
        return cls(chart, tuple(comps[:-1]), comps[-1])

    def __add__(self, other: "Jet1") -> "Jet1":
        _same_chart(self.chart, other.chart)
        return Jet1(self.chart, tuple(x + y for x, y in zip(self.eta, other.eta)), self.g + other.g)

    def __sub__(self, other: "Jet1") -> "Jet1":
        _same_chart(self.chart, other.chart)
        return Jet1(self.chart, tuple(x - y for x, y in zip(self.eta, other.eta)), self.g - other.g)

    def __neg__(self) -> "Jet1":
        return Jet1(self.chart, tuple(-x for x in self.eta), -self.g)

    def scale(self, f) -> "Jet1":
        f = as_scalar(f)
        return Jet1(self.chart, tuple(f * x for x in self.eta), f * self.g)


def apply_derivation(D: Derivation, f: Scalar) -> Scalar:
    """``sum X^i d_i f + a f``."""
    return total([x * differentiate(f, i) for i, x in enumerate(D.X)] + [D.a * f])


def vector_field_apply(X: Sequence[Scalar], f: Scalar) -> Scalar:
    return total(x * differentiate(f, i) for i, x in enumerate(X))


def vector_bracket(X: Sequence[Scalar], Y: Sequence[Scalar]) -> tuple[Scalar, ...]:
    """Lie bracket of vector fields in coordinates."""
    return tuple(vector_field_apply(X, y) - vector_field_apply(Y, x) for x, y in zip(X, Y))


def commutator(D: Derivation, B: Derivation) -> Derivation:
    """``([X, Y], X(b) - Y(a))``."""
    _same_chart(D.chart, B.chart)
    return Derivation(
        D.chart,
        vector_bracket(D.X, B.X),
        vector_field_apply(D.X, B.a) - vector_field_apply(B.X, D.a),
    )


def jet_pairing(D: Derivation, psi: Jet1) -> Scalar:
    """L-valued duality ``sum X^i eta_i + a g``."""
    _same_chart(D.chart, psi.chart)
    return total([x * e for x, e in zip(D.X, psi.eta)] + [D.a * psi.g])


def jet_prolong(f: Scalar, chart: Chart) -> Jet1:
    """First jet ``(df, f)`` of the section ``f mu``."""
    return Jet1(chart, tuple(differentiate(f, i) for i in range(chart.dim)), f)


def spencer_embed(eta: Sequence[Scalar], chart: Chart) -> Jet1:
    """Embed ``eta (x) mu`` as ``j1(f mu) - f j1(mu)`` summed: the jet ``(eta, 0)``."""
    return Jet1(chart, tuple(eta), ZERO)


@dataclass(frozen=True)
class LineBundleMorphism:
    """Regular morphism ``F(mu_x) = c(x) mu'`` covering ``base`` (source -> target)."""

    source: Chart
    target: Chart
    base: tuple[Scalar, ...]
    factor: Scalar = ONE

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(as_scalar(b) for b in self.base))
        object.__setattr__(self, "factor", as_scalar(self.factor))
        if len(self.base) != self.target.dim:
            raise ValueError("base map needs one component per target coordinate")

    def validate(self, oracle: Oracle) -> Witness | None:
        """Check that ``c`` is nonvanishing and ``base`` lands in the target domain."""
        pts = oracle.points(self.source)
        memo: dict = {}
        c = values(self.factor, pts, memo, oracle.atol)
        small = np.abs(c) < oracle.atol
        if np.any(small):
            j = int(np.argmax(small))
            return Witness(tuple(pts[j]), self.source.names, float(c[j]), 0.0, "factor vanishes")
        for k, comp in enumerate(self.base):
            v = values(comp, pts, memo, oracle.atol)
            lo, hi = _hull(self.target.domains[k])
            bad = (v < lo - oracle.atol) | (v > hi + oracle.atol)
            if np.any(bad):
                j = int(np.argmax(bad))
                return Witness(tuple(pts[j]), self.source.names, float(v[j]), lo, f"base component {k} leaves target domain")
        return None

    def compose_scalar(self, f: Scalar) -> Scalar:
        return substitute(f, self.base)

    def then(self, other: "LineBundleMorphism") -> "LineBundleMorphism":
        """Composite ``other after self``."""
        _same_chart(self.target, other.source)
        base = tuple(substitute(b, self.base) for b in other.base)
        return LineBundleMorphism(self.source, other.target, base, self.factor * substitute(other.factor, self.base))


def _hull(dom) -> tuple[float, float]:
    if isinstance(dom[0], tuple):
        return min(lo for lo, _ in dom), max(hi for _, hi in dom)
    return dom


def identity_morphism(chart: Chart) -> LineBundleMorphism:
    return LineBundleMorphism(chart, chart, tuple(chart.coordinates()), ONE)


def pullback_section(F: LineBundleMorphism, f: Scalar) -> Scalar:
    """``(f' o F) / c``."""
    return F.compose_scalar(f) / F.factor


def pushforward_derivation(F: LineBundleMorphism, D: Derivation, p: Point, atol: float = 1e-9) -> np.ndarray:
    """Components of ``(d_D F) Delta`` at ``F(p)`` over ``(delta', 1)``.

    Symbol ``dF(X)``; identity coefficient ``a - X(c)/c``.
    """
    _same_chart(D.chart, F.source)
    pts = p.array()
    memo: dict = {}
    out = []
    for b in F.base:
        out.append(values(vector_field_apply(D.X, b), pts, memo, atol)[0])
    coeff = D.a - vector_field_apply(D.X, F.factor) / F.factor
    out.append(values(coeff, pts, memo, atol)[0])
    return np.array(out, dtype=float)


def pushforward_matrix(F: LineBundleMorphism, p: Point, atol: float = 1e-9) -> np.ndarray:
    """Matrix of ``d_D F`` at ``p``: columns are images of the source frame."""
    cols = [pushforward_derivation(F, Derivation.coordinate(F.source, i), p, atol) for i in range(F.source.dim + 1)]
    return np.column_stack(cols)


def pullback_jet(F: LineBundleMorphism, psi: Jet1) -> Jet1:
    """Pullback of jets, the adjoint of ``pushforward_derivation``.

    ``eta_i = sum_j (eta'_j o F) d_i F^j / c - (g' o F) d_i c / c^2`` and
    ``g = (g' o F) / c``, so that ``<F_* D, psi'> = c <D, F^* psi'>``.
    """
    _same_chart(psi.chart, F.target)
    c = F.factor
    eta_t = [F.compose_scalar(e) for e in psi.eta]
    g_t = F.compose_scalar(psi.g)
    eta = []
    for i in range(F.source.dim):
        lin = total(e * differentiate(b, i) for e, b in zip(eta_t, F.base))
        eta.append(lin / c - g_t * differentiate(c, i) / (c * c))
    return Jet1(F.source, tuple(eta), g_t / c)


def pullback_jet_matrix(F: LineBundleMorphism, p: Point, atol: float = 1e-9) -> np.ndarray:
    """Matrix of ``F^*`` from target jets at ``F(p)`` to source jets at ``p``."""
    pts = p.array()
    memo: dict = {}
    cols = []
    for B in range(F.target.dim + 1):
        jet = pullback_jet(F, Jet1.coordinate(F.target, B))
        cols.append([values(s, pts, memo, atol)[0] for s in jet.components()])
    return np.array(cols, dtype=float).T


def check_adjointness(F: LineBundleMorphism, D: Derivation, psi: Jet1, oracle: Oracle) -> Witness | None:
    """Check ``<F_* D, psi'>(F(p)) = c(p) <D, F^* psi'>(p)`` at oracle points."""
    pts = oracle.points(F.source)
    pulled = pullback_jet(F, psi)
    rhs = F.factor * jet_pairing(D, pulled)
    psi_at = [F.compose_scalar(s) for s in psi.components()]
    push = [vector_field_apply(D.X, b) for b in F.base] + [D.a - vector_field_apply(D.X, F.factor) / F.factor]
    lhs = total(x * y for x, y in zip(push, psi_at))
    return compare([lhs], [rhs], F.source, oracle, ["adjointness"], pts)
