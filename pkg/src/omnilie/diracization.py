"""Homogenization to the slit dual bundle and a reference tangent Courant algebroid.

The extended chart appends a fiber coordinate ``s`` (sampled away from
zero, both signs). Derivations lift to vector fields ``X + a s d/ds``,
jets to 1-forms ``s eta + g ds``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import linalg
from .linebundle import Derivation, _same_chart, vector_bracket, vector_field_apply
from .omni import OmniSection, StructureFrame
from .scalars import ZERO, Chart, Oracle, Point, Scalar, Witness, as_scalar, compare, differentiate, total

FIBER_DOMAIN = ((-2.0, -0.5), (0.5, 2.0))


@dataclass(frozen=True)
class TangentCourantSection:
    """``(X, alpha)`` in ``TM + T*M`` over a chart of dimension ``len(vector)``."""

    chart: Chart
    vector: tuple[Scalar, ...]
    form: tuple[Scalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "vector", tuple(map(as_scalar, self.vector)))
        object.__setattr__(self, "form", tuple(map(as_scalar, self.form)))
        if len(self.vector) != self.chart.dim or len(self.form) != self.chart.dim:
            raise ValueError(f"tangent section needs {self.chart.dim} vector and form components")

    def components(self) -> tuple[Scalar, ...]:
        return self.vector + self.form

    def __add__(self, other: "TangentCourantSection") -> "TangentCourantSection":
        return TangentCourantSection(self.chart, tuple(a + b for a, b in zip(self.vector, other.vector)), tuple(a + b for a, b in zip(self.form, other.form)))

    def __sub__(self, other: "TangentCourantSection") -> "TangentCourantSection":
        return TangentCourantSection(self.chart, tuple(a - b for a, b in zip(self.vector, other.vector)), tuple(a - b for a, b in zip(self.form, other.form)))

    def scale(self, f) -> "TangentCourantSection":
        f = as_scalar(f)
        return TangentCourantSection(self.chart, tuple(f * a for a in self.vector), tuple(f * a for a in self.form))


def extended_chart(chart: Chart, fiber: str = "s") -> Chart:
    name = fiber
    while name in chart.names:
        name += "_"
    return Chart(chart.names + (name,), chart.domains + (FIBER_DOMAIN,))


def fiber_coordinate(ext: Chart) -> Scalar:
    return ext.coordinate(ext.dim - 1)


def lift_derivation(D: Derivation, ext: Chart) -> tuple[Scalar, ...]:
    return tuple(D.X) + (D.a * fiber_coordinate(ext),)


def lift_jet(eta: Sequence[Scalar], g: Scalar, ext: Chart) -> tuple[Scalar, ...]:
    s = fiber_coordinate(ext)
    return tuple(s * e for e in eta) + (as_scalar(g),)


def lift_scalar(f: Scalar, ext: Chart) -> Scalar:
    return fiber_coordinate(ext) * f


def lift_omni(alpha: OmniSection, ext: Chart | None = None) -> TangentCourantSection:
    ext = ext or extended_chart(alpha.chart)
    return TangentCourantSection(ext, lift_derivation(alpha.der, ext), lift_jet(alpha.jet.eta, alpha.jet.g, ext))


def euler_field(ext: Chart) -> TangentCourantSection:
    n = ext.dim
    return TangentCourantSection(ext, (ZERO,) * (n - 1) + (fiber_coordinate(ext),), (ZERO,) * n)


def tangent_pairing(a: TangentCourantSection, b: TangentCourantSection) -> Scalar:
    """``alpha(Y) + beta(X)``."""
    _same_chart(a.chart, b.chart)
    return total([x * f for x, f in zip(a.vector, b.form)] + [y * f for y, f in zip(b.vector, a.form)])


def form_lie_derivative(X: Sequence[Scalar], beta: Sequence[Scalar]) -> tuple[Scalar, ...]:
    """``(L_X beta)_j = X^i d_i beta_j + beta_i d_j X^i``."""
    n = len(X)
    return tuple(
        total([vector_field_apply(X, beta[j])] + [beta[i] * differentiate(X[i], j) for i in range(n)])
        for j in range(n)
    )


def form_contract_differential(Y: Sequence[Scalar], alpha: Sequence[Scalar]) -> tuple[Scalar, ...]:
    """``(i_Y d alpha)_j = Y^i (d_i alpha_j - d_j alpha_i)``."""
    n = len(Y)
    return tuple(total(Y[i] * (differentiate(alpha[j], i) - differentiate(alpha[i], j)) for i in range(n)) for j in range(n))


def exterior_derivative(f: Scalar, dim: int) -> tuple[Scalar, ...]:
    return tuple(differentiate(f, i) for i in range(dim))


def tangent_dorfman(a: TangentCourantSection, b: TangentCourantSection) -> TangentCourantSection:
    """``([X, Y], L_X beta - i_Y d alpha)``."""
    _same_chart(a.chart, b.chart)
    lie = form_lie_derivative(a.vector, b.form)
    ctr = form_contract_differential(b.vector, a.form)
    return TangentCourantSection(a.chart, vector_bracket(a.vector, b.vector), tuple(p - q for p, q in zip(lie, ctr)))


def tangent_anchor_apply(a: TangentCourantSection, f: Scalar) -> Scalar:
    return vector_field_apply(a.vector, f)


# ---------------------------------------------------------------------------
# verdicts


@dataclass
class TangentVerdict:
    rank_ok: bool
    isotropic: bool
    involutive: bool | None
    witnesses: dict[str, Witness] = field(default_factory=dict)

    @property
    def dirac(self) -> bool:
        return bool(self.rank_ok and self.isotropic and self.involutive)

    def first_witness(self) -> Witness | None:
        for key in ("rank", "isotropic", "involutive"):
            if key in self.witnesses:
                return self.witnesses[key]
        return None

    def to_dict(self) -> dict:
        return {
            "dirac": self.dirac,
            "rank_ok": self.rank_ok,
            "isotropic": self.isotropic,
            "involutive": self.involutive,
            "witnesses": {k: w.to_dict() for k, w in sorted(self.witnesses.items())},
        }


def _tangent_matrices(sections: Sequence[TangentCourantSection], pts: np.ndarray, atol: float) -> np.ndarray:
    from .scalars import values

    memo: dict = {}
    dim = 2 * sections[0].chart.dim
    out = np.zeros((pts.shape[0], dim, len(sections)))
    for k, s in enumerate(sections):
        for row, comp in enumerate(s.components()):
            if not comp.is_zero():
                out[:, row, k] = values(comp, pts, memo, atol)
    return out


def tangent_dirac_verdict(sections: Sequence[TangentCourantSection], chart: Chart, oracle: Oracle) -> TangentVerdict:
    """Rank ``dim M`` everywhere, isotropic, and Courant tensor zero on frame triples."""
    for s in sections:
        _same_chart(s.chart, chart)
    witnesses: dict[str, Witness] = {}
    pts = oracle.points(chart)
    rank_ok = len(sections) == chart.dim
    if sections:
        for j, mat in enumerate(_tangent_matrices(sections, pts, oracle.atol)):
            r = linalg.rank(mat, oracle.atol)
            if r != chart.dim:
                rank_ok = False
                witnesses["rank"] = Witness(tuple(pts[j]), chart.names, float(r), float(chart.dim), "rank")
                break
    elif chart.dim:
        rank_ok = False
    pairs = [(i, j) for i in range(len(sections)) for j in range(i, len(sections))]
    iso = compare([tangent_pairing(sections[i], sections[j]) for i, j in pairs], [ZERO] * len(pairs), chart, oracle, [f"pairing{p}" for p in pairs]) if pairs else None
    if iso is not None:
        witnesses["isotropic"] = iso
    involutive = None
    if iso is None:
        triples = list(combinations(range(len(sections)), 3))
        brackets: dict = {}
        lhs = []
        for i, j, k in triples:
            if (i, j) not in brackets:
                brackets[(i, j)] = tangent_dorfman(sections[i], sections[j])
            lhs.append(tangent_pairing(brackets[(i, j)], sections[k]))
        inv = compare(lhs, [ZERO] * len(lhs), chart, oracle, [f"triple{t}" for t in triples]) if lhs else None
        involutive = inv is None
        if inv is not None:
            witnesses["involutive"] = inv
    return TangentVerdict(rank_ok, iso is None, involutive, witnesses)


def tangent_courant_axioms(a: TangentCourantSection, b: TangentCourantSection, c: TangentCourantSection, f: Scalar, oracle: Oracle) -> Witness | None:
    """Leibniz identity, ``[[a, a]] = d<<a, a>>/2``, anchor invariance of the pairing and ``[[a, f b]]`` rule."""
    chart = a.chart
    n = chart.dim
    lhs: list[Scalar] = []
    rhs: list[Scalar] = []
    labels: list[str] = []

    def add(label, left, right):
        lhs.extend(left)
        rhs.extend(right)
        labels.extend(f"{label}[{k}]" for k in range(len(left)))

    bc = tangent_dorfman(b, c)
    add("leibniz", tangent_dorfman(a, bc).components(), (tangent_dorfman(tangent_dorfman(a, b), c) + tangent_dorfman(b, tangent_dorfman(a, c))).components())
    half = exterior_derivative(tangent_pairing(a, a), n)
    add("symmetric", tangent_dorfman(a, a).components(), (ZERO,) * n + tuple(h / 2 for h in half))
    add(
        "invariance",
        [tangent_anchor_apply(a, tangent_pairing(b, c))],
        [tangent_pairing(tangent_dorfman(a, b), c) + tangent_pairing(b, tangent_dorfman(a, c))],
    )
    fb = b.scale(f)
    add("module", tangent_dorfman(a, fb).components(), (tangent_dorfman(a, b).scale(f) + b.scale(tangent_anchor_apply(a, f))).components())
    return compare(lhs, rhs, chart, oracle, labels)


# ---------------------------------------------------------------------------
# homogenization laws


def lift_laws(alpha: OmniSection, beta: OmniSection, f: Scalar, oracle: Oracle) -> Witness | None:
    """Intertwining of scalars, commutators, pairings and brackets by the lift."""
    from .linebundle import apply_derivation, commutator, jet_prolong
    from .omni import dorfman, omni_pairing

    ext = extended_chart(alpha.chart)
    a, b = lift_omni(alpha, ext), lift_omni(beta, ext)
    s = fiber_coordinate(ext)
    lhs: list[Scalar] = []
    rhs: list[Scalar] = []
    labels: list[str] = []

    def add(label, left, right):
        lhs.extend(left)
        rhs.extend(right)
        labels.extend(f"{label}[{k}]" for k in range(len(left)))

    add("scalar", [vector_field_apply(a.vector, lift_scalar(f, ext))], [lift_scalar(apply_derivation(alpha.der, f), ext)])
    add("commutator", vector_bracket(a.vector, b.vector), lift_derivation(commutator(alpha.der, beta.der), ext))
    jf = jet_prolong(f, alpha.chart)
    add("jet", lift_jet(jf.eta, jf.g, ext), exterior_derivative(lift_scalar(f, ext), ext.dim))
    add("pairing", [tangent_pairing(a, b)], [s * omni_pairing(alpha, beta)])
    add("bracket", tangent_dorfman(a, b).components(), lift_omni(dorfman(alpha, beta), ext).components())
    return compare(lhs, rhs, ext, oracle, labels)


def homogeneity_witness(sections: Sequence[TangentCourantSection], oracle: Oracle) -> Witness | None:
    """Lifted vector parts commute with the Euler field; lifted forms have degree one."""
    if not sections:
        return None
    ext = sections[0].chart
    E = euler_field(ext).vector
    lhs: list[Scalar] = []
    rhs: list[Scalar] = []
    labels: list[str] = []
    for k, t in enumerate(sections):
        lhs.extend(vector_bracket(E, t.vector))
        rhs.extend([ZERO] * ext.dim)
        labels.extend(f"euler_vector{k}[{i}]" for i in range(ext.dim))
        lhs.extend(form_lie_derivative(E, t.form))
        rhs.extend(t.form)
        labels.extend(f"euler_form{k}[{i}]" for i in range(ext.dim))
    return compare(lhs, rhs, ext, oracle, labels)


@dataclass
class Diracization:
    chart: Chart
    sections: tuple[TangentCourantSection, ...]
    verdict: TangentVerdict
    homogeneity: Witness | None

    @property
    def ok(self) -> bool:
        return self.verdict.dirac and self.homogeneity is None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "chart": list(self.chart.names),
            "verdict": self.verdict.to_dict(),
            "homogeneity": None if self.homogeneity is None else self.homogeneity.to_dict(),
        }


def diracize(frame: StructureFrame, oracle: Oracle) -> Diracization:
    """Lift the frame and decide the Dirac property with the tangent Courant operations."""
    ext = extended_chart(frame.chart)
    lifted = tuple(lift_omni(s, ext) for s in frame.sections)
    return Diracization(ext, lifted, tangent_dirac_verdict(lifted, ext, oracle), homogeneity_witness(lifted, oracle))


@dataclass
class DimensionCheck:
    ok: bool
    lifted_rank: int
    expected: int
    tag: str
    leaf_dimension: int

    def to_dict(self) -> dict:
        return {"ok": self.ok, "lifted_rank": self.lifted_rank, "expected": self.expected, "tag": self.tag, "leaf_dimension": self.leaf_dimension}


def characteristic_dimension_check(frame: StructureFrame, p: Point, s_value: float = 1.0, atol: float = 1e-9) -> DimensionCheck:
    """Rank of the lifted vector parts at ``(p, s)`` against the leaf dimension."""
    from .analysis import PRECONTACT, point_report

    rep = point_report(frame, p, atol)
    ext = extended_chart(frame.chart)
    lifted = [lift_omni(s, ext) for s in frame.sections]
    q = np.array([list(p.values) + [s_value]])
    mat = _tangent_matrices(lifted, q, atol)[0][: ext.dim]
    r = linalg.rank(mat, atol)
    expected = rep.leaf_dimension + (1 if rep.tag == PRECONTACT else 0)
    return DimensionCheck(r == expected, r, expected, rep.tag, rep.leaf_dimension)
