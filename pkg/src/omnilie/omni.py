"""The omni-Lie algebroid DL + J1L: pairing, Dorfman-like bracket and verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import linalg
from .dercomplex import contract, differential, form_to_jet, jet_to_form, lie_derivative
from .linebundle import Derivation, Jet1, _same_chart, commutator, jet_pairing
from .scalars import ZERO, Chart, Oracle, Point, Scalar, Witness, as_scalar, compare, values


@dataclass(frozen=True)
class OmniSection:
    der: Derivation
    jet: Jet1

    def __post_init__(self):
        _same_chart(self.der.chart, self.jet.chart)

    @property
    def chart(self) -> Chart:
        return self.der.chart

    @classmethod
    def zero(cls, chart: Chart) -> "OmniSection":
        return cls(Derivation.zero(chart), Jet1.zero(chart))

    @classmethod
    def of_derivation(cls, D: Derivation) -> "OmniSection":
        return cls(D, Jet1.zero(D.chart))

    @classmethod
    def of_jet(cls, psi: Jet1) -> "OmniSection":
        return cls(Derivation.zero(psi.chart), psi)

    def components(self) -> tuple[Scalar, ...]:
        """``2(n+1)`` coefficients: derivation part then jet part."""
        return self.der.components() + self.jet.components()

    @classmethod
    def from_components(cls, chart: Chart, comps: Sequence[Scalar]) -> "OmniSection":
        comps = list(comps)
        r = chart.dim + 1
        return cls(Derivation.from_components(chart, comps[:r]), Jet1.from_components(chart, comps[r:]))

    def __add__(self, other: "OmniSection") -> "OmniSection":
        return OmniSection(self.der + other.der, self.jet + other.jet)

    def __sub__(self, other: "OmniSection") -> "OmniSection":
        return OmniSection(self.der - other.der, self.jet - other.jet)

    def __neg__(self) -> "OmniSection":
        return OmniSection(-self.der, -self.jet)

    def scale(self, f) -> "OmniSection":
        return OmniSection(self.der.scale(f), self.jet.scale(f))


def combine(sections: Sequence[OmniSection], coeffs: Sequence) -> OmniSection:
    out = OmniSection.zero(sections[0].chart)
    for s, c in zip(sections, coeffs):
        c = as_scalar(c)
        if not c.is_zero():
            out = out + s.scale(c)
    return out


class FrameError(ValueError):
    def __init__(self, message: str, witness: Witness | None = None):
        self.witness = witness
        super().__init__(message if witness is None else f"{message}: {witness}")


@dataclass(frozen=True)
class StructureFrame:
    """A finite spanning family of omni-sections representing a subbundle."""

    chart: Chart
    sections: tuple[OmniSection, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sections", tuple(self.sections))
        for s in self.sections:
            _same_chart(s.chart, self.chart)

    def __len__(self) -> int:
        return len(self.sections)

    def __getitem__(self, k: int) -> OmniSection:
        return self.sections[k]

    def matrices(self, pts: np.ndarray, atol: float = 1e-9) -> np.ndarray:
        """Coefficient matrices of shape ``(N, 2(n+1), m)``."""
        memo: dict = {}
        m = len(self.sections)
        r = 2 * (self.chart.dim + 1)
        out = np.zeros((pts.shape[0], r, m))
        for k, s in enumerate(self.sections):
            for row, comp in enumerate(s.components()):
                if not comp.is_zero():
                    out[:, row, k] = values(comp, pts, memo, atol)
        return out

    def matrix_at(self, p: Point, atol: float = 1e-9) -> np.ndarray:
        _same_chart(p.chart, self.chart)
        return self.matrices(p.array(), atol)[0]

    def relabel(self, label: str) -> "StructureFrame":
        return StructureFrame(self.chart, self.sections, label)


def omni_pairing(a: OmniSection, b: OmniSection) -> Scalar:
    """``<D, psi> + <B, phi>`` for ``a = (D, phi)``, ``b = (B, psi)``."""
    _same_chart(a.chart, b.chart)
    return jet_pairing(a.der, b.jet) + jet_pairing(b.der, a.jet)


def dorfman(a: OmniSection, b: OmniSection) -> OmniSection:
    """``([D, B], L_D psi - i_B d_D phi)``."""
    _same_chart(a.chart, b.chart)
    psi = jet_to_form(b.jet)
    phi = jet_to_form(a.jet)
    jet = lie_derivative(a.der, psi) - contract(b.der, differential(phi))
    return OmniSection(commutator(a.der, b.der), form_to_jet(jet))


def anchor_apply(a: OmniSection, f: Scalar) -> Scalar:
    """``(sigma o pr_D)(a)(f)``."""
    from .linebundle import vector_field_apply

    return vector_field_apply(a.der.X, f)


def courant_jacobi_tensor(frame: StructureFrame, i: int, j: int, k: int, oracle: Oracle | None = None) -> Scalar:
    """``<<[[a_i, a_j]], a_k>>``; the frame must be isotropic."""
    if oracle is not None:
        w = isotropy_witness(frame, oracle)
        if w is not None:
            raise FrameError("Courant-Jacobi tensor needs an isotropic frame", w)
    s = frame.sections
    return omni_pairing(dorfman(s[i], s[j]), s[k])


def frame_condition(frame: StructureFrame, oracle: Oracle) -> Witness | None:
    """Full column rank of the coefficient matrix at every oracle point."""
    pts = oracle.points(frame.chart)
    mats = frame.matrices(pts, oracle.atol)
    m = len(frame)
    for j, mat in enumerate(mats):
        r = linalg.rank(mat, oracle.atol)
        if r != m:
            return Witness(tuple(pts[j]), frame.chart.names, float(r), float(m), "frame rank")
    return None


def isotropy_witness(frame: StructureFrame, oracle: Oracle) -> Witness | None:
    s = frame.sections
    pairs = [(i, j) for i in range(len(s)) for j in range(i, len(s))]
    lhs = [omni_pairing(s[i], s[j]) for i, j in pairs]
    return compare(lhs, [ZERO] * len(lhs), frame.chart, oracle, [f"pairing{p}" for p in pairs])


def involutivity_witness(frame: StructureFrame, oracle: Oracle, all_triples: bool = False) -> Witness | None:
    """Courant-Jacobi tensor on frame triples (increasing triples suffice by alternation)."""
    s = frame.sections
    m = len(s)
    if all_triples:
        triples = [(i, j, k) for i in range(m) for j in range(m) for k in range(m)]
    else:
        triples = list(combinations(range(m), 3))
    brackets: dict[tuple[int, int], OmniSection] = {}
    lhs, labels = [], []
    for i, j, k in triples:
        if (i, j) not in brackets:
            brackets[(i, j)] = dorfman(s[i], s[j])
        lhs.append(omni_pairing(brackets[(i, j)], s[k]))
        labels.append(f"triple{(i, j, k)}")
    if not lhs:
        return None
    return compare(lhs, [ZERO] * len(lhs), frame.chart, oracle, labels)


@dataclass
class Classification:
    isotropic: bool
    maximal: bool
    involutive: bool | None
    dirac_jacobi: bool
    witnesses: dict[str, Witness] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "isotropic": self.isotropic,
            "maximal": self.maximal,
            "involutive": self.involutive,
            "dirac_jacobi": self.dirac_jacobi,
            "witnesses": {k: w.to_dict() for k, w in sorted(self.witnesses.items())},
        }


def classify_subbundle(frame: StructureFrame, oracle: Oracle) -> Classification:
    """Isotropy, maximality, involutivity and the Dirac-Jacobi verdict.

    Involutivity is decided from the Courant-Jacobi tensor on frame triples,
    which is only meaningful (tensorial) for isotropic frames; for other
    frames it is left undecided (``None``).
    """
    w = frame_condition(frame, oracle)
    if w is not None:
        raise FrameError("frame condition fails", w)
    witnesses: dict[str, Witness] = {}
    iso = isotropy_witness(frame, oracle)
    if iso is not None:
        witnesses["isotropic"] = iso
    isotropic = iso is None
    maximal = isotropic and len(frame) == frame.chart.dim + 1
    involutive: bool | None = None
    if isotropic:
        inv = involutivity_witness(frame, oracle)
        involutive = inv is None
        if inv is not None:
            witnesses["involutive"] = inv
    return Classification(isotropic, maximal, involutive, bool(maximal and involutive), witnesses)


@dataclass(frozen=True)
class PointSplit:
    """Pointwise blocks of a frame: derivation rows and jet rows."""

    der: np.ndarray
    jet: np.ndarray


def split(mat: np.ndarray, chart: Chart) -> PointSplit:
    r = chart.dim + 1
    return PointSplit(mat[:r], mat[r:])


def characteristic_pairs_check(frame: StructureFrame, oracle: Oracle) -> Witness | None:
    """``pr_D(L)^0 = L & J1L`` and ``pr_J1(L) = (L & DL)^0`` pointwise."""
    pts = oracle.points(frame.chart)
    mats = frame.matrices(pts, oracle.atol)
    tol = oracle.atol
    for j, mat in enumerate(mats):
        blocks = split(mat, frame.chart)
        image_d = linalg.column_basis(blocks.der, tol)
        ann_d = linalg.nullspace(image_d.T, tol) if image_d.shape[1] else np.eye(blocks.der.shape[0])
        in_j = blocks.jet @ linalg.nullspace(blocks.der, tol)
        image_j = linalg.column_basis(blocks.jet, tol)
        in_d = blocks.der @ linalg.nullspace(blocks.jet, tol)
        ann_e = linalg.nullspace(linalg.column_basis(in_d, tol).T, tol) if linalg.rank(in_d, tol) else np.eye(blocks.der.shape[0])
        if not linalg.same_span(ann_d, in_j if in_j.size else np.zeros((ann_d.shape[0], 0)), tol):
            return Witness(tuple(pts[j]), frame.chart.names, float(ann_d.shape[1]), float(linalg.rank(in_j, tol)), "pr_D annihilator")
        if not linalg.same_span(image_j, ann_e, tol):
            return Witness(tuple(pts[j]), frame.chart.names, float(image_j.shape[1]), float(ann_e.shape[1]), "pr_J annihilator")
    return None


def _section_pairs(label: str, a: OmniSection, b: OmniSection):
    return list(a.components()), list(b.components()), [f"{label}[{k}]" for k in range(len(a.components()))]


def courant_identities(a: OmniSection, b: OmniSection, c: OmniSection, f: Scalar, oracle: Oracle) -> Witness | None:
    """Symmetric part, left Leibniz (Jacobi), module rule and pairing compatibility."""
    from .linebundle import apply_derivation, jet_prolong, vector_field_apply

    chart = a.chart
    lhs: list[Scalar] = []
    rhs: list[Scalar] = []
    labels: list[str] = []

    def add(label, x, y):
        l, r, lab = _section_pairs(label, x, y)
        lhs.extend(l)
        rhs.extend(r)
        labels.extend(lab)

    add("cour1", dorfman(a, b) + dorfman(b, a), OmniSection.of_jet(jet_prolong(omni_pairing(a, b), chart)))
    add("cour2", dorfman(a, dorfman(b, c)), dorfman(dorfman(a, b), c) + dorfman(b, dorfman(a, c)))
    add("cour3", dorfman(a, b.scale(f)), dorfman(a, b).scale(f) + b.scale(vector_field_apply(a.der.X, f)))
    lhs.append(apply_derivation(a.der, omni_pairing(b, c)))
    rhs.append(omni_pairing(dorfman(a, b), c) + omni_pairing(b, dorfman(a, c)))
    labels.append("cour4")
    return compare(lhs, rhs, chart, oracle, labels)


def tensor_linearity_witness(frame: StructureFrame, coeffs: Sequence[Sequence[Scalar]], oracle: Oracle) -> Witness | None:
    """Courant-Jacobi tensor of three coefficient combinations against its expansion on the frame."""
    secs = [combine(frame.sections, cs) for cs in coeffs]
    lhs = omni_pairing(dorfman(secs[0], secs[1]), secs[2])
    m = len(frame)
    terms = []
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            bij = dorfman(frame[i], frame[j])
            for k in range(m):
                w = coeffs[0][i] * coeffs[1][j] * coeffs[2][k]
                if not w.is_zero():
                    terms.append(w * omni_pairing(bij, frame[k]))
    from .scalars import total

    return compare([lhs], [total(terms)], frame.chart, oracle, ["tensoriality"])
