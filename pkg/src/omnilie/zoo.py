"""Constructors and recognizers for the standard Dirac-Jacobi structure classes."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import linalg
from .dercomplex import LForm, contract, form_to_jet
from .linebundle import Derivation, Jet1, apply_derivation, jet_pairing, jet_prolong
from .omni import FrameError, OmniSection, StructureFrame, combine, split
from .scalars import ONE, ZERO, Chart, Oracle, Scalar, Witness, as_scalar, compare, differentiate, total, values
from .symbolic import inverse


class NotFlat(ValueError):
    def __init__(self, witness: Witness):
        self.witness = witness
        super().__init__(f"connection is not flat: {witness}")


class NotDirac(ValueError):
    def __init__(self, message: str, witness: Witness | None = None):
        self.witness = witness
        super().__init__(message if witness is None else f"{message}: {witness}")


@dataclass(frozen=True)
class JacobiMatrix:
    """Antisymmetric ``(n+1) x (n+1)`` matrix over ``(dz^i (x) mu, j1 mu)``.

    Only the upper triangle is stored. ``J[i][j]`` for ``i, j < n`` is the
    bivector part, ``J[i][n]`` the vector part.
    """

    chart: Chart
    upper: dict

    def __post_init__(self):
        r = self.chart.dim + 1
        clean = {}
        for (a, b), v in dict(self.upper).items():
            if not 0 <= a < b < r:
                raise ValueError(f"upper-triangle index {(a, b)} out of range")
            clean[(a, b)] = as_scalar(v)
        object.__setattr__(self, "upper", clean)

    @classmethod
    def from_parts(cls, chart: Chart, bivector: dict | Sequence, vector: Sequence) -> "JacobiMatrix":
        """``bivector`` maps ``(i, j)``, ``i < j``, to Lambda^{ij}, or lists them in lexicographic order."""
        n = chart.dim
        if not isinstance(bivector, dict):
            bivector = dict(zip(combinations(range(n), 2), bivector))
        upper = {k: as_scalar(v) for k, v in bivector.items()}
        for i, g in enumerate(vector):
            upper[(i, n)] = as_scalar(g)
        return cls(chart, upper)

    def entry(self, a: int, b: int) -> Scalar:
        if a == b:
            return ZERO
        if a < b:
            return self.upper.get((a, b), ZERO)
        return -self.upper.get((b, a), ZERO)

    def sharp(self, psi: Jet1) -> Derivation:
        """``J#(psi)``: the derivation with components ``sum_A psi_A J^{AB}``."""
        r = self.chart.dim + 1
        comps = psi.components()
        out = [total(comps[A] * self.entry(A, B) for A in range(r) if not comps[A].is_zero()) for B in range(r)]
        return Derivation.from_components(self.chart, out)

    def bracket(self, f: Scalar, g: Scalar) -> Scalar:
        return jet_pairing(self.sharp(jet_prolong(f, self.chart)), jet_prolong(g, self.chart))

    def bivector(self) -> list[list[Scalar]]:
        n = self.chart.dim
        return [[self.entry(i, j) for j in range(n)] for i in range(n)]

    def vector(self) -> list[Scalar]:
        n = self.chart.dim
        return [self.entry(i, n) for i in range(n)]


@dataclass(frozen=True)
class HomogeneousPoissonData:
    chart: Chart
    bivector: tuple  # n x n nested tuples, antisymmetric
    vector: tuple

    @classmethod
    def from_upper(cls, chart: Chart, upper: dict | Sequence, vector: Sequence) -> "HomogeneousPoissonData":
        n = chart.dim
        if not isinstance(upper, dict):
            upper = dict(zip(combinations(range(n), 2), upper))
        pi = [[ZERO] * n for _ in range(n)]
        for (i, j), v in upper.items():
            pi[i][j] = as_scalar(v)
            pi[j][i] = -as_scalar(v)
        return cls(chart, tuple(tuple(r) for r in pi), tuple(as_scalar(v) for v in vector))


def unit_structure(chart: Chart) -> StructureFrame:
    """``{(1, 0)} + {(0, (dz^i, 0))}``."""
    secs = [OmniSection.of_derivation(Derivation.identity(chart))]
    secs += [OmniSection.of_jet(Jet1.coordinate(chart, i)) for i in range(chart.dim)]
    return StructureFrame(chart, tuple(secs), "unit")


def from_two_cocycle(w: LForm, label: str = "two_cocycle") -> StructureFrame:
    """Graph of ``omega_flat``: ``{(e_A, i_{e_A} omega)}``."""
    if w.degree != 2:
        raise ValueError("expected a 2-form")
    chart = w.chart
    secs = []
    for A in range(chart.dim + 1):
        e = Derivation.coordinate(chart, A)
        secs.append(OmniSection(e, form_to_jet(contract(e, w))))
    return StructureFrame(chart, tuple(secs), label)


def from_jacobi(J: JacobiMatrix, label: str = "jacobi") -> StructureFrame:
    """Graph of ``J#``: ``{(J#(eps_A), eps_A)}``."""
    chart = J.chart
    secs = []
    for A in range(chart.dim + 1):
        eps = Jet1.coordinate(chart, A)
        secs.append(OmniSection(J.sharp(eps), eps))
    return StructureFrame(chart, tuple(secs), label)


def hamiltonian(J: JacobiMatrix, f: Scalar) -> Derivation:
    return J.sharp(jet_prolong(f, J.chart))


def flatness_witness(connection: Sequence[Scalar], chart: Chart, oracle: Oracle) -> Witness | None:
    """``d_i Gamma_j = d_j Gamma_i``."""
    pairs = list(combinations(range(chart.dim), 2))
    lhs = [differential_pair(connection, i, j) for i, j in pairs]
    return compare(lhs, [ZERO] * len(lhs), chart, oracle, [f"curvature{p}" for p in pairs])


def differential_pair(connection, i: int, j: int) -> Scalar:
    return differentiate(as_scalar(connection[j]), i) - differentiate(as_scalar(connection[i]), j)


def _covariant(chart: Chart, connection, i: int) -> Derivation:
    return Derivation(chart, Derivation.coordinate(chart, i).X, as_scalar(connection[i]))


def from_flat_connection(connection: Sequence, chart: Chart, oracle: Oracle | None = None, label: str = "flat_connection") -> StructureFrame:
    """``{(delta_i + Gamma_i 1, 0)} + {(0, (-Gamma, 1))}``."""
    connection = [as_scalar(g) for g in connection]
    if len(connection) != chart.dim:
        raise ValueError("connection needs one component per coordinate")
    w = flatness_witness(connection, chart, oracle or Oracle())
    if w is not None:
        raise NotFlat(w)
    secs = [OmniSection.of_derivation(_covariant(chart, connection, i)) for i in range(chart.dim)]
    secs.append(OmniSection.of_jet(Jet1(chart, tuple(-g for g in connection), ONE)))
    return StructureFrame(chart, tuple(secs), label)


def from_lcps(connection: Sequence, form: Sequence[Sequence], chart: Chart, oracle: Oracle | None = None, label: str = "lcps") -> StructureFrame:
    """Deform the flat connection structure by ``i_{nabla_i} sigma^* omega``."""
    connection = [as_scalar(g) for g in connection]
    n = chart.dim
    w = flatness_witness(connection, chart, oracle or Oracle())
    if w is not None:
        raise NotFlat(w)
    omega = [[as_scalar(form[i][j]) for j in range(n)] for i in range(n)]
    secs = []
    for i in range(n):
        jet = Jet1(chart, tuple(omega[i][j] for j in range(n)), ZERO)
        secs.append(OmniSection(_covariant(chart, connection, i), jet))
    secs.append(OmniSection.of_jet(Jet1(chart, tuple(-g for g in connection), ONE)))
    return StructureFrame(chart, tuple(secs), label)


def antisymmetric_from_upper(chart: Chart, upper: dict | Sequence) -> list[list[Scalar]]:
    n = chart.dim
    if not isinstance(upper, dict):
        upper = dict(zip(combinations(range(n), 2), upper))
    out = [[ZERO] * n for _ in range(n)]
    for (i, j), v in upper.items():
        out[i][j] = as_scalar(v)
        out[j][i] = -as_scalar(v)
    return out


def from_homogeneous_poisson(d: HomogeneousPoissonData, label: str = "homogeneous_poisson") -> StructureFrame:
    """``{((-Z, 1), 0)} + {((pi# dz^i, 0), (dz^i, Z^i))}``."""
    chart = d.chart
    n = chart.dim
    secs = [OmniSection.of_derivation(Derivation(chart, tuple(-z for z in d.vector), ONE))]
    for i in range(n):
        der = Derivation(chart, tuple(d.bivector[i][j] for j in range(n)), ZERO)
        jet = Jet1(chart, tuple(ONE if j == i else ZERO for j in range(n)), d.vector[i])
        secs.append(OmniSection(der, jet))
    return StructureFrame(chart, tuple(secs), label)


def lie_derivative_bivector(d: HomogeneousPoissonData) -> list[list[Scalar]]:
    """``(L_Z pi)^{ij} = Z(pi^{ij}) - pi^{kj} d_k Z^i - pi^{ik} d_k Z^j``."""
    n = d.chart.dim
    Z, pi = d.vector, d.bivector
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            t = total(Z[k] * differentiate(pi[i][j], k) for k in range(n))
            t = t - total(pi[k][j] * differentiate(Z[i], k) for k in range(n))
            t = t - total(pi[i][k] * differentiate(Z[j], k) for k in range(n))
            row.append(t)
        out.append(row)
    return out


def check_homogeneous(d: HomogeneousPoissonData, oracle: Oracle) -> Witness | None:
    """``L_Z pi = -pi`` componentwise (the Poisson condition is left to the verdict)."""
    n = d.chart.dim
    lz = lie_derivative_bivector(d)
    keys = list(combinations(range(n), 2))
    return compare([lz[i][j] for i, j in keys], [-d.bivector[i][j] for i, j in keys], d.chart, oracle, [f"L_Z pi{k}" for k in keys])


def lift_dirac(pairs: Sequence[tuple[Sequence, Sequence]], chart: Chart, oracle: Oracle | None = None, label: str = "lifted_dirac") -> StructureFrame:
    """``{((X, 0), (eta, 0))} + {(0, (0, 1))}`` from a tangent Dirac frame ``(X, eta)``."""
    from .diracization import TangentCourantSection, tangent_dirac_verdict

    oracle = oracle or Oracle()
    tangent = [TangentCourantSection(chart, tuple(map(as_scalar, X)), tuple(map(as_scalar, eta))) for X, eta in pairs]
    verdict = tangent_dirac_verdict(tangent, chart, oracle)
    if not verdict.dirac:
        raise NotDirac("input frame is not a tangent Dirac structure", verdict.first_witness())
    secs = [OmniSection(Derivation(chart, t.vector, ZERO), Jet1(chart, t.form, ZERO)) for t in tangent]
    secs.append(OmniSection.of_jet(Jet1.coordinate(chart, chart.dim)))
    return StructureFrame(chart, tuple(secs), label)


def gauge_transform(frame: StructureFrame, w: LForm) -> StructureFrame:
    """``(D, psi) -> (D, psi + i_D omega)``."""
    secs = tuple(OmniSection(s.der, s.jet + form_to_jet(contract(s.der, w))) for s in frame.sections)
    return StructureFrame(frame.chart, secs, f"gauge({frame.label})")


# ---------------------------------------------------------------------------
# recognition


@dataclass
class Recognition:
    tags: list[str]
    cocycle: LForm | None = None
    jacobi: JacobiMatrix | None = None
    homogeneous_poisson: HomogeneousPoissonData | None = None
    rank_table: list[dict] = field(default_factory=list)

    @property
    def unclassified(self) -> bool:
        return not self.tags

    def to_dict(self) -> dict:
        return {"tags": list(self.tags), "rank_table": self.rank_table}


def _symbolic_rows(frame: StructureFrame, rows: Sequence[int]) -> list[list[Scalar]]:
    return [[s.components()[r] for s in frame.sections] for r in rows]


def recognize(frame: StructureFrame, oracle: Oracle) -> Recognition:
    """Decide which graph-like class a Dirac-Jacobi frame belongs to and extract its data."""
    chart = frame.chart
    n = chart.dim
    r = n + 1
    pts = oracle.points(chart)
    mats = frame.matrices(pts, oracle.atol)
    tol = oracle.atol
    table = []
    e_ranks, j_ranks, tau_ok = [], [], []
    for j, mat in enumerate(mats):
        blocks = split(mat, chart)
        in_j = blocks.jet @ linalg.nullspace(blocks.der, tol)
        in_d = blocks.der @ linalg.nullspace(blocks.jet, tol)
        rj, rd = linalg.rank(in_j, tol), linalg.rank(in_d, tol)
        e_ranks.append(rd)
        j_ranks.append(rj)
        tau = rd == 1 and abs(linalg.column_basis(in_d, tol)[n, 0]) > tol
        tau_ok.append(tau)
        table.append({"point": dict(zip(chart.names, map(float, pts[j]))), "rank_L_cap_J1L": rj, "rank_L_cap_DL": rd})
    out = Recognition([], rank_table=table)
    m = len(frame)
    if m != r:
        return out
    if all(v == 0 for v in j_ranks):
        inv = inverse(_symbolic_rows(frame, range(r)))
        comps = {}
        for A, B in combinations(range(r), 2):
            # phi_A = sum_k inv[k][A] psi_k and omega_{AB} = (phi_A)_B
            comps[(A, B)] = total(inv[k][A] * frame[k].jet.components()[B] for k in range(m))
        out.tags.append("two_cocycle")
        out.cocycle = LForm(chart, 2, comps)
    if all(v == 0 for v in e_ranks):
        inv = inverse(_symbolic_rows(frame, range(r, 2 * r)))
        upper = {}
        for A, B in combinations(range(r), 2):
            upper[(A, B)] = total(inv[k][A] * frame[k].der.components()[B] for k in range(m))
        out.tags.append("jacobi")
        out.jacobi = JacobiMatrix(chart, upper)
    if all(tau_ok):
        # coordinates (h, eta) of L: the identity coefficient and the covector part
        rows = [n] + list(range(r, r + n))
        inv = inverse(_symbolic_rows(frame, rows))
        unit = combine(frame.sections, [inv[k][0] for k in range(m)])
        Z = tuple(-x for x in unit.der.X)
        pi = []
        for i in range(n):
            beta = combine(frame.sections, [inv[k][1 + i] for k in range(m)])
            pi.append(tuple(beta.der.X))
        out.tags.append("homogeneous_poisson")
        out.homogeneous_poisson = HomogeneousPoissonData(chart, tuple(pi), Z)
    return out
