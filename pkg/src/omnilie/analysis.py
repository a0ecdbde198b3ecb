"""Pointwise geometry of a Dirac-Jacobi structure.

Everything here is linear algebra on the frame evaluated at sample points:
the characteristic space (image of the derivation projection), the null
der-space (intersection with Der L), the null space (its symbols), the
leaf 2-form, admissibility and the local normal form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from . import linalg
from .linebundle import Derivation, apply_derivation, jet_prolong, vector_field_apply
from .omni import FrameError, StructureFrame, split
from .scalars import Chart, Oracle, Point, Scalar, Witness, differentiate, grid_points, values

PRECONTACT = "precontact"
LCPS = "lcps"


@dataclass
class PointReport:
    point: dict[str, float]
    rank_characteristic: int
    rank_null_der: int
    rank_null: int
    rank_symbol: int
    tag: str
    unit_in_structure: bool
    characteristic_basis: np.ndarray
    null_der_basis: np.ndarray
    null_basis: np.ndarray
    symbol_basis: np.ndarray
    leaf_form: np.ndarray

    @property
    def leaf_dimension(self) -> int:
        return self.rank_symbol

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "rank_characteristic": self.rank_characteristic,
            "rank_null_der": self.rank_null_der,
            "rank_null": self.rank_null,
            "rank_symbol": self.rank_symbol,
            "leaf_dimension": self.leaf_dimension,
            "tag": self.tag,
            "unit_in_structure": self.unit_in_structure,
            "leaf_form": self.leaf_form.tolist(),
        }


def _report_from_matrix(mat: np.ndarray, chart: Chart, values_at: Sequence[float], tol: float) -> PointReport:
    n = chart.dim
    blocks = split(mat, chart)
    char_basis = linalg.column_basis(blocks.der, tol)
    sym_basis = linalg.column_basis(blocks.der[:n], tol)
    null_coeffs = linalg.nullspace(blocks.jet, tol)
    null_der = linalg.column_basis(blocks.der @ null_coeffs, tol)
    null_sym = linalg.column_basis(null_der[:n], tol) if null_der.shape[1] else np.zeros((n, 0))
    r_char = char_basis.shape[1]
    r_sym = sym_basis.shape[1]
    tag = PRECONTACT if r_char == r_sym + 1 else LCPS
    unit = np.zeros(n + 1)
    unit[n] = 1.0
    unit_in = null_der.shape[1] > 0 and linalg.contains(null_der, unit, tol)
    return PointReport(
        point=dict(zip(chart.names, map(float, values_at))),
        rank_characteristic=r_char,
        rank_null_der=null_der.shape[1],
        rank_null=null_sym.shape[1],
        rank_symbol=r_sym,
        tag=tag,
        unit_in_structure=bool(unit_in),
        characteristic_basis=char_basis,
        null_der_basis=null_der,
        null_basis=null_sym,
        symbol_basis=sym_basis,
        leaf_form=leaf_form_matrix(mat, chart, tol)[1],
    )


def leaf_form_matrix(mat: np.ndarray, chart: Chart, tol: float, shift: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Leaf 2-form on a basis of the characteristic space.

    For basis elements ``(D_a, phi_a)`` of the structure with independent
    derivation parts, ``omega(D_a, D_b) = <D_b, phi_a>``. ``shift`` adds
    coefficient vectors from the kernel of the derivation projection to
    the partners, which must not change the result. Returns the basis
    (derivation columns) and the matrix.
    """
    blocks = split(mat, chart)
    coeffs = linalg.row_complement(blocks.der, tol)
    if shift is not None and coeffs.shape[1]:
        ker = linalg.nullspace(blocks.der, tol)
        if ker.shape[1]:
            coeffs = coeffs + ker @ shift[: ker.shape[1], : coeffs.shape[1]]
    basis = blocks.der @ coeffs
    partners = blocks.jet @ coeffs
    return basis, partners.T @ basis


def point_report(frame: StructureFrame, p: Point, atol: float = 1e-9) -> PointReport:
    mat = frame.matrix_at(p, atol)
    if linalg.rank(mat, atol) != len(frame):
        raise FrameError("frame condition fails", Witness(p.values, p.chart.names, float(linalg.rank(mat, atol)), float(len(frame)), "frame rank"))
    return _report_from_matrix(mat, frame.chart, p.values, atol)


def reports_at(frame: StructureFrame, pts: np.ndarray, atol: float = 1e-9) -> list[PointReport]:
    mats = frame.matrices(pts, atol)
    return [_report_from_matrix(m, frame.chart, pts[j], atol) for j, m in enumerate(mats)]


@dataclass
class Verdict:
    ok: bool
    witness: Witness | None = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {"ok": self.ok, "witness": None if self.witness is None else self.witness.to_dict(), "detail": self.detail}


def reconstruction_check(frame: StructureFrame, oracle: Oracle) -> Verdict:
    """Every frame element satisfies ``i_D omega = psi`` on the characteristic space,
    and that condition cuts out exactly ``n + 1`` dimensions."""
    chart = frame.chart
    n = chart.dim
    pts = oracle.points(chart)
    tol = oracle.atol
    for j, mat in enumerate(frame.matrices(pts, tol)):
        basis, W = leaf_form_matrix(mat, chart, tol)
        blocks = split(mat, chart)
        k = basis.shape[1]
        for col in range(mat.shape[1]):
            D, psi = blocks.der[:, col], blocks.jet[:, col]
            t = linalg.solve(basis, D) if k else np.zeros(0)
            if k and np.linalg.norm(basis @ t - D) > tol * max(1.0, np.linalg.norm(D)):
                return Verdict(False, Witness(tuple(pts[j]), chart.names, float(np.linalg.norm(basis @ t - D)), 0.0, f"element {col} outside characteristic space"))
            lhs = t @ W
            rhs = basis.T @ psi
            err = np.abs(lhs - rhs)
            if np.any(err > tol + tol * np.maximum(np.abs(lhs), np.abs(rhs))):
                b = int(np.argmax(err))
                return Verdict(False, Witness(tuple(pts[j]), chart.names, float(lhs[b]), float(rhs[b]), f"element {col}, basis {b}"))
        # solutions (D, psi): D = basis t, psi restricted to the basis fixed by t
        solution_dim = k + (n + 1 - k)
        if solution_dim != n + 1 or linalg.rank(mat, tol) != n + 1:
            return Verdict(False, Witness(tuple(pts[j]), chart.names, float(linalg.rank(mat, tol)), float(n + 1), "dimension"))
    return Verdict(True)


@dataclass
class Admissibility:
    admissible: bool
    null_test: bool
    agree: bool
    witness: Witness | None = None
    hamiltonian_ok: bool | None = None

    def __bool__(self):
        return self.admissible

    def to_dict(self) -> dict:
        return {
            "admissible": self.admissible,
            "null_test": self.null_test,
            "agree": self.agree,
            "hamiltonian_ok": self.hamiltonian_ok,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def _jet_values(jet_comps: Sequence[Scalar], pts: np.ndarray, atol: float) -> np.ndarray:
    memo: dict = {}
    return np.column_stack([values(c, pts, memo, atol) for c in jet_comps])


def is_admissible_section(frame: StructureFrame, f: Scalar, oracle: Oracle, hamiltonian: Derivation | None = None) -> Admissibility:
    """``j1 f`` lies in the jet projection of the structure at every oracle point."""
    chart = frame.chart
    pts = oracle.points(chart)
    tol = oracle.atol
    jet = jet_prolong(f, chart).components()
    jv = _jet_values(jet, pts, tol)
    fv = values(f, pts, atol=tol)
    grads = _jet_values([differentiate(f, i) for i in range(chart.dim)], pts, tol) if chart.dim else np.zeros((len(pts), 0))
    mats = frame.matrices(pts, tol)
    member_all, null_all, witness = True, True, None
    for j, mat in enumerate(mats):
        blocks = split(mat, chart)
        member = linalg.contains(blocks.jet, jv[j], tol)
        null_der = blocks.der @ linalg.nullspace(blocks.jet, tol)
        # E-elements applied to f: X.grad f + a f
        applied = null_der[:-1].T @ grads[j] + null_der[-1] * fv[j] if null_der.shape[1] else np.zeros(0)
        null_ok = bool(np.all(np.abs(applied) <= tol * max(1.0, np.abs(jv[j]).max())))
        if not member and witness is None:
            witness = Witness(tuple(pts[j]), chart.names, float(np.linalg.norm(jv[j])), 0.0, "jet outside projection")
        member_all &= member
        null_all &= null_ok
    ham_ok = None
    if hamiltonian is not None:
        ham_ok = _pair_in_frame(frame, hamiltonian.components(), jet, oracle) is None
    return Admissibility(member_all, null_all, member_all == null_all, witness, ham_ok)


def _pair_in_frame(frame: StructureFrame, der_comps, jet_comps, oracle: Oracle) -> Witness | None:
    chart = frame.chart
    pts = oracle.points(chart)
    tol = oracle.atol
    vec = _jet_values(list(der_comps) + list(jet_comps), pts, tol)
    for j, mat in enumerate(frame.matrices(pts, tol)):
        if not linalg.contains(mat, vec[j], tol):
            return Witness(tuple(pts[j]), chart.names, float(np.linalg.norm(vec[j])), 0.0, "pair outside structure")
    return None


def is_admissible_function(frame: StructureFrame, f: Scalar, oracle: Oracle) -> Admissibility:
    """``(df, 0)`` lies in the jet projection; cross-checked against ``X(f) = 0`` on the null space."""
    chart = frame.chart
    n = chart.dim
    pts = oracle.points(chart)
    tol = oracle.atol
    grads = _jet_values([differentiate(f, i) for i in range(n)], pts, tol)
    member_all, null_all, witness = True, True, None
    for j, mat in enumerate(frame.matrices(pts, tol)):
        blocks = split(mat, chart)
        v = np.append(grads[j], 0.0)
        member = linalg.contains(blocks.jet, v, tol)
        null_der = blocks.der @ linalg.nullspace(blocks.jet, tol)
        null_sym = linalg.column_basis(null_der[:n], tol) if null_der.shape[1] else np.zeros((n, 0))
        applied = null_sym.T @ grads[j]
        null_ok = bool(np.all(np.abs(applied) <= tol * max(1.0, np.abs(grads[j]).max(initial=0.0))))
        if not member and witness is None:
            witness = Witness(tuple(pts[j]), chart.names, float(np.linalg.norm(v)), 0.0, "differential outside projection")
        member_all &= member
        null_all &= null_ok
    return Admissibility(member_all, null_all, member_all == null_all, witness)


class NotHamiltonian(ValueError):
    def __init__(self, witness: Witness):
        self.witness = witness
        super().__init__(f"(D, j1 f) is not in the structure: {witness}")


def admissible_bracket(frame: StructureFrame, f: Scalar, hamiltonian: Derivation, g: Scalar, oracle: Oracle) -> Scalar:
    """``{f, g} = D_f(g)`` for a Hamiltonian derivation ``D_f`` of ``f``."""
    w = _pair_in_frame(frame, hamiltonian.components(), jet_prolong(f, frame.chart).components(), oracle)
    if w is not None:
        raise NotHamiltonian(w)
    return apply_derivation(hamiltonian, g)


def hamiltonian_at(frame: StructureFrame, f: Scalar, p: Point, shift: np.ndarray | None = None, atol: float = 1e-9) -> np.ndarray:
    """A derivation ``D`` (components at ``p``) with ``(D, j1 f(p))`` in the structure."""
    mat = frame.matrix_at(p, atol)
    blocks = split(mat, frame.chart)
    jet = _jet_values(jet_prolong(f, frame.chart).components(), p.array(), atol)[0]
    c = linalg.solve(blocks.jet, jet)
    if shift is not None:
        ker = linalg.nullspace(blocks.jet, atol)
        if ker.shape[1]:
            c = c + ker @ shift[: ker.shape[1]]
    return blocks.der @ c


# ---------------------------------------------------------------------------
# invariants over sample sets


def parity_check(frame: StructureFrame, pts: np.ndarray, atol: float = 1e-9) -> Verdict:
    """Leaf-dimension parity is constant among precontact points and among lcps points."""
    seen: dict[str, set[int]] = {PRECONTACT: set(), LCPS: set()}
    for rep in reports_at(frame, pts, atol):
        seen[rep.tag].add(rep.leaf_dimension % 2)
    ok = all(len(v) <= 1 for v in seen.values())
    return Verdict(ok, None, {k: sorted(v) for k, v in seen.items()})


def null_dichotomy_check(frame: StructureFrame, pts: np.ndarray, atol: float = 1e-9) -> Verdict:
    """``rank E = rank K + 1`` exactly where the identity derivation lies in the structure."""
    for rep in reports_at(frame, pts, atol):
        expected = rep.rank_null + (1 if rep.unit_in_structure else 0)
        if rep.rank_null_der != expected:
            vals = tuple(rep.point.values())
            return Verdict(False, Witness(vals, frame.chart.names, float(rep.rank_null_der), float(expected), "rank E vs rank K"))
    return Verdict(True)


def grid_parity(frame: StructureFrame, per_axis: int = 5, atol: float = 1e-9) -> Verdict:
    return parity_check(frame, grid_points(frame.chart, per_axis), atol)


# ---------------------------------------------------------------------------
# local normal form at a point


class PivotFailure(ValueError):
    pass


@dataclass
class NormalForm:
    case: str
    leaf_coordinates: list[str]
    transverse_coordinates: list[str]
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    frame: np.ndarray  # normalized basis, columns over (D-part, J-part)
    relations_hold: bool

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "leaf_coordinates": self.leaf_coordinates,
            "transverse_coordinates": self.transverse_coordinates,
            "E": self.E.tolist(),
            "F": self.F.tolist(),
            "G": self.G.tolist(),
            "H": self.H.tolist(),
            "relations_hold": self.relations_hold,
        }


def normalize_frame_at_point(frame: StructureFrame, p: Point, atol: float = 1e-9) -> NormalForm:
    """Bring the frame at ``p`` to block form ``[Id, E, F, 0]`` / ``[0, G, H, Id]``.

    Omni coordinates are split into leaf derivations, transverse
    derivations, leaf jets and transverse jets. In the lcps case the leaf
    derivations are ``delta_i`` for leaf coordinates; in the precontact case
    the identity derivation joins them and ``j1 mu`` joins the leaf jets.
    Leaf coordinates are chosen to maximize the pivot block determinant.
    """
    chart = frame.chart
    n = chart.dim
    rep = point_report(frame, p, atol)
    mat = frame.matrix_at(p, atol)
    d = rep.leaf_dimension
    best = None
    for leaf in combinations(range(n), d):
        trans = [a for a in range(n) if a not in leaf]
        if rep.tag == PRECONTACT:
            d_leaf = list(leaf) + [n]
            d_rest = trans
            j_leaf = [n + 1 + i for i in leaf] + [2 * n + 1]
            j_rest = [n + 1 + a for a in trans]
        else:
            d_leaf = list(leaf)
            d_rest = trans + [n]
            j_leaf = [n + 1 + i for i in leaf]
            j_rest = [n + 1 + a for a in trans] + [2 * n + 1]
        pivot_rows = d_leaf + j_rest
        block = mat[pivot_rows, :]
        det = abs(np.linalg.det(block)) if block.shape[0] == block.shape[1] else 0.0
        if best is None or det > best[0]:
            best = (det, leaf, trans, d_leaf, d_rest, j_leaf, j_rest)
    det, leaf, trans, d_leaf, d_rest, j_leaf, j_rest = best
    if det <= atol:
        raise PivotFailure(f"no invertible pivot block at {p.values}")
    pivot_rows = d_leaf + j_rest
    normalized = mat @ np.linalg.inv(mat[pivot_rows, :])
    k = len(d_leaf)
    alpha, beta = normalized[:, :k], normalized[:, k:]
    E = alpha[d_rest, :].T
    F = alpha[j_leaf, :].T
    G = beta[d_rest, :].T
    H = beta[j_leaf, :].T
    scale = max(1.0, float(np.abs(normalized).max()))
    tol = atol * scale * 10
    ok = (
        np.allclose(F + F.T, 0, atol=tol)
        and np.allclose(G + G.T, 0, atol=tol)
        and np.allclose(H + E.T, 0, atol=tol)
        and np.allclose(alpha[j_rest, :], 0, atol=tol)
        and np.allclose(beta[d_leaf, :], 0, atol=tol)
    )
    return NormalForm(
        case=rep.tag,
        leaf_coordinates=[chart.names[i] for i in leaf],
        transverse_coordinates=[chart.names[a] for a in trans],
        E=E,
        F=F,
        G=G,
        H=H,
        frame=normalized,
        relations_hold=bool(ok),
    )


# ---------------------------------------------------------------------------
# transverse structures


@dataclass
class TransverseStructure:
    tag: str
    slice_frame: StructureFrame
    recognition: object
    vanishes_at_point: bool

    def to_dict(self) -> dict:
        return {"tag": self.tag, "vanishes_at_point": self.vanishes_at_point, "recognition": self.recognition.to_dict()}


def transverse_structure_at(frame: StructureFrame, p: Point, slice_: dict[str, float], oracle: Oracle) -> TransverseStructure:
    """Induced structure on the coordinate slice through ``p``, recognized.

    At an lcps point it must be a Jacobi structure vanishing at ``p``; at a
    precontact point a homogeneous Poisson structure with ``pi`` and ``Z``
    vanishing at ``p``.
    """
    from .morphisms import backward_image_slice
    from .zoo import recognize

    rep = point_report(frame, p, oracle.atol)
    restricted = backward_image_slice(frame, slice_, oracle)
    rec = recognize(restricted, oracle)
    sub = restricted.chart
    q = sub.point(*(p.as_dict()[nm] for nm in sub.names))
    vanish = False
    if rep.tag == LCPS and rec.jacobi is not None:
        entries = list(rec.jacobi.upper.values())
        vanish = all(abs(values(e, q.array(), atol=oracle.atol)[0]) <= oracle.atol for e in entries)
        tag = "jacobi"
    elif rep.tag == PRECONTACT and rec.homogeneous_poisson is not None:
        hp = rec.homogeneous_poisson
        entries = [e for row in hp.bivector for e in row] + list(hp.vector)
        vanish = all(abs(values(e, q.array(), atol=oracle.atol)[0]) <= oracle.atol for e in entries)
        tag = "homogeneous_poisson"
    else:
        tag = "unrecognized"
    return TransverseStructure(tag, restricted, rec, vanish)
