"""Backward and forward images along line-bundle morphisms, and the Jacobi thickening.

Closed-form frames are produced for the two canonical shapes: a coordinate
slice ``{x^a = const}`` and a coordinate projection ``(x, y) -> y``. General
morphisms are handled pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .dercomplex import LForm, differential
from .linebundle import Derivation, Jet1, LineBundleMorphism, pullback_jet, pullback_jet_matrix, pushforward_matrix, vector_field_apply
from .omni import OmniSection, StructureFrame, combine, split
from .scalars import ONE, ZERO, Chart, Oracle, Point, Scalar, Var, Witness, as_scalar, differentiate, substitute, total, values
from .symbolic import inverse, matvec


class CleanIntersectionError(ValueError):
    def __init__(self, message: str, rank_table: list[dict]):
        self.rank_table = rank_table
        super().__init__(message)


class EliminationError(ValueError):
    pass


class ThickeningError(ValueError):
    def __init__(self, message: str, witness: Witness | None = None):
        self.witness = witness
        super().__init__(message if witness is None else f"{message}: {witness}")


# ---------------------------------------------------------------------------
# coordinate slices


def _slice_chart(chart: Chart, constrained: Sequence[int]) -> Chart:
    free = [i for i in range(chart.dim) if i not in constrained]
    if not free:
        raise ValueError("a slice must leave at least one free coordinate")
    return Chart(tuple(chart.names[i] for i in free), tuple(chart.domains[i] for i in free))


def _restriction(chart: Chart, sub: Chart, constants: Mapping[int, float]) -> list[Scalar]:
    """Replacement list sending old coordinates to slice coordinates or constants."""
    out = []
    for i, name in enumerate(chart.names):
        out.append(as_scalar(constants[i]) if i in constants else Var(name, sub.index(name)))
    return out


def _embed_points(chart: Chart, sub: Chart, constants: Mapping[int, float], sub_pts: np.ndarray) -> np.ndarray:
    pts = np.zeros((sub_pts.shape[0], chart.dim))
    for i, name in enumerate(chart.names):
        pts[:, i] = constants[i] if i in constants else sub_pts[:, sub.index(name)]
    return pts


def _pivot_choice(N: list[list[Scalar]], pts: np.ndarray, tol: float) -> tuple[list[int], list[int]]:
    """Row and column subsets of maximal generic rank whose minor avoids zero on ``pts``."""
    rows, cols = len(N), len(N[0]) if N else 0
    if rows == 0 or cols == 0:
        return [], []
    memo: dict = {}
    num = np.stack([np.column_stack([values(N[r][c], pts, memo, tol) for c in range(cols)]) for r in range(rows)], axis=1)
    ranks = [linalg.rank(num[j], tol) for j in range(num.shape[0])]
    r = max(ranks)
    if r == 0:
        return [], []
    best, best_score = None, -1.0
    for R in combinations(range(rows), r):
        for C in combinations(range(cols), r):
            score = float(np.min(np.abs(np.linalg.det(num[:, list(R)][:, :, list(C)]))))
            if score > best_score:
                best, best_score = (list(R), list(C)), score
    if best_score <= tol:
        raise EliminationError("no pivot minor stays away from zero on the slice samples")
    return best


def _rank_table(chart: Chart, pts: np.ndarray, ranks: Sequence[int], key: str) -> list[dict]:
    return [{"point": dict(zip(chart.names, map(float, p))), key: int(r)} for p, r in zip(pts, ranks)]


def backward_image_slice(frame: StructureFrame, slice_: Mapping[str, float], oracle: Oracle, label: str | None = None) -> StructureFrame:
    """Pull the structure back to the coordinate slice ``{x^a = const}``.

    Keeps the frame combinations tangent to the slice (symbolic elimination
    against the normal symbol components), drops normal jet components and
    substitutes the slice constants.
    """
    chart = frame.chart
    if not slice_:
        return frame
    constants = {chart.index(k): float(v) for k, v in slice_.items()}
    constrained = sorted(constants)
    sub = _slice_chart(chart, constrained)
    repl = _restriction(chart, sub, constants)
    tol = oracle.atol
    sub_pts = oracle.points(sub)
    pts = _embed_points(chart, sub, constants, sub_pts)

    # clean intersection: L & (N*S (x) L) has constant rank on the slice
    normal_rows = [chart.dim + 1 + a for a in constrained]
    keep_rows = [r for r in range(2 * (chart.dim + 1)) if r not in normal_rows]
    ranks = []
    for mat in frame.matrices(pts, tol):
        ranks.append(linalg.rank(mat, tol) - linalg.rank(mat[keep_rows], tol))
    if len(set(ranks)) > 1:
        raise CleanIntersectionError("intersection with the conormal bundle changes rank", _rank_table(sub, sub_pts, ranks, "rank_conormal_intersection"))

    restricted = [[substitute(c, repl) for c in s.components()] for s in frame.sections]
    m = len(restricted)
    N = [[restricted[k][a] for k in range(m)] for a in constrained]
    R, P = _pivot_choice(N, sub_pts, tol)
    combos: list[list[Scalar]] = []
    if P:
        block = inverse([[N[r][c] for c in P] for r in R])
        for f in (k for k in range(m) if k not in P):
            coeffs = [ZERO] * m
            coeffs[f] = ONE
            solved = matvec(block, [N[r][f] for r in R])
            for pos, c in enumerate(P):
                coeffs[c] = -solved[pos]
            combos.append(coeffs)
    else:
        combos = [[ONE if k == j else ZERO for k in range(m)] for j in range(m)]

    n_sub = sub.dim
    free = [i for i in range(chart.dim) if i not in constants]
    keep = free + [chart.dim] + [chart.dim + 1 + i for i in free] + [2 * chart.dim + 1]
    candidates = []
    for coeffs in combos:
        comps = [total(coeffs[k] * restricted[k][row] for k in range(m) if not coeffs[k].is_zero()) for row in keep]
        candidates.append(OmniSection.from_components(sub, comps))

    chosen: list[OmniSection] = []
    current = None
    for cand in candidates:
        trial = StructureFrame(sub, tuple(chosen + [cand]))
        mats = trial.matrices(sub_pts, tol)
        if all(linalg.rank(mm, tol) == len(chosen) + 1 for mm in mats):
            chosen.append(cand)
            current = trial
        if len(chosen) == n_sub + 1:
            break
    if current is None or len(chosen) != n_sub + 1:
        got = 0 if current is None else len(chosen)
        raise EliminationError(f"backward image has {got} independent generators, expected {n_sub + 1}")
    return StructureFrame(sub, tuple(chosen), label or f"slice({frame.label})")


# ---------------------------------------------------------------------------
# coordinate projections


def projection_morphism(total_chart: Chart, base: Chart, factor: Scalar = ONE) -> LineBundleMorphism:
    return LineBundleMorphism(total_chart, base, tuple(total_chart.coordinate(nm) for nm in base.names), factor)


def _reindex(f: Scalar, base: Chart, total_chart: Chart) -> Scalar:
    return substitute(f, [total_chart.coordinate(nm) for nm in base.names])


def backward_image_projection(frame: StructureFrame, total_chart: Chart, factor: Scalar = ONE, label: str | None = None) -> StructureFrame:
    """Pull the structure back along ``(x, y) -> y`` with fiber factor ``c``."""
    base = frame.chart
    missing = [nm for nm in base.names if nm not in total_chart.names]
    if missing:
        raise ValueError(f"total chart lacks base coordinates {missing}")
    c = as_scalar(factor)
    F = projection_morphism(total_chart, base, c)
    sections = []
    for s in frame.sections:
        X = [ZERO] * total_chart.dim
        for j, nm in enumerate(base.names):
            X[total_chart.index(nm)] = _reindex(s.der.X[j], base, total_chart)
        a = _reindex(s.der.a, base, total_chart) + vector_field_apply(X, c) / c
        sections.append(OmniSection(Derivation(total_chart, tuple(X), a), pullback_jet(F, s.jet)))
    for i, nm in enumerate(total_chart.names):
        if nm in base.names:
            continue
        X = [ZERO] * total_chart.dim
        X[i] = ONE
        sections.append(OmniSection.of_derivation(Derivation(total_chart, tuple(X), differentiate(c, i) / c)))
    return StructureFrame(total_chart, tuple(sections), label or f"projection({frame.label})")


# ---------------------------------------------------------------------------
# pointwise forward images


@dataclass
class ForwardImage:
    basis: np.ndarray  # columns over the target omni coordinates
    rank: int
    isotropic: bool
    kernel_rank: int
    invariant: bool | None = None
    mates: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "isotropic": self.isotropic,
            "kernel_rank": self.kernel_rank,
            "invariant": self.invariant,
            "mates": self.mates,
        }


def _pairing_matrix(basis: np.ndarray, r: int) -> np.ndarray:
    der, jet = basis[:r], basis[r:]
    return der.T @ jet + jet.T @ der


def _forward_at(F: LineBundleMorphism, frame: StructureFrame, p: Point, tol: float) -> tuple[np.ndarray, int]:
    mat = frame.matrix_at(p, tol)
    blocks = split(mat, frame.chart)
    Q = pushforward_matrix(F, p, tol)
    P = pullback_jet_matrix(F, p, tol)
    m = mat.shape[1]
    sol = linalg.nullspace(np.hstack([blocks.jet, -P]), tol)
    image = np.vstack([Q @ blocks.der @ sol[:m], sol[m:]])
    kernel = linalg.nullspace(np.vstack([Q @ blocks.der, blocks.jet]), tol)
    return linalg.column_basis(image, tol), kernel.shape[1]


def forward_image_pointwise(F: LineBundleMorphism, frame: StructureFrame, p: Point, atol: float = 1e-9, mates: Sequence[Point] = ()) -> ForwardImage:
    """``{(F_* D, psi') : (D, F^* psi') in L_p}`` at ``p``, with fiber-mate invariance probes."""
    basis, kernel_rank = _forward_at(F, frame, p, atol)
    r = F.target.dim + 1
    iso = bool(np.allclose(_pairing_matrix(basis, r), 0, atol=atol * 10))
    out = ForwardImage(basis, basis.shape[1], iso, kernel_rank)
    if mates:
        out.invariant = True
        for q in mates:
            other, _ = _forward_at(F, frame, q, atol)
            same = linalg.same_span(basis, other, atol)
            out.mates.append({"point": q.as_dict(), "same": same})
            out.invariant &= same
    return out


# ---------------------------------------------------------------------------
# thickening


def _fiber_names(chart: Chart, r: int) -> list[str]:
    stem = "eps"
    while any(nm.startswith(stem) for nm in chart.names):
        stem += "_"
    return [stem] if r == 1 else [f"{stem}{k + 1}" for k in range(r)]


@dataclass
class Thickening:
    frame: StructureFrame
    theta: LForm
    omega: LForm
    fiber: list[str]
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v.get("ok", False) for v in self.checks.values())

    def to_dict(self) -> dict:
        return {"ok": self.ok, "fiber": self.fiber, "chart": list(self.frame.chart.names), "checks": self.checks}


def _membership_witness(frame: StructureFrame, vecs: Sequence[Sequence[Scalar]], oracle: Oracle, label: str) -> Witness | None:
    pts = oracle.points(frame.chart)
    memo: dict = {}
    for k, comps in enumerate(vecs):
        v = np.column_stack([values(c, pts, memo, oracle.atol) for c in comps])
        for j, mat in enumerate(frame.matrices(pts, oracle.atol)):
            if not linalg.contains(mat, v[j], oracle.atol):
                return Witness(tuple(pts[j]), frame.chart.names, float(np.linalg.norm(v[j])), 0.0, f"{label}{k}")
    return None


def thicken(frame: StructureFrame, null_frame: Sequence[Derivation], complement: Sequence[Derivation], oracle: Oracle, fiber_domain: tuple[float, float] = (-0.1, 0.1), verify: bool = True) -> Thickening:
    """Embed the structure as the zero section of a Jacobi structure on ``E^dagger``.

    ``null_frame`` spans the null der-distribution (elements of the structure
    with zero jet part), ``complement`` completes it to a frame of ``DL``.
    The result is the gauge transform by ``-d Theta_G`` of the pullback along
    the fiber projection.
    """
    from .zoo import gauge_transform

    chart = frame.chart
    n = chart.dim
    r = len(null_frame)
    if r == 0:
        return Thickening(frame, LForm(chart, 1, {}), LForm(chart, 2, {}), [], {})
    zero_jet = [list(e.components()) + [ZERO] * (n + 1) for e in null_frame]
    w = _membership_witness(frame, zero_jet, oracle, "null frame element ")
    if w is not None:
        raise ThickeningError("null frame is not inside the structure", w)
    if len(complement) + r != n + 1:
        raise ThickeningError(f"complement has {len(complement)} elements, expected {n + 1 - r}")
    cols = list(complement) + list(null_frame)
    B = [[cols[k].components()[A] for k in range(n + 1)] for A in range(n + 1)]
    pts = oracle.points(chart)
    Bnum = np.stack([np.column_stack([values(B[A][k], pts, atol=oracle.atol) for k in range(n + 1)]) for A in range(n + 1)], axis=1)
    dets = np.abs(np.linalg.det(Bnum))
    if np.min(dets) <= oracle.atol:
        j = int(np.argmin(dets))
        raise ThickeningError("null frame and complement are dependent", Witness(tuple(pts[j]), chart.names, float(dets[j]), 0.0, "frame determinant"))
    Binv = inverse(B)

    names = _fiber_names(chart, r)
    total_chart = Chart(chart.names + tuple(names), chart.domains + (fiber_domain,) * r)
    eps = [total_chart.coordinate(nm) for nm in names]
    N = total_chart.dim
    g = len(complement)
    comps: dict = {}
    for A in range(n + 1):
        # Theta_G on the A-th base frame element: fiber coordinates times null coefficients
        key = A if A < n else N
        comps[(key,)] = total(eps[l] * _reindex(Binv[g + l][A], chart, total_chart) for l in range(r))
    theta = LForm(total_chart, 1, comps)
    omega = -differential(theta)
    thick = gauge_transform(backward_image_projection(frame, total_chart), omega)
    thick = thick.relabel(f"thicken({frame.label})")
    out = Thickening(thick, theta, omega, names)
    if verify:
        out.checks = thickening_checks(out, frame, oracle)
    return out


def thickening_checks(th: Thickening, original: StructureFrame, oracle: Oracle) -> dict:
    """Jacobi near the zero section, coisotropic zero section, and recovery along it."""
    frame = th.frame
    chart = frame.chart
    tol = oracle.atol
    pts = oracle.points(chart)
    n1 = chart.dim + 1
    checks: dict = {}

    ranks = [int(linalg.nullspace(split(m, chart).jet, tol).shape[1]) for m in frame.matrices(pts, tol)]
    bad = [k for k, v in enumerate(ranks) if v != 0]
    checks["jacobi_near_zero"] = {"ok": not bad, "max_rank_L_cap_DL": max(ranks), "points": len(ranks)}
    if bad:
        checks["jacobi_near_zero"]["witness"] = Witness(tuple(pts[bad[0]]), chart.names, float(ranks[bad[0]]), 0.0, "rank L & DL").to_dict()

    zero = {nm: 0.0 for nm in th.fiber}
    base_pts = oracle.points(original.chart)
    on_zero = np.hstack([base_pts, np.zeros((base_pts.shape[0], len(th.fiber)))])
    fiber_idx = [chart.index(nm) for nm in th.fiber]
    worst = 0.0
    for mat in frame.matrices(on_zero, tol):
        blocks = split(mat, chart)
        for i in fiber_idx:
            target = np.zeros(n1)
            target[i] = 1.0
            c = linalg.solve(blocks.jet, target)
            D = blocks.der @ c
            worst = max(worst, float(np.max(np.abs(D[fiber_idx]))))
    checks["coisotropic_zero_section"] = {"ok": worst <= tol * 10, "max_fiber_symbol": worst}

    restricted = backward_image_slice(frame, zero, oracle)
    same = True
    for a, b in zip(restricted.matrices(base_pts, tol), original.matrices(base_pts, tol)):
        same &= linalg.same_span(a, b, tol)
    checks["recovers_input"] = {"ok": bool(same)}
    return checks
