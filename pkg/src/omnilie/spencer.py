"""Spencer operators of Dirac-Jacobi structures and their axioms.

Sections of the structure are smooth combinations of the frame. The
algebroid bracket is the Dorfman bracket followed by projection onto the
structure along a coordinate Lagrangian complement; on an involutive frame
the projection is the identity, on a non-involutive one it is what turns
the Spencer identities into a genuine test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .linebundle import Derivation, Jet1, apply_derivation, commutator, vector_field_apply
from .omni import OmniSection, StructureFrame, combine, dorfman, omni_pairing
from .random_data import random_scalar
from .scalars import ZERO, Chart, Oracle, Scalar, Witness, as_scalar, compare, differentiate, total, values
from .symbolic import inverse, matvec


@dataclass(frozen=True)
class ClassicalSpencer:
    one_form: tuple[Scalar, ...]
    ell: Scalar


def classical_spencer(psi: Jet1) -> ClassicalSpencer:
    """``(d g - eta, g)`` for ``psi = (eta, g)``."""
    n = psi.chart.dim
    return ClassicalSpencer(tuple(differentiate(psi.g, i) - psi.eta[i] for i in range(n)), psi.g)


@dataclass(frozen=True)
class SpencerData:
    operator: tuple[Scalar, ...]
    ell: Scalar
    connection: Derivation
    anchor: tuple[Scalar, ...]


def section_of(frame: StructureFrame, coeffs: Sequence) -> OmniSection:
    if len(coeffs) != len(frame):
        raise ValueError(f"expected {len(frame)} coefficients")
    return combine(frame.sections, [as_scalar(c) for c in coeffs])


def spencer_of_section(section: OmniSection) -> SpencerData:
    cs = classical_spencer(section.jet)
    return SpencerData(cs.one_form, cs.ell, section.der, tuple(section.der.X))


def spencer_of_structure(frame: StructureFrame, coeffs: Sequence) -> SpencerData:
    """Spencer operator, ``l``, connection and anchor of ``sum c_k alpha_k``."""
    return spencer_of_section(section_of(frame, coeffs))


def lie_derivative_valued(D: Derivation, form: Sequence[Scalar]) -> tuple[Scalar, ...]:
    """``(L_D w)_i = X^j d_j w_i + a w_i + w_j d_i X^j`` for a line-valued 1-form."""
    n = D.chart.dim
    return tuple(
        total([vector_field_apply(D.X, form[i]), D.a * form[i]] + [form[j] * differentiate(D.X[j], i) for j in range(n)])
        for i in range(n)
    )


# ---------------------------------------------------------------------------
# the algebroid bracket


def _complement_sections(chart: Chart, derivation_slots: Sequence[int]) -> list[OmniSection]:
    r = chart.dim + 1
    out = []
    for A in range(r):
        comps = [ZERO] * (2 * r)
        comps[A if A in derivation_slots else r + A] = as_scalar(1)
        out.append(OmniSection.from_components(chart, comps))
    return out


@dataclass
class ProjectedBracket:
    """Dorfman bracket projected onto a maximal isotropic frame along a Lagrangian complement."""

    frame: StructureFrame
    complement: list[OmniSection]
    solver: list[list[Scalar]]

    @classmethod
    def build(cls, frame: StructureFrame, oracle: Oracle) -> "ProjectedBracket":
        chart = frame.chart
        r = chart.dim + 1
        pts = oracle.points(chart)
        best = None
        for size in range(r + 1):
            for slots in combinations(range(r), size):
                comp = _complement_sections(chart, slots)
                P = [[omni_pairing(a, c) for c in comp] for a in frame.sections]
                num = np.stack([np.column_stack([values(P[j][l], pts, atol=oracle.atol) for l in range(r)]) for j in range(len(P))], axis=1)
                score = float(np.min(np.abs(np.linalg.det(num))))
                if best is None or score > best[0]:
                    best = (score, comp, P)
        score, comp, P = best
        if score <= oracle.atol:
            raise ValueError("no coordinate Lagrangian complement is transverse at every sample point")
        return cls(frame, comp, inverse(P))

    def defect(self, bracket: OmniSection) -> list[Scalar]:
        return [omni_pairing(bracket, a) for a in self.frame.sections]

    def __call__(self, a: OmniSection, b: OmniSection) -> OmniSection:
        raw = dorfman(a, b)
        d = matvec(self.solver, self.defect(raw))
        return raw - combine(self.complement, d)


# ---------------------------------------------------------------------------
# verdict


@dataclass
class SpencerVerdict:
    ok: bool
    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, Witness] = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def first_witness(self) -> Witness | None:
        for k in sorted(self.witnesses):
            return self.witnesses[k]
        return None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": dict(sorted(self.checks.items())),
            "witnesses": {k: w.to_dict() for k, w in sorted(self.witnesses.items())},
        }


def verify_spencer_axioms(frame: StructureFrame, oracle: Oracle, trials: int = 2, seed: int | None = None) -> SpencerVerdict:
    """Spencer identities, anchor compatibility, the representation law and bracket closure.

    Random sections ``alpha = sum f_k alpha_k``, ``beta = sum g_k alpha_k``
    with seeded coefficient functions; every identity is compared under the
    oracle and the first failing point is reported.
    """
    chart = frame.chart
    n = chart.dim
    rng = np.random.default_rng(oracle.seed if seed is None else seed)
    bracket = ProjectedBracket.build(frame, oracle)
    groups: dict[str, tuple[list, list, list]] = {
        k: ([], [], []) for k in ("spencer_leibniz", "spencer_bracket", "spencer_ell", "anchor", "representation", "closure", "symmetric_part")
    }

    def add(key, lhs, rhs, label):
        L, R, labels = groups[key]
        L.extend(lhs)
        R.extend(rhs)
        labels.extend(f"{label}[{i}]" for i in range(len(lhs)))

    for t in range(trials):
        f = [random_scalar(chart, rng, degree=1) for _ in frame.sections]
        g = [random_scalar(chart, rng, degree=1) for _ in frame.sections]
        h = random_scalar(chart, rng, degree=2)
        alpha, beta = section_of(frame, f), section_of(frame, g)
        sa, sb = spencer_of_section(alpha), spencer_of_section(beta)

        fa = spencer_of_section(alpha.scale(h))
        add("spencer_leibniz", fa.operator, [h * w + differentiate(h, i) * sa.ell for i, w in enumerate(sa.operator)], f"trial{t}")

        br = bracket(alpha, beta)
        sbr = spencer_of_section(br)
        la = lie_derivative_valued(sa.connection, sb.operator)
        lb = lie_derivative_valued(sb.connection, sa.operator)
        add("spencer_bracket", sbr.operator, [p - q for p, q in zip(la, lb)], f"trial{t}")
        contraction = total(x * w for x, w in zip(sb.anchor, sa.operator))
        add("spencer_ell", [sbr.ell], [apply_derivation(sa.connection, sb.ell) - contraction], f"trial{t}")
        add("anchor", list(sa.anchor), list(sa.connection.X), f"trial{t}")
        add("representation", list(br.der.components()), list(commutator(sa.connection, sb.connection).components()), f"trial{t}")
        add("closure", bracket.defect(dorfman(alpha, beta)), [ZERO] * len(frame), f"trial{t}")
        add("symmetric_part", [br.jet.g + bracket(beta, alpha).jet.g], [ZERO], f"trial{t}")

    checks, witnesses = {}, {}
    for key, (lhs, rhs, labels) in groups.items():
        w = compare(lhs, rhs, chart, oracle, labels)
        checks[key] = w is None
        if w is not None:
            witnesses[key] = w
    return SpencerVerdict(all(checks.values()), checks, witnesses)
