"""The der-complex: L-valued alternating forms on Der L.

Forms are stored by components over the frame ``(delta_1..delta_n, 1)``,
indexed by strictly increasing tuples; frame index ``n`` is the identity
derivation. All frame brackets vanish, so the differential is a finite
Koszul sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Mapping

import numpy as np

from .linebundle import Derivation, Jet1, _same_chart, apply_derivation
from .scalars import ZERO, Chart, Oracle, Point, Scalar, Witness, as_scalar, compare, differentiate, total, values
from . import linalg


class NotClosed(ValueError):
    def __init__(self, witness: Witness):
        self.witness = witness
        super().__init__(f"form is not closed: {witness}")


@dataclass(frozen=True)
class LForm:
    chart: Chart
    degree: int
    comps: Mapping[tuple[int, ...], Scalar] = field(default_factory=dict)

    def __post_init__(self):
        rank = self.chart.dim + 1
        if not 0 <= self.degree <= rank:
            raise ValueError(f"degree {self.degree} outside 0..{rank}")
        clean: dict[tuple[int, ...], Scalar] = {}
        for key, val in dict(self.comps).items():
            key = tuple(key)
            if len(key) != self.degree or list(key) != sorted(set(key)) or any(not 0 <= k < rank for k in key):
                raise ValueError(f"bad component index {key} for degree {self.degree}")
            val = as_scalar(val)
            if not val.is_zero():
                clean[key] = val
        object.__setattr__(self, "comps", clean)

    @property
    def rank(self) -> int:
        return self.chart.dim + 1

    def component(self, key: tuple[int, ...]) -> Scalar:
        return self.comps.get(tuple(key), ZERO)

    def value(self, indices: tuple[int, ...]) -> Scalar:
        """Component at an arbitrary ordered index tuple, with sign."""
        if len(set(indices)) < len(indices):
            return ZERO
        order = sorted(range(len(indices)), key=lambda k: indices[k])
        sign = _perm_sign(order)
        c = self.component(tuple(sorted(indices)))
        return c if sign > 0 else -c

    def keys(self) -> list[tuple[int, ...]]:
        return list(combinations(range(self.rank), self.degree))

    def __add__(self, other: "LForm") -> "LForm":
        _check(self, other)
        keys = set(self.comps) | set(other.comps)
        return LForm(self.chart, self.degree, {k: self.component(k) + other.component(k) for k in keys})

    def __sub__(self, other: "LForm") -> "LForm":
        _check(self, other)
        keys = set(self.comps) | set(other.comps)
        return LForm(self.chart, self.degree, {k: self.component(k) - other.component(k) for k in keys})

    def __neg__(self) -> "LForm":
        return LForm(self.chart, self.degree, {k: -v for k, v in self.comps.items()})

    def scale(self, f) -> "LForm":
        f = as_scalar(f)
        return LForm(self.chart, self.degree, {k: f * v for k, v in self.comps.items()})

    def all_components(self) -> list[Scalar]:
        return [self.component(k) for k in self.keys()]

    def matrix_at(self, pts: np.ndarray, atol: float = 1e-9) -> np.ndarray:
        """For degree 2: antisymmetric matrices of shape ``(N, n+1, n+1)``."""
        if self.degree != 2:
            raise ValueError("matrix_at needs a 2-form")
        r = self.rank
        out = np.zeros((pts.shape[0], r, r))
        memo: dict = {}
        for (i, j), v in self.comps.items():
            vals = values(v, pts, memo, atol)
            out[:, i, j] = vals
            out[:, j, i] = -vals
        return out


def _check(a: LForm, b: LForm) -> None:
    _same_chart(a.chart, b.chart)
    if a.degree != b.degree:
        raise ValueError("degree mismatch")


def _perm_sign(order) -> int:
    order = list(order)
    sign = 1
    for i in range(len(order)):
        while order[i] != i:
            j = order[i]
            order[i], order[j] = order[j], order[i]
            sign = -sign
    return sign


def zero_form(chart: Chart, degree: int) -> LForm:
    return LForm(chart, degree, {})


def scalar_form(f: Scalar, chart: Chart) -> LForm:
    return LForm(chart, 0, {(): f})


def jet_to_form(psi: Jet1) -> LForm:
    """Degree-1 form with components ``(eta_i; g)``."""
    n = psi.chart.dim
    comps = {(i,): e for i, e in enumerate(psi.eta)}
    comps[(n,)] = psi.g
    return LForm(psi.chart, 1, comps)


def form_to_jet(w: LForm) -> Jet1:
    if w.degree != 1:
        raise ValueError("only degree-1 forms are jets")
    n = w.chart.dim
    return Jet1(w.chart, tuple(w.component((i,)) for i in range(n)), w.component((n,)))


def _frame_act(index: int, f: Scalar, n: int) -> Scalar:
    # delta_i acts as d_i, the identity derivation as multiplication by one
    return f if index == n else differentiate(f, index)


def differential(w: LForm) -> LForm:
    """Der-complex differential via the Koszul formula with vanishing brackets."""
    n = w.chart.dim
    k = w.degree
    if k > n:
        raise ValueError(f"degree {k} form has no differential on a rank-{n + 1} frame")
    comps = {}
    for key in combinations(range(n + 1), k + 1):
        terms = []
        for j, idx in enumerate(key):
            rest = key[:j] + key[j + 1 :]
            c = w.component(rest)
            if c.is_zero():
                continue
            t = _frame_act(idx, c, n)
            terms.append(t if j % 2 == 0 else -t)
        comps[key] = total(terms)
    return LForm(w.chart, k + 1, comps)


def contract(D: Derivation, w: LForm) -> LForm:
    """``i_D w = w(D, -, ..., -)``."""
    _same_chart(D.chart, w.chart)
    if w.degree < 1:
        raise ValueError("cannot contract a degree-0 form")
    coeffs = D.components()
    comps = {}
    for key in combinations(range(w.rank), w.degree - 1):
        terms = []
        for A, cA in enumerate(coeffs):
            if cA.is_zero() or A in key:
                continue
            v = w.value((A,) + key)
            if not v.is_zero():
                terms.append(cA * v)
        comps[key] = total(terms)
    return LForm(w.chart, w.degree - 1, comps)


def lie_derivative(D: Derivation, w: LForm) -> LForm:
    """Cartan formula ``i_D d + d i_D``."""
    if w.degree == 0:
        return LForm(w.chart, 0, {(): apply_derivation(D, w.component(()))})
    out = contract(D, differential(w)) if w.degree <= w.chart.dim else zero_form(w.chart, w.degree)
    return out + differential(contract(D, w))


def wedge_pair_value(w: LForm, D1: Derivation, D2: Derivation) -> Scalar:
    """``w(D1, D2)`` for a 2-form."""
    return contract(D2, contract(D1, w)).component(())


def precontact_lift(theta, chart: Chart) -> LForm:
    """``Theta = theta o sigma``: components ``(theta_i; 0)``."""
    return LForm(chart, 1, {(i,): as_scalar(t) for i, t in enumerate(theta)})


def cocycle_from_precontact(theta, chart: Chart) -> LForm:
    """``omega = -d_D Theta``; the round trip ``-i_1 omega = Theta`` holds."""
    theta = list(theta)
    if len(theta) != chart.dim:
        raise ValueError("theta needs one component per coordinate")
    return -differential(precontact_lift(theta, chart))


def is_closed(w: LForm, oracle: Oracle) -> Witness | None:
    if w.degree > w.chart.dim:
        return None
    dw = differential(w)
    keys = dw.keys()
    return compare([dw.component(k) for k in keys], [ZERO] * len(keys), w.chart, oracle, [str(k) for k in keys])


def precontact_from_cocycle(w: LForm, oracle: Oracle) -> list[Scalar]:
    """``Theta = -i_1 omega``; raises ``NotClosed`` with a witness."""
    if w.degree != 2:
        raise ValueError("expected a 2-form")
    witness = is_closed(w, oracle)
    if witness is not None:
        raise NotClosed(witness)
    theta = -contract(Derivation.identity(w.chart), w)
    return [theta.component((i,)) for i in range(w.chart.dim)]


@dataclass(frozen=True)
class FormKernel:
    kernel: np.ndarray  # columns over the frame of D_pL
    symbols: np.ndarray  # sigma of the kernel, columns in T_pM
    rank: int


def form_kernel_at_point(w: LForm, p: Point, atol: float = 1e-9) -> FormKernel:
    """Kernel of ``omega_flat`` at ``p`` and its symbol image."""
    _same_chart(w.chart, p.chart)
    mat = w.matrix_at(p.array(), atol)[0]
    ker = linalg.nullspace(mat, atol)
    sym = linalg.column_basis(ker[:-1, :], atol) if ker.shape[1] else np.zeros((w.chart.dim, 0))
    return FormKernel(ker, sym, linalg.rank(mat, atol))


def _form_pairs(label: str, a: LForm, b: LForm) -> tuple[list[Scalar], list[Scalar], list[str]]:
    _check(a, b)
    keys = sorted(set(a.keys()) | set(b.keys()))
    return [a.component(k) for k in keys], [b.component(k) for k in keys], [f"{label}{k}" for k in keys]


def cartan_identities(D: Derivation, B: Derivation, w: LForm, oracle: Oracle) -> Witness | None:
    """Graded commutator identities of ``d``, ``i`` and ``L`` plus the homotopy ``[i_1, d] = id``."""
    from .linebundle import commutator

    chart = w.chart
    k, top = w.degree, w.rank
    lhs: list[Scalar] = []
    rhs: list[Scalar] = []
    labels: list[str] = []

    def add(label, a, b):
        l, r, lab = _form_pairs(label, a, b)
        lhs.extend(l)
        rhs.extend(r)
        labels.extend(lab)

    DB = commutator(D, B)
    if k + 2 <= top:
        add("d^2", differential(differential(w)), zero_form(chart, k + 2))
    if k >= 2:
        add("[i,i]", contract(D, contract(B, w)) + contract(B, contract(D, w)), zero_form(chart, k - 2))
    if k + 1 <= top:
        add("[L,d]", lie_derivative(D, differential(w)), differential(lie_derivative(D, w)))
    if k >= 1:
        add("[L,i]", lie_derivative(D, contract(B, w)) - contract(B, lie_derivative(D, w)), contract(DB, w))
    add("[L,L]", lie_derivative(D, lie_derivative(B, w)) - lie_derivative(B, lie_derivative(D, w)), lie_derivative(DB, w))
    unit = Derivation.identity(chart)
    homotopy = zero_form(chart, k)
    if k >= 1:
        homotopy = homotopy + differential(contract(unit, w))
    if k + 1 <= top:
        homotopy = homotopy + contract(unit, differential(w))
    add("homotopy", homotopy, w)
    if not lhs:
        return None
    return compare(lhs, rhs, chart, oracle, labels)
