"""Randomized identity suites: Cartan calculus of the der-complex and the omni bracket axioms."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .dercomplex import cartan_identities
from .omni import courant_identities, isotropy_witness, tensor_linearity_witness
from .random_data import random_derivation, random_form, random_scalar, random_section
from .scalars import Chart, Oracle, Witness
from .zoo import from_two_cocycle

COORDINATE_NAMES = ("x", "y", "z", "w")


def standard_chart(n: int) -> Chart:
    if not 1 <= n <= len(COORDINATE_NAMES):
        raise ValueError(f"dimension {n} outside 1..{len(COORDINATE_NAMES)}")
    return Chart(COORDINATE_NAMES[:n])


@dataclass
class SuiteResult:
    name: str
    dimension: int
    instances: int
    failures: int = 0
    witness: Witness | None = None

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "instances": self.instances,
            "failures": self.failures,
            "ok": self.ok,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def _record(result: SuiteResult, w: Witness | None) -> None:
    if w is not None:
        result.failures += 1
        if result.witness is None:
            result.witness = w


def cartan_suite(n: int, instances: int, oracle: Oracle, seed: int = 0) -> SuiteResult:
    """Cartan identities and the contracting homotopy on random derivations and forms of every degree."""
    chart = standard_chart(n)
    rng = np.random.default_rng(seed)
    result = SuiteResult("cartan", n, instances)
    for t in range(instances):
        degree = t % (n + 2)
        D = random_derivation(chart, rng, degree=1)
        B = random_derivation(chart, rng, degree=1)
        w = random_form(chart, degree, rng, degree=2)
        _record(result, cartan_identities(D, B, w, oracle))
    return result


def courant_suite(n: int, instances: int, oracle: Oracle, seed: int = 0) -> SuiteResult:
    """Bracket axioms on random triples of omni-sections and a random function."""
    chart = standard_chart(n)
    rng = np.random.default_rng(seed)
    result = SuiteResult("courant", n, instances)
    for _ in range(instances):
        a, b, c = (random_section(chart, rng, degree=1) for _ in range(3))
        f = random_scalar(chart, rng, degree=2)
        _record(result, courant_identities(a, b, c, f, oracle))
    return result


def tensoriality_suite(n: int, instances: int, oracle: Oracle, seed: int = 0) -> SuiteResult:
    """The Courant-Jacobi tensor is function-linear on isotropic frames (graphs of random 2-forms)."""
    chart = standard_chart(n)
    rng = np.random.default_rng(seed)
    result = SuiteResult("tensoriality", n, instances)
    for _ in range(instances):
        w = random_form(chart, 2, rng, degree=1)
        frame = from_two_cocycle(w)
        _record(result, isotropy_witness(frame, oracle))
        coeffs = [[random_scalar(chart, rng, degree=1, transcendental=False) for _ in frame.sections] for _ in range(3)]
        _record(result, tensor_linearity_witness(frame, coeffs, oracle))
    return result


@dataclass
class IdentityReport:
    suites: list[SuiteResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.suites)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "suites": [s.to_dict() for s in self.suites]}


def run_identity_suite(dimensions=(1, 2, 3), instances: int = 100, oracle: Oracle | None = None, tensor_instances: int = 10) -> IdentityReport:
    oracle = oracle or Oracle()
    report = IdentityReport()
    for n in dimensions:
        report.suites.append(cartan_suite(n, instances, oracle, seed=oracle.seed + 101 * n))
        report.suites.append(courant_suite(n, instances, oracle, seed=oracle.seed + 103 * n))
        if tensor_instances:
            report.suites.append(tensoriality_suite(n, tensor_instances, oracle, seed=oracle.seed + 107 * n))
    return report
