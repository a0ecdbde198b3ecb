"""Acceptance criteria: one PASS/FAIL line per criterion, each under a minute.

Run with ``pytest tests/test_acceptance.py -v`` (lines are repeated in the
terminal summary) or ``python3 tests/test_acceptance.py``.
"""

import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from omnilie.analysis import LCPS, PRECONTACT, grid_parity, point_report
from omnilie.dercomplex import LForm, differential
from omnilie.diracization import characteristic_dimension_check, diracize, lift_laws
from omnilie.linalg import same_span
from omnilie.linebundle import Derivation
from omnilie.morphisms import backward_image_slice, thicken
from omnilie.omni import OmniSection, StructureFrame, classify_subbundle, tensor_linearity_witness
from omnilie.random_data import random_form, random_scalar, random_section
from omnilie.scalars import Chart, Oracle, as_scalar, compare
from omnilie.selftest import cartan_suite, courant_suite, standard_chart, tensoriality_suite
from omnilie.spencer import verify_spencer_axioms
from omnilie.zoo import (
    HomogeneousPoissonData,
    JacobiMatrix,
    check_homogeneous,
    from_flat_connection,
    from_homogeneous_poisson,
    from_jacobi,
    from_lcps,
    from_two_cocycle,
    recognize,
    unit_structure,
)

ORACLE = Oracle(seed=0, samples=32, atol=1e-9, rtol=1e-9)
TIME_LIMIT = 60.0
ROOT = Path(__file__).resolve().parents[1]
RESULTS: list[str] = []


def _record(number: int, title: str, fn):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed < TIME_LIMIT
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title} ({elapsed:.1f}s) {detail}"
    RESULTS.append(line)
    print(line)
    return ok, line


def _worked(chart):
    return JacobiMatrix.from_parts(chart, [-chart.coordinate("x")], [0, 1])


def _worked_slice():
    chart = Chart(("x", "y"))
    return backward_image_slice(from_jacobi(_worked(chart)), {"y": 0.0}, ORACLE)


# ---------------------------------------------------------------------------


def crit_cartan():
    parts = [cartan_suite(n, 100, ORACLE, seed=101 * n) for n in (1, 2, 3)]
    return all(p.ok for p in parts), " ".join(f"n={p.dimension}:{p.instances - p.failures}/{p.instances}" for p in parts)


def crit_courant():
    parts = [courant_suite(n, 100, ORACLE, seed=103 * n) for n in (1, 2, 3)]
    tens = [tensoriality_suite(n, 20, ORACLE, seed=107 * n) for n in (1, 2, 3)]
    # negative control: the tensor of a non-isotropic frame is not function-linear
    chart = standard_chart(2)
    rng = np.random.default_rng(9)
    frame = StructureFrame(chart, (random_section(chart, rng, degree=1), random_section(chart, rng, degree=1), random_section(chart, rng, degree=1)))
    coeffs = [[random_scalar(chart, rng, degree=1, transcendental=False) for _ in range(3)] for _ in range(3)]
    control = tensor_linearity_witness(frame, coeffs, ORACLE) is not None
    ok = all(p.ok for p in parts + tens) and control
    detail = " ".join(f"n={p.dimension}:{p.instances - p.failures}/{p.instances}" for p in parts)
    detail += " tensor:" + ",".join(f"{t.instances - t.failures}/{t.instances}" for t in tens) + f" control_detects={control}"
    return ok, detail


def crit_cocycle():
    details, ok = [], True
    for n in (2, 3):
        chart = standard_chart(n)
        rng = np.random.default_rng(n)
        closed = differential(random_form(chart, 1, rng, degree=2))
        x = chart.coordinate(0)
        open_ = LForm(chart, 2, {(0, 1): x * x + as_scalar(1)})
        c1 = classify_subbundle(from_two_cocycle(closed), ORACLE)
        c2 = classify_subbundle(from_two_cocycle(open_), ORACLE)
        closed_ok = compare(differential(closed).all_components(), [as_scalar(0)] * len(differential(closed).all_components()), chart, ORACLE) is None
        ok &= c1.dirac_jacobi and closed_ok and not c2.dirac_jacobi and bool(c2.witnesses)
        details.append(f"n={n}: closed={c1.dirac_jacobi} open={c2.dirac_jacobi} witness={bool(c2.witnesses)}")
    chart = Chart(("x", "y"))
    x, y = chart.coordinates()
    good = classify_subbundle(from_jacobi(_worked(chart)), ORACLE)
    bad = classify_subbundle(from_jacobi(JacobiMatrix.from_parts(chart, [-x], [y * y, 1])), ORACLE)
    ok &= good.dirac_jacobi and not bad.dirac_jacobi and bool(bad.witnesses)
    details.append(f"J={good.dirac_jacobi} J+y^2={bad.dirac_jacobi}")
    return ok, "; ".join(details)


def crit_slice():
    sl = _worked_slice()
    chart = sl.chart
    x = chart.coordinate("x")
    expected = StructureFrame(chart, (OmniSection.from_components(chart, [x, 1, 0, 0]), OmniSection.from_components(chart, [0, 0, 1, -x])))
    pts = ORACLE.points(chart)
    span_ok = all(same_span(a, b) for a, b in zip(sl.matrices(pts), expected.matrices(pts)))
    e_ranks = {point_report(sl, chart.point(v)).rank_null_der for v in pts[:, 0]}
    k_nonzero = {point_report(sl, chart.point(v)).rank_null for v in pts[:, 0]}
    k_zero = point_report(sl, chart.point(0.0)).rank_null
    e_zero = point_report(sl, chart.point(0.0)).rank_null_der
    ok = span_ok and e_ranks == {1} and e_zero == 1 and k_nonzero == {1} and k_zero == 0
    return ok, f"span={span_ok} rankE={sorted(e_ranks)} rankK(x!=0)={sorted(k_nonzero)} rankK(0)={k_zero}"


def crit_homogeneous():
    chart = Chart(("x", "y"))
    x, y = chart.coordinates()
    good = HomogeneousPoissonData.from_upper(chart, [1], [x, 0])
    rec = recognize(from_homogeneous_poisson(good), ORACLE)
    hp = rec.homogeneous_poisson
    round_trip = hp is not None and compare(list(hp.vector) + [hp.bivector[0][1]], list(good.vector) + [good.bivector[0][1]], chart, ORACLE) is None
    dj = classify_subbundle(from_homogeneous_poisson(good), ORACLE).dirac_jacobi
    bad = HomogeneousPoissonData.from_upper(chart, [x], [x, 0])
    bad_fails = check_homogeneous(bad, ORACLE) is not None and not classify_subbundle(from_homogeneous_poisson(bad), ORACLE).dirac_jacobi
    return round_trip and dj and bad_fails, f"round_trip={round_trip} dirac={dj} violating_fails={bad_fails}"


def crit_point_table():
    ok, details = True, []
    for n in (1, 2):
        chart = standard_chart(n)
        x = chart.coordinate(0)
        table = [
            ("unit", unit_structure(chart), dict(rank_null_der=1, rank_null=0, tag=PRECONTACT, leaf_dimension=0)),
            ("flat", from_flat_connection([x] + [as_scalar(0)] * (n - 1), chart), dict(rank_null_der=n, rank_null=n, tag=LCPS, leaf_dimension=n)),
        ]
        if n == 2:
            table.append(("jacobi", from_jacobi(_worked(chart)), dict(rank_null_der=0, rank_null=0)))
        for name, frame, expect in table:
            for p in ORACLE.points(chart):
                rep = point_report(frame, chart.point(*p))
                got = {k: getattr(rep, k) for k in expect}
                if got != expect:
                    ok = False
                    details.append(f"{name} n={n} at {p}: {got}")
                    break
            parity = grid_parity(frame, 5)
            ok &= parity.ok
            details.append(f"{name}(n={n}) parity={parity.ok}")
    chart = standard_chart(2)
    rep0 = point_report(from_jacobi(_worked(chart)), chart.point(0.0, 0.3))
    rep1 = point_report(from_jacobi(_worked(chart)), chart.point(0.5, 0.3))
    jac_ok = (rep0.tag, rep0.leaf_dimension, rep1.tag, rep1.leaf_dimension) == (PRECONTACT, 1, LCPS, 2)
    ok &= jac_ok
    details.append(f"jacobi x=0:{rep0.tag}/{rep0.leaf_dimension} x=0.5:{rep1.tag}/{rep1.leaf_dimension}")
    return ok, " ".join(details)


def _zoo_small():
    out = []
    for n in (1, 2):
        chart = standard_chart(n)
        x = chart.coordinate(0)
        out += [unit_structure(chart), from_flat_connection([x] + [as_scalar(0)] * (n - 1), chart), from_two_cocycle(LForm(chart, 2, {(0, n): x}))]
        if n == 1:
            out.append(from_jacobi(JacobiMatrix.from_parts(chart, [], [1])))
        else:
            y = chart.coordinate(1)
            out += [
                from_jacobi(_worked(chart)),
                from_lcps([0, 0], [[0, 1], [-1, 0]], chart),
                from_homogeneous_poisson(HomogeneousPoissonData.from_upper(chart, [1], [x, 0])),
                from_two_cocycle(LForm(chart, 2, {(0, 1): as_scalar(2), (0, 2): y, (1, 2): -x})),
            ]
    return out


def crit_diracize():
    zoo = _zoo_small()
    lifted = [diracize(f, ORACLE).ok for f in zoo]
    pairs_ok = 0
    for k in range(50):
        chart = standard_chart(1 + k % 2)
        rng = np.random.default_rng(1000 + k)
        a, b = random_section(chart, rng), random_section(chart, rng)
        pairs_ok += lift_laws(a, b, random_scalar(chart, rng), ORACLE) is None
    dims = []
    for n in (1, 2):
        chart = standard_chart(n)
        for frame in (unit_structure(chart), from_flat_connection([as_scalar(0)] * n, chart)):
            for p in ORACLE.points(chart)[:8]:
                dims.append(characteristic_dimension_check(frame, chart.point(*p)).ok)
    ok = all(lifted) and pairs_ok == 50 and all(dims)
    return ok, f"dirac {sum(lifted)}/{len(lifted)} intertwining {pairs_ok}/50 dimension {sum(dims)}/{len(dims)}"


def crit_spencer():
    chart = Chart(("x", "y"))
    verdicts = {
        "jacobi": verify_spencer_axioms(from_jacobi(_worked(chart)), ORACLE),
        "flat": verify_spencer_axioms(from_flat_connection([chart.coordinate("y"), chart.coordinate("x")], chart), ORACLE),
        "slice": verify_spencer_axioms(_worked_slice(), ORACLE),
    }
    bad_frame = from_two_cocycle(LForm(chart, 2, {(0, 1): chart.coordinate("x")}))
    iso = classify_subbundle(bad_frame, ORACLE)
    neg = verify_spencer_axioms(bad_frame, ORACLE)
    ok = all(v.ok for v in verdicts.values()) and iso.isotropic and iso.maximal and not iso.involutive
    ok &= not neg.ok and neg.first_witness() is not None
    detail = " ".join(f"{k}={v.ok}" for k, v in verdicts.items())
    failed = sorted(k for k, v in neg.checks.items() if not v)
    return ok, f"{detail} non_involutive={neg.ok} (failing: {','.join(failed)})"


def crit_thicken():
    sl = _worked_slice()
    chart = sl.chart
    x = chart.coordinate("x")
    th = thicken(sl, [Derivation(chart, (x,), 1)], [Derivation.coordinate(chart, 0)], ORACLE)
    pts = ORACLE.points(th.frame.chart)
    eps_ok = bool(np.all(np.abs(pts[:, 1]) <= 0.1))
    jac = th.checks["jacobi_near_zero"]
    ok = th.ok and eps_ok and jac["points"] == 32 and jac["max_rank_L_cap_DL"] == 0 and th.checks["recovers_input"]["ok"]
    return ok, f"rank(L&DL)={jac['max_rank_L_cap_DL']} at {jac['points']} points |eps|<=0.1:{eps_ok} recovers={th.checks['recovers_input']['ok']} coisotropic={th.checks['coisotropic_zero_section']['ok']}"


def crit_cli():
    doc = ROOT / "documents" / "worked_example.yaml"
    outs = []
    with tempfile.TemporaryDirectory() as tmp:
        for k in range(2):
            target = Path(tmp) / f"r{k}.json"
            subprocess.run([sys.executable, "-m", "omnilie", "run", str(doc), "--seed", "11", "--format", "json", "--output", str(target)], check=False)
            outs.append(target.read_bytes() if target.exists() else b"")
    same = bool(outs[0]) and outs[0] == outs[1]
    return same, f"identical={same} bytes={len(outs[0])}"


CRITERIA = [
    (1, "Cartan identities, 100 instances for n=1,2,3", crit_cartan),
    (2, "bracket axioms cour1-4 and tensoriality", crit_courant),
    (3, "cocycle graph is Dirac-Jacobi iff closed", crit_cocycle),
    (4, "worked slice span, E and K ranks", crit_slice),
    (5, "homogeneous Poisson round trip and violation", crit_homogeneous),
    (6, "point reports and parity on a 5^n grid", crit_point_table),
    (7, "diracization, intertwining, dimension relation", crit_diracize),
    (8, "Spencer axioms and negative control", crit_spencer),
    (9, "thickening is Jacobi near zero and recovers input", crit_thicken),
    (10, "CLI JSON byte-identical for a fixed seed", crit_cli),
]


def _make(number, title, fn):
    def test():
        ok, line = _record(number, title, fn)
        assert ok, line

    test.__name__ = f"test_criterion_{number:02d}"
    return test


for _number, _title, _fn in CRITERIA:
    globals()[f"test_criterion_{_number:02d}"] = _make(_number, _title, _fn)


if __name__ == "__main__":
    failures = sum(not _record(n, t, f)[0] for n, t, f in CRITERIA)
    sys.exit(1 if failures else 0)
