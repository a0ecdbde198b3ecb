"""Document loader, check runner and report emitter behind the ``omnilie`` command.

A document is YAML with a chart, oracle settings, labelled structures built
by named constructors, and a list of checks. Every expression is a string in
the scalar grammar over the chart coordinates.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
import yaml

from . import linalg
from .analysis import (
    grid_parity,
    is_admissible_function,
    is_admissible_section,
    normalize_frame_at_point,
    null_dichotomy_check,
    point_report,
    reconstruction_check,
)
from .dercomplex import LForm, cocycle_from_precontact
from .diracization import characteristic_dimension_check, diracize
from .linebundle import Derivation, Jet1, LineBundleMorphism
from .morphisms import backward_image_slice, forward_image_pointwise, thicken
from .omni import OmniSection, StructureFrame, classify_subbundle
from .scalars import Chart, Oracle, ParseError, Point, Scalar, grid_points, parse_scalar
from .selftest import run_identity_suite
from .spencer import verify_spencer_axioms
from .zoo import (
    HomogeneousPoissonData,
    JacobiMatrix,
    antisymmetric_from_upper,
    check_homogeneous,
    from_flat_connection,
    from_homogeneous_poisson,
    from_jacobi,
    from_lcps,
    from_two_cocycle,
    gauge_transform,
    lift_dirac,
    recognize,
    unit_structure,
)

SCHEMA = "omnilie-report"
SCHEMA_VERSION = 1
DOCUMENT_VERSION = 1
EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class DocumentError(ValueError):
    """Invalid input document; ``where`` locates the offending entry."""

    def __init__(self, message: str, where: str = "", line: int | None = None, column: int | None = None):
        self.where, self.line, self.column = where, line, column
        loc = where
        if line is not None:
            loc = f"line {line}, column {column}" + (f" ({where})" if where else "")
        super().__init__(f"{loc}: {message}" if loc else message)


# ---------------------------------------------------------------------------
# document model


@dataclass
class StructureSpec:
    label: str
    constructor: str
    params: dict
    frame: StructureFrame


@dataclass
class CheckSpec:
    verb: str
    args: dict
    index: int


@dataclass
class Document:
    path: str
    chart: Chart
    oracle: Oracle
    structures: dict[str, StructureSpec] = field(default_factory=dict)
    checks: list[CheckSpec] = field(default_factory=list)

    def structure(self, label: str, where: str = "") -> StructureFrame:
        if label not in self.structures:
            raise DocumentError(f"unknown structure label {label!r}", where)
        return self.structures[label].frame


def _expr(text: Any, chart: Chart, where: str) -> Scalar:
    try:
        return parse_scalar(str(text), chart)
    except ParseError as exc:
        raise DocumentError(f"cannot parse {text!r}: {exc}", where) from exc


def _exprs(texts: Any, chart: Chart, where: str, length: int | None = None) -> list[Scalar]:
    if isinstance(texts, str):
        texts = texts.split(",")
    if not isinstance(texts, (list, tuple)):
        raise DocumentError("expected a list of expressions", where)
    if length is not None and len(texts) != length:
        raise DocumentError(f"expected {length} expressions, got {len(texts)}", where)
    return [_expr(t, chart, f"{where}[{k}]") for k, t in enumerate(texts)]


def _slot(name: str, chart: Chart, where: str) -> int:
    """Frame index of a form slot: a coordinate name or ``1`` for the identity derivation."""
    name = name.strip()
    if name == "1":
        return chart.dim
    if name not in chart.names:
        raise DocumentError(f"unknown slot {name!r}", where)
    return chart.index(name)


def _form(spec: Any, chart: Chart, degree: int, where: str) -> LForm:
    """Form components keyed by comma-separated slots, e.g. ``"x,y"`` or ``"x,1"``."""
    if not isinstance(spec, dict):
        raise DocumentError("expected a mapping of slot tuples to expressions", where)
    comps: dict[tuple[int, ...], Scalar] = {}
    for key, text in spec.items():
        slots = [_slot(s, chart, where) for s in str(key).split(",")]
        if len(slots) != degree or len(set(slots)) != degree:
            raise DocumentError(f"slot key {key!r} needs {degree} distinct entries", where)
        order = sorted(range(degree), key=lambda k: slots[k])
        sign = 1
        perm = list(order)
        for i in range(degree):
            while perm[i] != i:
                j = perm[i]
                perm[i], perm[j] = perm[j], perm[i]
                sign = -sign
        value = _expr(text, chart, f"{where}.{key}")
        key_sorted = tuple(sorted(slots))
        comps[key_sorted] = comps.get(key_sorted, parse_scalar("0", chart)) + (value if sign > 0 else -value)
    return LForm(chart, degree, comps)


def _upper(spec: Any, chart: Chart, where: str) -> dict | list:
    """Bivector upper triangle: list in lexicographic pair order or mapping ``"x,y": expr``."""
    if isinstance(spec, dict):
        out = {}
        for key, text in spec.items():
            a, b = (_slot(s, chart, where) for s in str(key).split(","))
            if a == chart.dim or b == chart.dim:
                raise DocumentError("bivector slots must be coordinates", where)
            v = _expr(text, chart, f"{where}.{key}")
            out[(min(a, b), max(a, b))] = v if a < b else -v
        return out
    n = chart.dim
    return _exprs(spec, chart, where, n * (n - 1) // 2)


def _sections(spec: Any, chart: Chart, where: str) -> list[OmniSection]:
    if not isinstance(spec, list) or not spec:
        raise DocumentError("expected a nonempty list of sections", where)
    out = []
    for k, s in enumerate(spec):
        w = f"{where}[{k}]"
        if not isinstance(s, dict):
            raise DocumentError("a section needs 'derivation' and 'jet' lists", w)
        der = _exprs(s.get("derivation", ["0"] * (chart.dim + 1)), chart, f"{w}.derivation", chart.dim + 1)
        jet = _exprs(s.get("jet", ["0"] * (chart.dim + 1)), chart, f"{w}.jet", chart.dim + 1)
        out.append(OmniSection(Derivation.from_components(chart, der), Jet1.from_components(chart, jet)))
    return out


def _derivations(spec: Any, chart: Chart, where: str) -> list[Derivation]:
    if not isinstance(spec, list):
        raise DocumentError("expected a list of derivations", where)
    return [Derivation.from_components(chart, _exprs(d, chart, f"{where}[{k}]", chart.dim + 1)) for k, d in enumerate(spec)]


def _slice_spec(spec: Any, chart: Chart, where: str) -> dict[str, float]:
    if isinstance(spec, str):
        spec = dict(part.split("=", 1) for part in filter(None, (p.strip() for p in spec.split(","))))
    if not isinstance(spec, dict) or not spec:
        raise DocumentError("expected a slice such as {y: 0}", where)
    out = {}
    for k, v in spec.items():
        k = str(k).strip()
        if k not in chart.names:
            raise DocumentError(f"unknown coordinate {k!r}", where)
        out[k] = float(_expr(v, chart, where).evaluate_constant())
    return out


def _chart(spec: Any, where: str = "chart") -> Chart:
    if not isinstance(spec, dict) or "coordinates" not in spec:
        raise DocumentError("chart needs 'coordinates'", where)
    names = spec["coordinates"]
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",")]
    domain = spec.get("domain") or {}
    doms = []
    for nm in names:
        d = domain.get(nm, [-1.0, 1.0])
        if d and isinstance(d[0], (list, tuple)):
            doms.append(tuple((float(lo), float(hi)) for lo, hi in d))
        else:
            doms.append((float(d[0]), float(d[1])))
    try:
        return Chart(tuple(names), tuple(doms))
    except ValueError as exc:
        raise DocumentError(str(exc), where) from exc


# ---------------------------------------------------------------------------
# constructors


def _build(doc: Document, label: str, ctor: str, p: dict, where: str) -> StructureFrame:
    chart, oracle = doc.chart, doc.oracle
    if ctor == "unit":
        return unit_structure(chart).relabel(label)
    if ctor == "two_cocycle":
        return from_two_cocycle(_form(p.get("form", {}), chart, 2, f"{where}.form"), label)
    if ctor == "precontact":
        theta = _exprs(p.get("theta"), chart, f"{where}.theta", chart.dim)
        return from_two_cocycle(cocycle_from_precontact(theta, chart), label)
    if ctor == "jacobi":
        J = JacobiMatrix.from_parts(chart, _upper(p.get("bivector", []), chart, f"{where}.bivector"), _exprs(p.get("vector"), chart, f"{where}.vector", chart.dim))
        return from_jacobi(J, label)
    if ctor == "flat_connection":
        return from_flat_connection(_exprs(p.get("connection"), chart, f"{where}.connection", chart.dim), chart, oracle, label)
    if ctor == "lcps":
        conn = _exprs(p.get("connection"), chart, f"{where}.connection", chart.dim)
        form = antisymmetric_from_upper(chart, _upper(p.get("form", []), chart, f"{where}.form"))
        return from_lcps(conn, form, chart, oracle, label)
    if ctor == "homogeneous_poisson":
        d = HomogeneousPoissonData.from_upper(chart, _upper(p.get("bivector", []), chart, f"{where}.bivector"), _exprs(p.get("vector"), chart, f"{where}.vector", chart.dim))
        return from_homogeneous_poisson(d, label)
    if ctor == "lift_dirac":
        pairs = []
        for k, pair in enumerate(p.get("pairs", [])):
            w = f"{where}.pairs[{k}]"
            pairs.append((_exprs(pair.get("vector"), chart, f"{w}.vector", chart.dim), _exprs(pair.get("form"), chart, f"{w}.form", chart.dim)))
        return lift_dirac(pairs, chart, oracle, label)
    if ctor == "gauge":
        base = doc.structure(p.get("structure", ""), f"{where}.structure")
        return gauge_transform(base, _form(p.get("form", {}), base.chart, 2, f"{where}.form")).relabel(label)
    if ctor == "frame":
        return StructureFrame(chart, tuple(_sections(p.get("sections"), chart, f"{where}.sections")), label)
    if ctor == "slice":
        base = doc.structure(p.get("structure", ""), f"{where}.structure")
        return backward_image_slice(base, _slice_spec(p.get("slice"), base.chart, f"{where}.slice"), oracle, label)
    raise DocumentError(f"unknown constructor {ctor!r}", where)


CONSTRUCTORS = ("unit", "two_cocycle", "precontact", "jacobi", "flat_connection", "lcps", "homogeneous_poisson", "lift_dirac", "gauge", "frame", "slice")
VERBS = ("check", "recognize", "analyze", "admissible", "pullback", "pushforward", "diracize", "spencer", "thicken", "selftest")


def load_document(path: str | Path, overrides: dict | None = None) -> Document:
    """Parse and validate a document; constructor failures are input errors."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise DocumentError(str(getattr(exc, "problem", exc)), "", None if mark is None else mark.line + 1, None if mark is None else mark.column + 1) from exc
    return document_from_data(raw, str(path), overrides)


def document_from_data(raw: Any, path: str = "<memory>", overrides: dict | None = None) -> Document:
    if not isinstance(raw, dict):
        raise DocumentError("document must be a mapping")
    version = raw.get("version", DOCUMENT_VERSION)
    if version != DOCUMENT_VERSION:
        raise DocumentError(f"unsupported document version {version}", "version")
    chart = _chart(raw.get("chart"))
    settings = dict(raw.get("oracle") or {})
    settings.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        oracle = Oracle(int(settings.get("seed", 0)), int(settings.get("samples", 32)), float(settings.get("atol", 1e-9)), float(settings.get("rtol", 1e-9)))
    except (TypeError, ValueError) as exc:
        raise DocumentError(str(exc), "oracle") from exc
    doc = Document(path, chart, oracle)
    for k, s in enumerate(raw.get("structures") or []):
        where = f"structures[{k}]"
        if not isinstance(s, dict) or "label" not in s or "constructor" not in s:
            raise DocumentError("a structure needs 'label' and 'constructor'", where)
        label, ctor = str(s["label"]), str(s["constructor"])
        if label in doc.structures:
            raise DocumentError(f"duplicate label {label!r}", where)
        if ctor not in CONSTRUCTORS:
            raise DocumentError(f"unknown constructor {ctor!r}", where)
        params = s.get("params") or {}
        try:
            frame = _build(doc, label, ctor, params, where)
        except DocumentError:
            raise
        except (ValueError, ArithmeticError) as exc:
            raise DocumentError(f"constructor {ctor} failed: {exc}", where) from exc
        doc.structures[label] = StructureSpec(label, ctor, params, frame)
    for k, c in enumerate(raw.get("checks") or []):
        where = f"checks[{k}]"
        if not isinstance(c, dict) or "verb" not in c:
            raise DocumentError("a check needs a 'verb'", where)
        verb = str(c["verb"]).replace("-", "_")
        if verb == "identity_suite":
            verb = "selftest"
        if verb not in VERBS:
            raise DocumentError(f"unknown verb {c['verb']!r}", where)
        if verb != "selftest" and "structure" in c:
            doc.structure(str(c["structure"]), f"{where}.structure")
        doc.checks.append(CheckSpec(verb, {k2: v for k2, v in c.items() if k2 != "verb"}, k))
    return doc


# ---------------------------------------------------------------------------
# running checks


@dataclass
class CheckResult:
    index: int
    verb: str
    structure: str | None
    ok: bool
    result: dict = field(default_factory=dict)
    error: str | None = None
    seconds: float = 0.0

    def to_dict(self) -> dict:
        out = {"index": self.index, "verb": self.verb, "structure": self.structure, "ok": self.ok, "result": self.result}
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class Report:
    document: str
    oracle: Oracle
    results: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "version": SCHEMA_VERSION,
            "document": self.document,
            "oracle": {"seed": self.oracle.seed, "samples": self.oracle.samples, "atol": self.oracle.atol, "rtol": self.oracle.rtol},
            "ok": self.ok,
            "checks": [r.to_dict() for r in self.results],
        }


def _frames_equal(a: StructureFrame, b: StructureFrame, oracle: Oracle) -> dict:
    pts = oracle.points(a.chart)
    for j, (ma, mb) in enumerate(zip(a.matrices(pts, oracle.atol), b.matrices(pts, oracle.atol))):
        if not linalg.same_span(ma, mb, oracle.atol):
            return {"ok": False, "point": dict(zip(a.chart.names, map(float, pts[j])))}
    return {"ok": True}


def _expect(result: dict, expected: dict) -> list[str]:
    return [f"{k}: expected {v!r}, got {result.get(k)!r}" for k, v in expected.items() if result.get(k) != v]


def _run_check(doc: Document, chk: CheckSpec, extra: dict | None = None) -> CheckResult:
    a = dict(chk.args)
    a.update(extra or {})
    label = a.get("structure")
    out = CheckResult(chk.index, chk.verb, label, False)
    frame = doc.structures[label].frame if label in doc.structures else None
    o = doc.oracle
    where = f"checks[{chk.index}]"
    handler = _HANDLERS[chk.verb]
    ok, result = handler(doc, frame, a, o, where)
    out.ok, out.result = bool(ok), result
    return out


def _check(doc, frame, a, o, where):
    cls = classify_subbundle(frame, o)
    expected = bool(a.get("expect", True))
    res = cls.to_dict()
    res["expected"] = expected
    return cls.dirac_jacobi == expected, res


def _recognize(doc, frame, a, o, where):
    rec = recognize(frame, o)
    res = {"tags": list(rec.tags)}
    if rec.homogeneous_poisson is not None:
        w = check_homogeneous(rec.homogeneous_poisson, o)
        res["homogeneous"] = w is None
    expected = a.get("expect_tags")
    ok = not rec.unclassified if expected is None else sorted(expected) == sorted(rec.tags)
    return ok, res


def _analyze(doc, frame, a, o, where):
    points = a.get("points") or []
    if isinstance(points, str):
        points = [points]
    reports, ok = [], True
    for k, text in enumerate(points):
        try:
            p = frame.chart.parse_point(str(text))
        except ParseError as exc:
            raise DocumentError(str(exc), f"{where}.points[{k}]") from exc
        rep = point_report(frame, p, o.atol).to_dict()
        exp = (a.get("expect") or [{}] * len(points))[k] if isinstance(a.get("expect"), list) else {}
        problems = _expect(rep, exp or {})
        rep["problems"] = problems
        ok &= not problems
        if a.get("normalize"):
            rep["normal_form"] = normalize_frame_at_point(frame, p, o.atol).to_dict()
            ok &= rep["normal_form"]["relations_hold"]
        reports.append(rep)
    grid = grid_points(frame.chart, int(a.get("grid", 5)))
    parity = grid_parity(frame, int(a.get("grid", 5)), o.atol)
    dichotomy = null_dichotomy_check(frame, grid, o.atol)
    recon = reconstruction_check(frame, o)
    res = {"points": reports, "parity": parity.to_dict(), "dichotomy": dichotomy.to_dict(), "reconstruction": recon.to_dict()}
    return ok and parity.ok and dichotomy.ok and recon.ok, res


def _admissible(doc, frame, a, o, where):
    res, ok = {}, True
    expected = bool(a.get("expect", True))
    if "section" in a:
        v = is_admissible_section(frame, _expr(a["section"], frame.chart, f"{where}.section"), o)
        res["section"] = v.to_dict()
        ok &= v.admissible == expected and v.agree
    if "function" in a:
        v = is_admissible_function(frame, _expr(a["function"], frame.chart, f"{where}.function"), o)
        res["function"] = v.to_dict()
        ok &= v.admissible == expected and v.agree
    if not res:
        raise DocumentError("admissible needs 'section' or 'function'", where)
    res["expected"] = expected
    return ok, res


def _pullback(doc, frame, a, o, where):
    sl = _slice_spec(a.get("slice"), frame.chart, f"{where}.slice")
    pulled = backward_image_slice(frame, sl, o)
    cls = classify_subbundle(pulled, o)
    res = {"chart": list(pulled.chart.names), "classification": cls.to_dict(), "frame": _frame_text(pulled)}
    ok = cls.dirac_jacobi
    if "expect_frame" in a:
        expected = StructureFrame(pulled.chart, tuple(_sections(a["expect_frame"], pulled.chart, f"{where}.expect_frame")))
        cmp = _frames_equal(pulled, expected, o)
        res["matches_expected"] = cmp
        ok &= cmp["ok"]
    return ok, res


def _pushforward(doc, frame, a, o, where):
    target = _chart(a.get("target"), f"{where}.target")
    base = _exprs(a.get("base"), frame.chart, f"{where}.base", target.dim)
    factor = _expr(a.get("factor", "1"), frame.chart, f"{where}.factor")
    F = LineBundleMorphism(frame.chart, target, tuple(base), factor)
    p = frame.chart.parse_point(str(a.get("point")))
    mates = [frame.chart.parse_point(str(m)) for m in a.get("mates", [])]
    img = forward_image_pointwise(F, frame, p, o.atol, mates)
    res = img.to_dict()
    ok = img.rank == target.dim + 1 and img.isotropic and img.invariant is not False
    return ok, res


def _diracize(doc, frame, a, o, where):
    d = diracize(frame, o)
    res = d.to_dict()
    ok = d.ok
    dims = []
    for text in a.get("points", []):
        p = frame.chart.parse_point(str(text))
        chk = characteristic_dimension_check(frame, p, float(a.get("s", 1.0)), o.atol)
        dims.append(chk.to_dict() | {"point": p.as_dict()})
        ok &= chk.ok
    res["dimension_checks"] = dims
    return ok, res


def _spencer(doc, frame, a, o, where):
    v = verify_spencer_axioms(frame, o, int(a.get("trials", 2)))
    expected = bool(a.get("expect", True))
    res = v.to_dict()
    res["expected"] = expected
    return v.ok == expected, res


def _thicken(doc, frame, a, o, where):
    chart = frame.chart
    th = thicken(frame, _derivations(a.get("null_frame", []), chart, f"{where}.null_frame"), _derivations(a.get("complement", []), chart, f"{where}.complement"), o)
    res = th.to_dict()
    return th.ok or not th.fiber, res


def _selftest(doc, frame, a, o, where):
    dims = a.get("dimensions", [1, 2, 3])
    rep = run_identity_suite(tuple(int(n) for n in dims), int(a.get("instances", 100)), o, int(a.get("tensor_instances", 10)))
    return rep.ok, rep.to_dict()


_HANDLERS: dict[str, Callable] = {
    "check": _check,
    "recognize": _recognize,
    "analyze": _analyze,
    "admissible": _admissible,
    "pullback": _pullback,
    "pushforward": _pushforward,
    "diracize": _diracize,
    "spencer": _spencer,
    "thicken": _thicken,
    "selftest": _selftest,
}


def _frame_text(frame: StructureFrame) -> list[dict]:
    from .scalars import to_text

    return [{"derivation": [to_text(c) for c in s.der.components()], "jet": [to_text(c) for c in s.jet.components()]} for s in frame.sections]


def run_checks(doc: Document, checks: Sequence[CheckSpec] | None = None, extra: dict | None = None) -> Report:
    """Run checks in declaration order; a failing or erroring check never stops the suite."""
    report = Report(doc.path, doc.oracle)
    for chk in doc.checks if checks is None else checks:
        start = time.perf_counter()
        try:
            res = _run_check(doc, chk, extra)
        except Exception as exc:  # reported per check, the suite continues
            res = CheckResult(chk.index, chk.verb, chk.args.get("structure"), False, {}, f"{type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - start
        report.results.append(res)
    return report


# ---------------------------------------------------------------------------
# emission


def _stable(obj: Any) -> str:
    """JSON with sorted keys and floats printed with 17 significant digits."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return json.dumps(str(v))
        text = format(v, ".17g")
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{json.dumps(k, ensure_ascii=False)}:{_stable(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_stable(v) for v in (obj.tolist() if isinstance(obj, np.ndarray) else obj)) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_report(report: Report | None, fmt: str = "json") -> bytes:
    if fmt not in ("json", "text"):
        raise ValueError(f"unknown format {fmt!r}")
    if report is None:
        empty = {"schema": SCHEMA, "version": SCHEMA_VERSION, "ok": True, "checks": []}
        return (_stable(empty) + "\n").encode() if fmt == "json" else b"no checks\n"
    if fmt == "json":
        return (_stable(report.to_dict()) + "\n").encode()
    lines = [f"document {report.document} (seed {report.oracle.seed}, {report.oracle.samples} samples)"]
    for r in report.results:
        status = "PASS" if r.ok else "FAIL"
        target = f" {r.structure}" if r.structure else ""
        lines.append(f"[{status}] #{r.index} {r.verb}{target} ({r.seconds:.2f}s)")
        if r.error:
            lines.append(f"    error: {r.error}")
        for w in _witnesses(r.result):
            lines.append(f"    witness {w}")
    passed = sum(r.ok for r in report.results)
    lines.append(f"{passed}/{len(report.results)} checks passed")
    return ("\n".join(lines) + "\n").encode()


def _witnesses(obj: Any, path: str = ""):
    if isinstance(obj, dict):
        if {"point", "lhs", "rhs"} <= obj.keys():
            yield f"{path}: {obj.get('label', '')} at {obj['point']} lhs={obj['lhs']:.6g} rhs={obj['rhs']:.6g}"
            return
        for k in sorted(obj):
            yield from _witnesses(obj[k], f"{path}.{k}" if path else str(k))
    elif isinstance(obj, list):
        for k, v in enumerate(obj):
            yield from _witnesses(v, f"{path}[{k}]")


# ---------------------------------------------------------------------------
# command line


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="oracle seed (overrides the document)")
    common.add_argument("--samples", type=int, help="oracle sample count")
    common.add_argument("--atol", type=float, help="absolute tolerance")
    common.add_argument("--rtol", type=float, help="relative tolerance")
    common.add_argument("--format", choices=("text", "json"), default="text", help="report format")
    common.add_argument("--output", help="write the report to this file instead of stdout")

    p = argparse.ArgumentParser(prog="omnilie", description="Verify Dirac-Jacobi structures on coordinate charts.", parents=[common])
    sub = p.add_subparsers(dest="verb", required=True)

    def doc_verb(name: str, help_: str):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.add_argument("file", help="YAML document")
        sp.add_argument("--structure", help="restrict to one structure label")
        return sp

    doc_verb("run", "run every check listed in the document")
    doc_verb("check", "classify structures (Dirac-Jacobi verdict)")
    doc_verb("recognize", "recognize graph-like classes")
    doc_verb("analyze", "pointwise reports").add_argument("--point", action="append", default=[], help='point such as "x=0,y=0.3"')
    doc_verb("pullback", "backward image along a coordinate slice").add_argument("--slice", required=True, help='slice such as "y=0"')
    doc_verb("diracize", "lift to the slit dual bundle and check the Dirac property")
    doc_verb("spencer", "verify the Spencer axioms")
    doc_verb("thicken", "run the thicken checks declared in the document")
    st = sub.add_parser("selftest", help="Cartan and bracket identity suites", parents=[common])
    st.add_argument("--dimensions", default="1,2,3")
    st.add_argument("--instances", type=int, default=100)
    return p


def _synthetic_checks(doc: Document, verb: str, label: str | None, args: dict) -> list[CheckSpec]:
    if verb == "run":
        return [c for c in doc.checks if label is None or c.args.get("structure") == label]
    if verb == "thicken":
        return [c for c in doc.checks if c.verb == "thicken" and (label is None or c.args.get("structure") == label)]
    labels = [label] if label else list(doc.structures)
    for lb in labels:
        doc.structure(lb, "--structure")
    return [CheckSpec(verb, {"structure": lb, **args}, k) for k, lb in enumerate(labels)]


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    overrides = {"seed": args.seed, "samples": args.samples, "atol": args.atol, "rtol": args.rtol}
    try:
        if args.verb == "selftest":
            doc = document_from_data({"chart": {"coordinates": ["x"]}}, "<selftest>", overrides)
            dims = [int(d) for d in str(args.dimensions).split(",")]
            checks = [CheckSpec("selftest", {"dimensions": dims, "instances": args.instances}, 0)]
        else:
            doc = load_document(args.file, overrides)
            extra: dict = {}
            if args.verb == "analyze":
                extra = {"points": args.point}
            elif args.verb == "pullback":
                extra = {"slice": args.slice}
            checks = _synthetic_checks(doc, args.verb, args.structure, extra)
        report = run_checks(doc, checks)
    except DocumentError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = emit_report(report, args.format)
    if args.output:
        Path(args.output).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return EXIT_OK if report.ok else EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
