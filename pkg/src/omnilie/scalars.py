"""Charts, symbolic scalar expressions and the sampled equality oracle.

Scalars are immutable expression trees over the coordinates of a chart.
Differentiation is exact and symbolic; equality is decided numerically at a
seeded set of sample points.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

Number = Union[int, Fraction, float]
Interval = tuple[float, float]


class ParseError(ValueError):
    """Raised for malformed expressions; carries the character position."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class EvaluationError(ArithmeticError):
    """Raised when a denominator falls below the oracle tolerance."""

    def __init__(self, message: str, point: tuple[float, ...] | None = None):
        self.point = point
        super().__init__(message if point is None else f"{message} at {point}")


class ChartMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Ordered coordinate names with one sampling domain per coordinate.

    A domain is either a closed interval ``(lo, hi)`` or a tuple of such
    intervals; the latter is used for coordinates that must avoid zero.
    """

    names: tuple[str, ...]
    domains: tuple = ()

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")
        for name in names:
            if not _IDENT.fullmatch(name) or name in _FUNCTIONS:
                raise ValueError(f"invalid coordinate name {name!r}")
        domains = tuple(self.domains) if self.domains else ((-1.0, 1.0),) * len(names)
        if len(domains) != len(names):
            raise ValueError("one domain per coordinate is required")
        normalized = []
        for dom in domains:
            pieces = _as_intervals(dom)
            for lo, hi in pieces:
                if not hi > lo:
                    raise ValueError(f"empty sampling interval ({lo}, {hi})")
            normalized.append(pieces[0] if len(pieces) == 1 else pieces)
        object.__setattr__(self, "domains", tuple(normalized))

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown coordinate {name}") from None

    def coordinate(self, name_or_index: str | int) -> "Var":
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        return Var(self.names[i], i)

    def coordinates(self) -> list["Var"]:
        return [Var(n, i) for i, n in enumerate(self.names)]

    def point(self, *values: float, **named: float) -> "Point":
        if named:
            values = tuple(named[n] for n in self.names)
        return Point(self, tuple(float(v) for v in values))

    def parse_point(self, text: str) -> "Point":
        """Parse ``"x=0.5,y=-1"``; every coordinate must be given."""
        vals: dict[str, float] = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            if "=" not in part:
                raise ParseError(f"expected name=value, got {part!r}")
            key, val = (s.strip() for s in part.split("=", 1))
            if key not in self.names:
                raise ParseError(f"unknown identifier {key}")
            vals[key] = float(parse_scalar(val, self).evaluate_constant())
        missing = [n for n in self.names if n not in vals]
        if missing:
            raise ParseError(f"missing coordinates {missing}")
        return self.point(**vals)


def _as_intervals(dom) -> tuple[Interval, ...]:
    dom = tuple(dom)
    if len(dom) == 2 and all(isinstance(v, (int, float)) for v in dom):
        return ((float(dom[0]), float(dom[1])),)
    return tuple((float(lo), float(hi)) for lo, hi in dom)


@dataclass(frozen=True)
class Point:
    chart: Chart
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != self.chart.dim:
            raise ValueError(f"point arity {len(self.values)} != chart dimension {self.chart.dim}")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.chart.names, self.values))

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float).reshape(1, -1)


# ---------------------------------------------------------------------------
# Expression tree


class Scalar:
    """Base class of expression nodes. Nodes are treated as immutable."""

    __slots__ = ("_dcache",)
    precedence = 5

    def __init__(self):
        self._dcache = None

    # arithmetic through the simplifying constructors
    def __add__(self, other):
        return add(self, as_scalar(other))

    def __radd__(self, other):
        return add(as_scalar(other), self)

    def __sub__(self, other):
        return sub(self, as_scalar(other))

    def __rsub__(self, other):
        return sub(as_scalar(other), self)

    def __mul__(self, other):
        return mul(self, as_scalar(other))

    def __rmul__(self, other):
        return mul(as_scalar(other), self)

    def __truediv__(self, other):
        return div(self, as_scalar(other))

    def __rtruediv__(self, other):
        return div(as_scalar(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        return power(self, k)

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"Scalar({to_text(self)!r})"

    def __eq__(self, other):
        return isinstance(other, Scalar) and _same_tree(self, other)

    def __hash__(self):
        return hash(to_text(self))

    def is_zero(self) -> bool:
        return isinstance(self, Const) and self.value == 0

    def is_one(self) -> bool:
        return isinstance(self, Const) and self.value == 1

    def variables(self) -> set[tuple[str, int]]:
        out: set[tuple[str, int]] = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Var):
                out.add((node.name, node.index))
            stack.extend(node.children())
        return out

    def children(self) -> tuple["Scalar", ...]:
        return ()

    def evaluate_constant(self) -> float:
        if self.variables():
            raise ParseError("expected a constant expression")
        return float(values(self, np.zeros((1, 0)))[0])


class Const(Scalar):
    __slots__ = ("value",)

    def __init__(self, value: Number):
        super().__init__()
        self.value = _to_fraction(value)

    @property
    def precedence(self):
        if self.value < 0:
            return 3
        return 5 if self.value.denominator == 1 else 2


class Var(Scalar):
    __slots__ = ("name", "index")

    def __init__(self, name: str, index: int):
        super().__init__()
        self.name = name
        self.index = index


class _Binary(Scalar):
    __slots__ = ("left", "right")
    symbol = "?"

    def __init__(self, left: Scalar, right: Scalar):
        super().__init__()
        self.left = left
        self.right = right

    def children(self):
        return (self.left, self.right)


class Add(_Binary):
    __slots__ = ()
    symbol, precedence = "+", 1


class Sub(_Binary):
    __slots__ = ()
    symbol, precedence = "-", 1


class Mul(_Binary):
    __slots__ = ()
    symbol, precedence = "*", 2


class Div(_Binary):
    __slots__ = ()
    symbol, precedence = "/", 2


class Neg(Scalar):
    __slots__ = ("arg",)
    precedence = 3

    def __init__(self, arg: Scalar):
        super().__init__()
        self.arg = arg

    def children(self):
        return (self.arg,)


class Pow(Scalar):
    __slots__ = ("base", "exponent")
    precedence = 4

    def __init__(self, base: Scalar, exponent: int):
        super().__init__()
        self.base = base
        self.exponent = int(exponent)

    def children(self):
        return (self.base,)


class Call(Scalar):
    __slots__ = ("fn", "arg")

    def __init__(self, fn: str, arg: Scalar):
        super().__init__()
        if fn not in _FUNCTIONS:
            raise ValueError(f"unknown function {fn}")
        self.fn = fn
        self.arg = arg

    def children(self):
        return (self.arg,)


_FUNCTIONS = ("exp", "sin", "cos")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")

def _to_fraction(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError("constants must be finite")
        return Fraction(repr(float(value)))
    raise TypeError(f"cannot make a constant from {value!r}")


ZERO = Const(0)
ONE = Const(1)


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    return Const(x)


def _same_tree(a: Scalar, b: Scalar) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Const):
        return a.value == b.value
    if isinstance(a, Var):
        return a.name == b.name and a.index == b.index
    if isinstance(a, Pow) and a.exponent != b.exponent:
        return False
    if isinstance(a, Call) and a.fn != b.fn:
        return False
    return all(_same_tree(x, y) for x, y in zip(a.children(), b.children()))


# simplifying constructors: fold constants and drop neutral elements only


def add(a: Scalar, b: Scalar) -> Scalar:
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if isinstance(b, Neg):
        return Sub(a, b.arg)
    if isinstance(b, Const) and b.value < 0:
        return Sub(a, Const(-b.value))
    return Add(a, b)


def sub(a: Scalar, b: Scalar) -> Scalar:
    if b.is_zero():
        return a
    if a.is_zero():
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if isinstance(b, Neg):
        return Add(a, b.arg)
    return Sub(a, b)


def mul(a: Scalar, b: Scalar) -> Scalar:
    if a.is_zero() or b.is_zero():
        return ZERO
    if a.is_one():
        return b
    if b.is_one():
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if isinstance(a, Const) and a.value == -1:
        return neg(b)
    if isinstance(b, Const) and b.value == -1:
        return neg(a)
    if isinstance(a, Neg) and isinstance(b, Neg):
        return mul(a.arg, b.arg)
    return Mul(a, b)


def div(a: Scalar, b: Scalar) -> Scalar:
    if a.is_zero():
        return ZERO
    if b.is_one():
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    return Div(a, b)


def neg(a: Scalar) -> Scalar:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a: Scalar, k: int) -> Scalar:
    if k == 0:
        return ONE
    if k == 1:
        return a
    if isinstance(a, Const) and (a.value != 0 or k > 0):
        return Const(a.value**k)
    return Pow(a, k)


def call(fn: str, a: Scalar) -> Scalar:
    if a.is_zero():
        return ZERO if fn == "sin" else ONE
    return Call(fn, a)


def exp(a) -> Scalar:
    return call("exp", as_scalar(a))


def sin(a) -> Scalar:
    return call("sin", as_scalar(a))


def cos(a) -> Scalar:
    return call("cos", as_scalar(a))


def total(terms: Iterable[Scalar]) -> Scalar:
    out: Scalar = ZERO
    for t in terms:
        out = add(out, t)
    return out


# ---------------------------------------------------------------------------
# Differentiation


def differentiate(f: Scalar, i: int, dim: int | None = None) -> Scalar:
    """Exact partial derivative with respect to coordinate ``i``."""
    if dim is not None and not 0 <= i < dim:
        raise IndexError(f"coordinate index {i} out of range for dimension {dim}")
    if i < 0:
        raise IndexError(f"coordinate index {i} out of range")
    cache = f._dcache
    if cache is None:
        cache = f._dcache = {}
    hit = cache.get(i)
    if hit is not None:
        return hit
    out = _derive(f, i)
    cache[i] = out
    return out


def _derive(f: Scalar, i: int) -> Scalar:
    if isinstance(f, Const):
        return ZERO
    if isinstance(f, Var):
        return ONE if f.index == i else ZERO
    if isinstance(f, Add):
        return add(differentiate(f.left, i), differentiate(f.right, i))
    if isinstance(f, Sub):
        return sub(differentiate(f.left, i), differentiate(f.right, i))
    if isinstance(f, Mul):
        return add(mul(differentiate(f.left, i), f.right), mul(f.left, differentiate(f.right, i)))
    if isinstance(f, Div):
        da, db = differentiate(f.left, i), differentiate(f.right, i)
        if db.is_zero():
            return div(da, f.right)
        # divide twice rather than by the square so the denominator guard sees g, not g^2
        return sub(div(da, f.right), div(div(mul(f.left, db), f.right), f.right))
    if isinstance(f, Neg):
        return neg(differentiate(f.arg, i))
    if isinstance(f, Pow):
        db = differentiate(f.base, i)
        return mul(mul(Const(f.exponent), power(f.base, f.exponent - 1)), db)
    if isinstance(f, Call):
        da = differentiate(f.arg, i)
        if f.fn == "exp":
            return mul(f, da)
        if f.fn == "sin":
            return mul(cos(f.arg), da)
        return neg(mul(sin(f.arg), da))
    raise TypeError(f"unknown node {type(f).__name__}")


def gradient(f: Scalar, dim: int) -> list[Scalar]:
    return [differentiate(f, i) for i in range(dim)]


def substitute(f: Scalar, replacements: Sequence[Scalar]) -> Scalar:
    """Replace coordinate ``i`` by ``replacements[i]`` (composition f∘F)."""
    memo: dict[int, Scalar] = {}

    def go(node: Scalar) -> Scalar:
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Const):
            out = node
        elif isinstance(node, Var):
            out = replacements[node.index]
        elif isinstance(node, Add):
            out = add(go(node.left), go(node.right))
        elif isinstance(node, Sub):
            out = sub(go(node.left), go(node.right))
        elif isinstance(node, Mul):
            out = mul(go(node.left), go(node.right))
        elif isinstance(node, Div):
            out = div(go(node.left), go(node.right))
        elif isinstance(node, Neg):
            out = neg(go(node.arg))
        elif isinstance(node, Pow):
            out = power(go(node.base), node.exponent)
        else:
            out = call(node.fn, go(node.arg))
        memo[key] = out
        return out

    return go(f)


# ---------------------------------------------------------------------------
# Numeric evaluation


def values(f: Scalar, points: np.ndarray, memo: dict | None = None, atol: float = 1e-9) -> np.ndarray:
    """Evaluate ``f`` at every row of ``points``; returns shape ``(N,)``."""
    memo = {} if memo is None else memo
    out = _values(f, points, memo, atol)
    return np.broadcast_to(np.asarray(out, dtype=float), (points.shape[0],))


def _values(f: Scalar, pts: np.ndarray, memo: dict, atol: float):
    key = id(f)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(f, Const):
        out = float(f.value)
    elif isinstance(f, Var):
        out = pts[:, f.index]
    elif isinstance(f, Add):
        out = _values(f.left, pts, memo, atol) + _values(f.right, pts, memo, atol)
    elif isinstance(f, Sub):
        out = _values(f.left, pts, memo, atol) - _values(f.right, pts, memo, atol)
    elif isinstance(f, Mul):
        out = _values(f.left, pts, memo, atol) * _values(f.right, pts, memo, atol)
    elif isinstance(f, Div):
        den = _values(f.right, pts, memo, atol)
        _check_denominator(den, pts, atol)
        out = _values(f.left, pts, memo, atol) / den
    elif isinstance(f, Neg):
        out = -_values(f.arg, pts, memo, atol)
    elif isinstance(f, Pow):
        base = _values(f.base, pts, memo, atol)
        if f.exponent < 0:
            _check_denominator(base, pts, atol)
            out = 1.0 / np.power(base, -f.exponent)
        else:
            out = np.power(base, f.exponent)
    elif isinstance(f, Call):
        arg = _values(f.arg, pts, memo, atol)
        out = {"exp": np.exp, "sin": np.sin, "cos": np.cos}[f.fn](arg)
    else:
        raise TypeError(f"unknown node {type(f).__name__}")
    # keep the node alive so its id is not recycled while memoized
    memo[key] = (f, out)
    return out


def _check_denominator(den, pts: np.ndarray, atol: float) -> None:
    small = np.abs(np.broadcast_to(den, (pts.shape[0],))) < atol
    if np.any(small):
        k = int(np.argmax(small))
        raise EvaluationError("division by a near-zero denominator", tuple(float(v) for v in pts[k]))


def evaluate(f: Scalar, p: Point, atol: float = 1e-9) -> float:
    """Evaluate at a single point in double precision."""
    _check_chart(f, p.chart)
    return float(values(f, p.array(), atol=atol)[0])


def _check_chart(f: Scalar, chart: Chart) -> None:
    for name, index in f.variables():
        if index >= chart.dim or chart.names[index] != name:
            raise ChartMismatch(f"identifier {name} is not coordinate {index} of chart {chart.names}")


# ---------------------------------------------------------------------------
# Oracle


@dataclass(frozen=True)
class Oracle:
    """Seeded sample set plus tolerances defining scalar equality."""

    seed: int = 0
    samples: int = 32
    atol: float = 1e-9
    rtol: float = 1e-9

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("the oracle needs at least one sample")
        if self.atol < 0 or self.rtol < 0:
            raise ValueError("tolerances must be nonnegative")

    def points(self, chart: Chart) -> np.ndarray:
        return _sample(self.seed, self.samples, chart)

    def close(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.abs(a - b) <= self.atol + self.rtol * np.maximum(np.abs(a), np.abs(b))


@lru_cache(maxsize=256)
def _sample(seed: int, n: int, chart: Chart) -> np.ndarray:
    rng = np.random.default_rng(seed)
    cols = []
    for dom in chart.domains:
        pieces = _as_intervals(dom)
        lengths = np.array([hi - lo for lo, hi in pieces])
        which = rng.choice(len(pieces), size=n, p=lengths / lengths.sum())
        u = rng.random(n)
        lo = np.array([pieces[k][0] for k in which])
        hi = np.array([pieces[k][1] for k in which])
        cols.append(lo + u * (hi - lo))
    pts = np.column_stack(cols)
    pts.setflags(write=False)
    return pts


def grid_points(chart: Chart, per_axis: int = 5) -> np.ndarray:
    """Tensor grid inside the chart domain (interval interiors)."""
    axes = []
    for dom in chart.domains:
        pieces = _as_intervals(dom)
        k = max(1, per_axis // len(pieces))
        axis = np.concatenate([np.linspace(lo, hi, k + 2)[1:-1] for lo, hi in pieces])
        axes.append(axis)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


@dataclass(frozen=True)
class Witness:
    """A sample point where a check failed, with the offending values."""

    point: tuple[float, ...]
    names: tuple[str, ...]
    lhs: float
    rhs: float
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "point": dict(zip(self.names, map(float, self.point))),
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "label": self.label,
        }


@dataclass(frozen=True)
class Equality:
    equal: bool
    witness: Witness | None = None

    def __bool__(self):
        return self.equal


def compare(
    lhs: Sequence[Scalar],
    rhs: Sequence[Scalar],
    chart: Chart,
    oracle: Oracle,
    labels: Sequence[str] | None = None,
    points: np.ndarray | None = None,
) -> Witness | None:
    """Compare two lists of scalars entrywise; return the first failure."""
    if len(lhs) != len(rhs):
        raise ValueError("compare needs equally long sequences")
    pts = oracle.points(chart) if points is None else points
    memo: dict = {}
    for k, (f, g) in enumerate(zip(lhs, rhs)):
        a = values(f, pts, memo, oracle.atol)
        b = values(g, pts, memo, oracle.atol)
        ok = oracle.close(a, b)
        if not np.all(ok):
            j = int(np.argmin(ok))
            label = labels[k] if labels is not None else str(k)
            return Witness(tuple(float(v) for v in pts[j]), chart.names, float(a[j]), float(b[j]), label)
    return None


def scalars_equal(f: Scalar, g: Scalar, oracle: Oracle, chart: Chart) -> Equality:
    """Sampled equality: |f-g| <= atol + rtol*max(|f|,|g|) at every oracle point."""
    _check_chart(f, chart)
    _check_chart(g, chart)
    w = compare([f], [g], chart, oracle)
    return Equality(w is None, w)


# ---------------------------------------------------------------------------
# Parsing and printing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, chart: Chart):
        self.tokens = _tokenize(text)
        self.k = 0
        self.chart = chart

    def peek(self):
        return self.tokens[self.k]

    def take(self, value: str | None = None):
        tok = self.tokens[self.k]
        if value is not None and tok[1] != value:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {value!r}, found {what}", tok[2])
        self.k += 1
        return tok

    def parse(self) -> Scalar:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def expr(self) -> Scalar:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Scalar:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                node = Mul(node, rhs)
            elif isinstance(node, Const) and isinstance(rhs, Const) and rhs.value != 0:
                node = Const(node.value / rhs.value)
            else:
                node = Div(node, rhs)
        return node

    def unary(self) -> Scalar:
        if self.peek() == ("op", "-", self.peek()[2]):
            self.take()
            arg = self.unary()
            return Const(-arg.value) if isinstance(arg, Const) else Neg(arg)
        return self.power()

    def power(self) -> Scalar:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        paren = self.peek()[1] == "("
        if paren:
            self.take()
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        tok = self.take()
        if tok[0] != "num" or not tok[1].isdigit():
            raise ParseError("exponent must be an integer literal", tok[2])
        if paren:
            self.take(")")
        return sign * int(tok[1])

    def atom(self) -> Scalar:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(Fraction(val))
        if kind == "id":
            if val in _FUNCTIONS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Call(val, arg)
            if val not in self.chart.names:
                raise ParseError(f"unknown identifier {val}", pos)
            return Var(val, self.chart.index(val))
        if val == "(":
            node = self.expr()
            self.take(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {what}", pos)


def parse_scalar(text: str, chart: Chart) -> Scalar:
    """Parse an expression over the coordinates of ``chart``.

    Literal arithmetic is folded: ``-2`` and ``3/4`` become constants.
    """
    if not isinstance(text, str):
        text = str(text)
    return _Parser(text, chart).parse()


def to_text(f: Scalar) -> str:
    """Print with minimal parentheses; ``parse_scalar`` inverts it."""
    if isinstance(f, Const):
        v = f.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, _Binary):
        p = f.precedence
        left = _wrap(f.left, p, strict=False)
        right = _wrap(f.right, p, strict=True)
        if p == 1:
            return f"{left} {f.symbol} {right}"
        return f"{left}{f.symbol}{right}"
    if isinstance(f, Neg):
        return "-" + _wrap(f.arg, 3, strict=False)
    if isinstance(f, Pow):
        return f"{_wrap(f.base, 5, strict=False)}^{f.exponent}"
    if isinstance(f, Call):
        return f"{f.fn}({to_text(f.arg)})"
    raise TypeError(type(f).__name__)


def _wrap(f: Scalar, p: int, strict: bool) -> str:
    text = to_text(f)
    q = f.precedence
    # a leading minus would fold into a literal when it follows '-' or '/'
    if q < p or (strict and q == p) or (p >= 2 and text.startswith("-")):
        return f"({text})"
    return text


def scalar_list(texts: Sequence[str] | str, chart: Chart) -> list[Scalar]:
    if isinstance(texts, str):
        texts = [t for t in texts.split(",")]
    return [parse_scalar(t, chart) for t in texts]
