"""Exact multivariate rational functions over the rationals.

A :class:`Chart` fixes an ordered list of coordinate names; every
:class:`ScalarFunction` lives on one chart and is stored as a pair of
coprime polynomials with a monic denominator (graded-lex order), so that
equal functions have identical representations.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

import flint

from modcalc.errors import (
    ChartMismatch,
    DivisionByZeroFunction,
    IndexOutOfRange,
    PoleAtPoint,
)

__all__ = [
    "Chart",
    "ScalarFunction",
    "to_fmpq",
    "parse_scalar",
    "scalar_arith",
    "partial_derivative",
    "evaluate",
    "is_identically_zero",
    "format_polynomial",
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def to_fmpq(value) -> flint.fmpq:
    if isinstance(value, flint.fmpq):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rational numbers")
    if isinstance(value, int):
        return flint.fmpq(value)
    if isinstance(value, Rational):
        return flint.fmpq(value.numerator, value.denominator)
    if isinstance(value, str):
        f = Fraction(value)
        return flint.fmpq(f.numerator, f.denominator)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def _to_fraction(q: flint.fmpq) -> Fraction:
    return Fraction(int(q.p), int(q.q))


class Chart:
    """An ordered tuple of coordinate names with its polynomial context."""

    __slots__ = ("names", "ctx", "_index", "_zero", "_one")

    def __init__(self, names):
        names = tuple(names)
        if not names:
            raise ValueError("a chart needs at least one coordinate")
        for name in names:
            if not _IDENT.match(name):
                raise ValueError(f"invalid coordinate name {name!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")
        self.names = names
        self.ctx = flint.fmpq_mpoly_ctx.get(names, "deglex")
        self._index = {n: i for i, n in enumerate(names)}
        self._zero = None
        self._one = None

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name) -> int:
        if isinstance(name, int):
            if not 0 <= name < self.dim:
                raise IndexOutOfRange(f"coordinate index {name} out of range for {self}")
            return name
        try:
            return self._index[name]
        except KeyError:
            raise IndexOutOfRange(f"{name!r} is not a coordinate of {self}") from None

    def zero(self) -> ScalarFunction:
        if self._zero is None:
            self._zero = ScalarFunction._raw(self, self.ctx.constant(0), self.ctx.constant(1))
        return self._zero

    def one(self) -> ScalarFunction:
        if self._one is None:
            self._one = ScalarFunction._raw(self, self.ctx.constant(1), self.ctx.constant(1))
        return self._one

    def const(self, value) -> ScalarFunction:
        return ScalarFunction._raw(self, self.ctx.constant(to_fmpq(value)), self.ctx.constant(1))

    def coord(self, which) -> ScalarFunction:
        return ScalarFunction._raw(self, self.ctx.gen(self.index(which)), self.ctx.constant(1))

    def coords(self):
        return [self.coord(i) for i in range(self.dim)]

    def parse(self, text: str) -> ScalarFunction:
        return parse_scalar(text, self)

    def __eq__(self, other):
        return isinstance(other, Chart) and other.names == self.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Chart({', '.join(self.names)})"


class ScalarFunction:
    """Canonical num/den pair; immutable."""

    __slots__ = ("chart", "num", "den", "_hash")

    def __init__(self, chart: Chart, num, den=None):
        ctx = chart.ctx
        num = _coerce_poly(num, ctx)
        den = ctx.constant(1) if den is None else _coerce_poly(den, ctx)
        num, den = _normalize(num, den)
        self.chart = chart
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def _raw(cls, chart, num, den):
        obj = cls.__new__(cls)
        obj.chart = chart
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def _from(cls, chart, num, den):
        num, den = _normalize(num, den)
        return cls._raw(chart, num, den)

    # ------------------------------------------------------------------ queries
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return _to_fraction(self._const_fmpq())

    def _const_fmpq(self):
        if self.num.is_zero():
            return flint.fmpq(0)
        return self.num.leading_coefficient() / self.den.leading_coefficient()

    def depends_on(self, i: int) -> bool:
        return bool(self.num.degrees()[i]) or bool(self.den.degrees()[i])

    def __bool__(self):
        return not self.num.is_zero()

    # ---------------------------------------------------------------- arithmetic
    def _lift(self, other):
        if isinstance(other, ScalarFunction):
            if other.chart is not self.chart and other.chart != self.chart:
                raise ChartMismatch(f"{self.chart} vs {other.chart}")
            return other
        try:
            q = to_fmpq(other)
        except TypeError:
            return None
        ctx = self.chart.ctx
        return ScalarFunction._raw(self.chart, ctx.constant(q), ctx.constant(1))

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        a, b = self, other
        if a.num.is_zero():
            return b
        if b.num.is_zero():
            return a
        if a.den == b.den:
            num = a.num + b.num
            if a.den.is_one():
                return ScalarFunction._raw(a.chart, num, a.den)
            return ScalarFunction._from(a.chart, num, a.den)
        g = a.den.gcd(b.den)
        bd = b.den / g
        num = a.num * bd + b.num * (a.den / g)
        return ScalarFunction._from(a.chart, num, a.den * bd)

    __radd__ = __add__

    def __neg__(self):
        return ScalarFunction._raw(self.chart, -self.num, self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        a, b = self, other
        if a.num.is_zero() or b.num.is_zero():
            return a.chart.zero()
        if a.den.is_one() and b.den.is_one():
            return ScalarFunction._raw(a.chart, a.num * b.num, a.den)
        an, ad, bn, bd = a.num, a.den, b.num, b.den
        if not bd.is_one():
            g = an.gcd(bd)
            if not g.is_one():
                an, bd = an / g, bd / g
        if not ad.is_one():
            g = bn.gcd(ad)
            if not g.is_one():
                bn, ad = bn / g, ad / g
        num, den = an * bn, ad * bd
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return ScalarFunction._raw(a.chart, num, den)

    __rmul__ = __mul__

    def inverse(self) -> ScalarFunction:
        if self.num.is_zero():
            raise DivisionByZeroFunction("division by the zero function")
        num, den = self.den, self.num
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return ScalarFunction._raw(self.chart, num, den)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int) or isinstance(k, bool):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return ScalarFunction._raw(self.chart, self.num**k, self.den**k)

    # ---------------------------------------------------------------- calculus
    def diff(self, i) -> ScalarFunction:
        i = self.chart.index(i)
        if self.den.is_one():
            return ScalarFunction._raw(self.chart, self.num.derivative(i), self.den)
        num = self.num.derivative(i) * self.den - self.num * self.den.derivative(i)
        return ScalarFunction._from(self.chart, num, self.den * self.den)

    def evaluate(self, point) -> Fraction:
        vals = self._point(point)
        d = self.den(*vals)
        if d == 0:
            raise PoleAtPoint(f"{self} has a pole at {tuple(point)}")
        return _to_fraction(self.num(*vals) / d)

    def _point(self, point):
        vals = [to_fmpq(v) for v in point]
        if len(vals) != self.chart.dim:
            raise IndexOutOfRange(
                f"point of length {len(vals)} on a chart of dimension {self.chart.dim}"
            )
        return vals

    def subs(self, values) -> ScalarFunction:
        """Substitute rational constants for some coordinates: ``{index_or_name: value}``."""
        names = self.chart.names
        mapping = {names[self.chart.index(k)]: to_fmpq(v) for k, v in values.items()}
        if not mapping:
            return self
        den = self.den.subs(mapping)
        if den.is_zero():
            raise PoleAtPoint(f"{self} has a pole on {mapping}")
        return ScalarFunction._from(self.chart, self.num.subs(mapping), den)

    def compose(self, images) -> ScalarFunction:
        """Substitute the chart coordinates by the given functions (same chart)."""
        images = [self._lift(f) for f in images]
        if len(images) != self.chart.dim:
            raise IndexOutOfRange("compose needs one image per coordinate")
        return _eval_poly(self.num, images, self.chart) / _eval_poly(self.den, images, self.chart)

    # ------------------------------------------------------------- comparisons
    def __eq__(self, other):
        if isinstance(other, ScalarFunction):
            return self.chart == other.chart and self.num == other.num and self.den == other.den
        try:
            q = to_fmpq(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self._const_fmpq() == q

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (
                    self.chart.names,
                    tuple(sorted(self.num.to_dict().items())),
                    tuple(sorted(self.den.to_dict().items())),
                )
            )
        return self._hash

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"ScalarFunction({format_scalar(self)!r})"


def _coerce_poly(value, ctx):
    if isinstance(value, flint.fmpq_mpoly):
        if value.context() is not ctx:
            raise ChartMismatch("polynomial belongs to a different chart")
        return value
    return ctx.constant(to_fmpq(value))


def _normalize(num, den):
    if den.is_zero():
        raise DivisionByZeroFunction("denominator is the zero polynomial")
    ctx = num.context()
    if num.is_zero():
        return num, ctx.constant(1)
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num, den = num / g, den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num, den = num / lc, den / lc
    return num, den


def _eval_poly(poly, images, chart):
    total = chart.zero()
    for monom, coeff in poly.terms():
        term = chart.const(coeff)
        for f, e in zip(images, monom):
            if e:
                term = term * f ** int(e)
        total = total + term
    return total


# --------------------------------------------------------------------- printing
def _format_monomial(monom, names):
    parts = []
    for name, e in zip(names, monom):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_polynomial(poly, names) -> str:
    """Render in the expression grammar, terms in descending graded-lex order."""
    if poly.is_zero():
        return "0"
    out = []
    for monom, coeff in poly.terms():
        mono = _format_monomial(monom, names)
        if not mono:
            s = str(coeff)
        elif coeff == 1:
            s = mono
        elif coeff == -1:
            s = "-" + mono
        else:
            s = f"{coeff}*{mono}"
        if not out:
            out.append(s)
        elif s.startswith("-"):
            out.append(" - " + s[1:])
        else:
            out.append(" + " + s)
    return "".join(out)


def _is_bare_power(poly) -> bool:
    if len(poly) != 1:
        return False
    (monom, coeff), = poly.terms()
    return coeff == 1 and sum(1 for e in monom if e) <= 1


def format_scalar(f: ScalarFunction) -> str:
    names = f.chart.names
    num = format_polynomial(f.num, names)
    if f.den.is_one():
        return num
    den = format_polynomial(f.den, names)
    if len(f.num) > 1:
        num = f"({num})"
    if not _is_bare_power(f.den):
        den = f"({den})"
    return f"{num}/{den}"


# ------------------------------------------------------------ functional API
def parse_scalar(text: str, chart) -> ScalarFunction:
    from modcalc.expr import parse_expression

    if not isinstance(chart, Chart):
        chart = Chart(chart)
    return parse_expression(text, chart)


def scalar_arith(op: str, a: ScalarFunction, b) -> ScalarFunction:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        if not isinstance(b, int) or isinstance(b, bool) or b < 0:
            raise ValueError("pow needs a nonnegative integer exponent")
        return a**b
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(f: ScalarFunction, i) -> ScalarFunction:
    return f.diff(i)


def evaluate(f: ScalarFunction, point) -> Fraction:
    return f.evaluate(point)


def is_identically_zero(f: ScalarFunction) -> bool:
    return f.is_zero()
