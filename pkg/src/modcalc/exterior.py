"""Multivector fields and differential forms on a chart.

Tensors are sparse maps from strictly increasing index tuples to
:class:`~modcalc.ratfun.ScalarFunction` coefficients; mixed grades are
allowed.  A tensor is expressed either in the coordinate frame
(``connection is None``) or in the adapted frame of a connection form
(see :mod:`modcalc.foliated`).  Algebraic operations (wedge, interior
product, contraction) work in any frame; differential operations need the
coordinate frame.

Sign conventions:

* ``i_{X1 ^ ... ^ Xk} = i_{X1} o ... o i_{Xk}`` (insertion of multivectors);
* ``<beta, sharp(Pi, alpha)> = Pi(alpha, beta)``, i.e. ``(Pi# alpha)^j = alpha_i Pi^{ij}``;
* ``flat(B, X) = i_X B``;
* Schouten bracket ``[P, Q] = sum_i dP/dxi_i . dQ/dx^i - (-1)^{(p-1)(q-1)} dQ/dxi_i . dP/dx^i``
  with right derivatives in the odd variables, so ``[X, f] = X(f)`` and on
  vector fields it is the usual Lie bracket.
"""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType

from modcalc.errors import ChartMismatch, DegenerateVolume, FrameMismatch, NotTopGrade
from modcalc.ratfun import Chart, ScalarFunction

__all__ = [
    "Multivector",
    "DifferentialForm",
    "VolumeForm",
    "wedge",
    "interior_product",
    "contract",
    "exterior_derivative",
    "dlog",
    "differential",
    "wedge_power",
    "apply_vector",
    "lie_derivative",
    "schouten_bracket",
    "sharp",
    "flat",
    "divergence",
    "pairing",
    "vector_field",
    "one_form",
    "coordinate_vector",
    "coordinate_differential",
    "top_form",
    "format_tensor",
    "parse_tensor",
]


# ----------------------------------------------------------- index combinatorics
@lru_cache(maxsize=None)
def _sort_index(idx):
    """Sign and sorted tuple of a basis monomial, or None if an index repeats."""
    if len(set(idx)) != len(idx):
        return None
    inversions = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(idx))


@lru_cache(maxsize=None)
def _wedge_basis(left, right):
    if set(left) & set(right):
        return None
    inversions = sum(1 for a in left for b in right if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(left + right))


@lru_cache(maxsize=None)
def _insert_basis(vec, form):
    """i_{e_vec} e^form under the composition convention (innermost = last vector)."""
    rest = list(form)
    sign = 1
    for j in reversed(vec):
        try:
            pos = rest.index(j)
        except ValueError:
            return None
        if pos % 2:
            sign = -sign
        rest.pop(pos)
    return sign, tuple(rest)


@lru_cache(maxsize=None)
def _left_drops(idx):
    """(j, sign, idx without j) with sign (-1)^position: left contraction by e^j."""
    return tuple((j, -1 if pos % 2 else 1, idx[:pos] + idx[pos + 1 :]) for pos, j in enumerate(idx))


@lru_cache(maxsize=None)
def _right_drops(idx):
    """(j, sign, idx without j) with sign (-1)^(k-1-position): right odd derivative."""
    k = len(idx)
    return tuple(
        (j, -1 if (k - 1 - pos) % 2 else 1, idx[:pos] + idx[pos + 1 :]) for pos, j in enumerate(idx)
    )


def _accumulate(out, key, value):
    prev = out.get(key)
    if prev is not None:
        value = prev + value
    if value.is_zero():
        out.pop(key, None)
    else:
        out[key] = value


# ------------------------------------------------------------------ tensor types
def _coerce_coeff(chart, value):
    if isinstance(value, ScalarFunction):
        if value.chart != chart:
            raise ChartMismatch(f"coefficient on {value.chart}, tensor on {chart}")
        return value
    if isinstance(value, str):
        return chart.parse(value)
    return chart.const(value)


class _Tensor:
    __slots__ = ("chart", "connection", "_c")
    kind = "tensor"

    def __init__(self, chart: Chart, components=(), connection=None):
        self.chart = chart
        self.connection = connection
        out = {}
        items = components.items() if isinstance(components, Mapping) else components
        for idx, coeff in items:
            idx = tuple(chart.index(i) for i in idx)
            s = _sort_index(idx)
            if s is None:
                continue
            sign, key = s
            coeff = _coerce_coeff(chart, coeff)
            _accumulate(out, key, -coeff if sign < 0 else coeff)
        self._c = out

    @classmethod
    def _raw(cls, chart, comps, connection=None):
        obj = cls.__new__(cls)
        obj.chart = chart
        obj.connection = connection
        obj._c = comps
        return obj

    def _like(self, comps, connection=...):
        return type(self)._raw(self.chart, comps, self.connection if connection is ... else connection)

    @classmethod
    def zero(cls, chart, connection=None):
        return cls._raw(chart, {}, connection)

    @classmethod
    def scalar(cls, f: ScalarFunction, connection=None):
        return cls._raw(f.chart, {} if f.is_zero() else {(): f}, connection)

    # -------------------------------------------------------------- inspection
    @property
    def frame(self) -> str:
        return "coordinate" if self.connection is None else "adapted"

    @property
    def components(self):
        return MappingProxyType(self._c)

    def items(self):
        return self._c.items()

    def __getitem__(self, idx):
        idx = tuple(self.chart.index(i) for i in idx)
        s = _sort_index(idx)
        if s is None:
            return self.chart.zero()
        sign, key = s
        value = self._c.get(key)
        if value is None:
            return self.chart.zero()
        return -value if sign < 0 else value

    def __len__(self):
        return len(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def grades(self):
        return sorted({len(k) for k in self._c})

    def grade(self, k: int):
        return self._like({i: c for i, c in self._c.items() if len(i) == k})

    def homogeneous_parts(self):
        parts = {}
        for idx, c in self._c.items():
            parts.setdefault(len(idx), {})[idx] = c
        return {k: self._like(v) for k, v in sorted(parts.items())}

    def is_homogeneous(self, k=None) -> bool:
        g = self.grades()
        if not g:
            return True
        return len(g) == 1 and (k is None or g[0] == k)

    # --------------------------------------------------------------- algebra
    def _check(self, other):
        if type(other) is not type(self):
            raise FrameMismatch(f"cannot combine {self.kind} with {getattr(other, 'kind', other)!r}")
        _check_frames(self, other)

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, _Tensor):
            return NotImplemented
        self._check(other)
        out = dict(self._c)
        for k, v in other._c.items():
            _accumulate(out, k, v)
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        if not isinstance(other, _Tensor):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, _Tensor):
            return NotImplemented
        if not isinstance(scalar, ScalarFunction):
            scalar = self.chart.const(scalar)
        elif scalar.chart != self.chart:
            raise ChartMismatch(f"{scalar.chart} vs {self.chart}")
        if scalar.is_zero():
            return self._like({})
        out = {}
        for k, v in self._c.items():
            w = v * scalar
            if not w.is_zero():
                out[k] = w
        return self._like(out)

    __rmul__ = __mul__

    def map_coefficients(self, fn):
        out = {}
        for k, v in self._c.items():
            w = fn(v)
            if not w.is_zero():
                out[k] = w
        return self._like(out)

    def subs(self, values):
        return self.map_coefficients(lambda f: f.subs(values))

    def evaluate(self, point):
        return {k: v.evaluate(point) for k, v in self._c.items()}

    def with_connection(self, connection):
        """Re-tag the frame without changing components (caller guarantees validity)."""
        return self._like(dict(self._c), connection)

    def __eq__(self, other):
        if not isinstance(other, _Tensor):
            if isinstance(other, int) and other == 0:
                return self.is_zero()
            return NotImplemented
        if type(other) is not type(self) or self.chart != other.chart:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.connection == other.connection and self._c == other._c

    def __hash__(self):
        return hash((self.kind, self.chart, frozenset(self._c.items())))

    def __str__(self):
        return format_tensor(self)

    def __repr__(self):
        return f"{type(self).__name__}({format_tensor(self)!r}, frame={self.frame})"


class Multivector(_Tensor):
    __slots__ = ()
    kind = "multivector"


class DifferentialForm(_Tensor):
    __slots__ = ()
    kind = "form"


def _check_frames(a, b):
    if a.chart != b.chart:
        raise ChartMismatch(f"{a.chart} vs {b.chart}")
    if a.connection is not b.connection and a.connection != b.connection:
        raise FrameMismatch(f"{a.frame} frame vs {b.frame} frame")


def _require_coordinate(*tensors):
    for t in tensors:
        if t.connection is not None:
            raise FrameMismatch("operation needs the coordinate frame")


def _require_kind(t, cls, what):
    if not isinstance(t, cls):
        raise FrameMismatch(f"{what} must be a {cls.kind}, got {getattr(t, 'kind', type(t).__name__)}")


# ------------------------------------------------------------ constructors
def coordinate_vector(chart: Chart, i) -> Multivector:
    return Multivector._raw(chart, {(chart.index(i),): chart.one()})


def coordinate_differential(chart: Chart, i) -> DifferentialForm:
    return DifferentialForm._raw(chart, {(chart.index(i),): chart.one()})


def vector_field(chart: Chart, coefficients) -> Multivector:
    """Vector field from one coefficient per coordinate (expressions allowed)."""
    return Multivector(chart, {(i,): c for i, c in enumerate(coefficients)})


def one_form(chart: Chart, coefficients) -> DifferentialForm:
    return DifferentialForm(chart, {(i,): c for i, c in enumerate(coefficients)})


def top_form(chart: Chart, density) -> DifferentialForm:
    return DifferentialForm(chart, {tuple(range(chart.dim)): density})


# ------------------------------------------------------------ algebraic ops
def wedge(a, b):
    if type(a) is not type(b):
        raise FrameMismatch(f"cannot wedge {a.kind} with {b.kind}")
    _check_frames(a, b)
    out = {}
    for i, ca in a._c.items():
        for j, cb in b._c.items():
            w = _wedge_basis(i, j)
            if w is None:
                continue
            sign, k = w
            v = ca * cb
            _accumulate(out, k, -v if sign < 0 else v)
    return a._like(out)


def wedge_power(a, k: int):
    result = type(a)._raw(a.chart, {(): a.chart.one()}, a.connection)
    for _ in range(k):
        result = wedge(result, a)
    return result


def interior_product(a: Multivector, beta: DifferentialForm) -> DifferentialForm:
    """i_A beta with i_{X1^...^Xk} = i_{X1} o ... o i_{Xk}."""
    _require_kind(a, Multivector, "first argument")
    _require_kind(beta, DifferentialForm, "second argument")
    _check_frames(a, beta)
    out = {}
    for j, ca in a._c.items():
        for k, cb in beta._c.items():
            r = _insert_basis(j, k)
            if r is None:
                continue
            sign, rest = r
            v = ca * cb
            _accumulate(out, rest, -v if sign < 0 else v)
    return beta._like(out)


def contract(alpha: DifferentialForm, a: Multivector) -> Multivector:
    """Left contraction i_alpha A of a 1-form into a multivector."""
    _require_kind(alpha, DifferentialForm, "first argument")
    _require_kind(a, Multivector, "second argument")
    _check_frames(alpha, a)
    if not alpha.is_homogeneous(1):
        raise NotTopGrade("contraction into a multivector needs a 1-form")
    coeffs = {i[0]: c for i, c in alpha._c.items()}
    out = {}
    for idx, ca in a._c.items():
        for j, sign, rest in _left_drops(idx):
            cj = coeffs.get(j)
            if cj is None:
                continue
            v = ca * cj
            _accumulate(out, rest, -v if sign < 0 else v)
    return a._like(out)


def pairing(alpha: DifferentialForm, x: Multivector) -> ScalarFunction:
    """<alpha, X> for a 1-form and a vector field."""
    return contract(alpha, x)[()]


def sharp(pi: Multivector, alpha: DifferentialForm) -> Multivector:
    """Pi#(alpha), defined by <beta, Pi# alpha> = Pi(alpha, beta)."""
    _require_kind(pi, Multivector, "bivector")
    if not pi.is_homogeneous(2):
        raise NotTopGrade("sharp needs a bivector")
    return contract(alpha, pi)


def flat(b: DifferentialForm, x: Multivector) -> DifferentialForm:
    """B-flat(X) = i_X B."""
    _require_kind(b, DifferentialForm, "2-form")
    if not b.is_homogeneous(2) or not x.is_homogeneous(1):
        raise NotTopGrade("flat needs a 2-form and a vector field")
    return interior_product(x, b)


# ---------------------------------------------------------- differential ops
def exterior_derivative(beta: DifferentialForm) -> DifferentialForm:
    _require_kind(beta, DifferentialForm, "argument")
    _require_coordinate(beta)
    n = beta.chart.dim
    out = {}
    for k, c in beta._c.items():
        for j in range(n):
            if j in k:
                continue
            dc = c.diff(j)
            if dc.is_zero():
                continue
            sign, key = _wedge_basis((j,), k)
            _accumulate(out, key, -dc if sign < 0 else dc)
    return beta._like(out)


def differential(f: ScalarFunction) -> DifferentialForm:
    return exterior_derivative(DifferentialForm.scalar(f))


def dlog(f: ScalarFunction) -> DifferentialForm:
    """The rational 1-form df/f standing for d ln|f|."""
    if f.is_zero():
        from modcalc.errors import DivisionByZeroFunction

        raise DivisionByZeroFunction("dlog of the zero function")
    return differential(f) * f.inverse()


def apply_vector(x: Multivector, f: ScalarFunction) -> ScalarFunction:
    """X(f) for a vector field X."""
    total = f.chart.zero()
    for idx, c in x._c.items():
        if len(idx) != 1:
            raise NotTopGrade("apply_vector needs a vector field")
        df = f.diff(idx[0])
        if not df.is_zero():
            total = total + c * df
    return total


def _schouten_half(p, q, out, outer_sign):
    """Accumulate outer_sign * sum_i (d_r P / d xi_i) ^ (dQ / dx^i)."""
    dcache = {}
    for i_idx, cp in p._c.items():
        for j, sgn, rest in _right_drops(i_idx):
            for k_idx, cq in q._c.items():
                key = (k_idx, j)
                dq = dcache.get(key)
                if dq is None:
                    dq = dcache[key] = cq.diff(j)
                if dq.is_zero():
                    continue
                w = _wedge_basis(rest, k_idx)
                if w is None:
                    continue
                sign = sgn * w[0] * outer_sign
                v = cp * dq
                _accumulate(out, w[1], -v if sign < 0 else v)


def schouten_bracket(a: Multivector, b: Multivector) -> Multivector:
    _require_kind(a, Multivector, "first argument")
    _require_kind(b, Multivector, "second argument")
    _check_frames(a, b)
    _require_coordinate(a, b)
    out = {}
    for p, ap in a.homogeneous_parts().items():
        for q, bq in b.homogeneous_parts().items():
            eps = -1 if ((p - 1) * (q - 1)) % 2 else 1
            _schouten_half(ap, bq, out, 1)
            _schouten_half(bq, ap, out, -eps)
    return a._like(out)


def lie_derivative(x: Multivector, t):
    """L_X on forms (Cartan formula) or multivectors ([X, T])."""
    _require_kind(x, Multivector, "first argument")
    if not x.is_homogeneous(1):
        raise NotTopGrade("Lie derivative along a non-vector multivector")
    if isinstance(t, DifferentialForm):
        _check_frames(x, t)
        _require_coordinate(x, t)
        return interior_product(x, exterior_derivative(t)) + exterior_derivative(
            interior_product(x, t)
        )
    return schouten_bracket(x, t)


# ------------------------------------------------------------------ volumes
class VolumeForm:
    """A top-degree form g dx^1^...^dx^n with nonvanishing spot checks."""

    __slots__ = ("chart", "density", "samples", "_form")

    def __init__(self, chart: Chart, density=1, samples=()):
        density = _coerce_coeff(chart, density)
        if density.is_zero():
            raise DegenerateVolume("volume density is identically zero")
        pts = []
        for pt in samples:
            pt = tuple(Fraction(v) if not isinstance(v, str) else Fraction(v) for v in pt)
            try:
                value = density.evaluate(pt)
            except ZeroDivisionError:
                raise DegenerateVolume(f"volume density has a pole at sample {pt}") from None
            if value == 0:
                raise DegenerateVolume(f"volume density vanishes at sample {pt}")
            pts.append(pt)
        self.chart = chart
        self.density = density
        self.samples = tuple(pts)
        self._form = None

    @classmethod
    def from_form(cls, form: DifferentialForm, samples=()):
        _require_coordinate(form)
        n = form.chart.dim
        if any(len(k) != n for k in form._c):
            raise NotTopGrade("volume must be a top-degree form")
        return cls(form.chart, form[tuple(range(n))], samples)

    @classmethod
    def euclidean(cls, chart: Chart):
        return cls(chart, 1)

    @property
    def form(self) -> DifferentialForm:
        if self._form is None:
            self._form = DifferentialForm._raw(self.chart, {tuple(range(self.chart.dim)): self.density})
        return self._form

    def scaled(self, f: ScalarFunction, samples=None):
        return VolumeForm(self.chart, self.density * f, self.samples if samples is None else samples)

    def __repr__(self):
        return f"VolumeForm({self.density} dvol)"


def divergence(x: Multivector, omega) -> ScalarFunction:
    """div^Omega(X), the function with L_X Omega = div(X) Omega."""
    if isinstance(omega, DifferentialForm):
        omega = VolumeForm.from_form(omega)
    if not isinstance(omega, VolumeForm):
        raise NotTopGrade("divergence needs a volume form")
    lx = exterior_derivative(interior_product(x, omega.form))
    return lx[tuple(range(x.chart.dim))] / omega.density


# ---------------------------------------------------------------- text I/O
def format_tensor(t) -> str:
    """``[a,b]: expr; [c]: expr`` with coordinate names; ``0`` when empty."""
    if t.is_zero():
        return "0"
    names = t.chart.names
    parts = []
    for idx in sorted(t._c, key=lambda k: (len(k), k)):
        label = ",".join(names[i] for i in idx)
        parts.append(f"[{label}]: {t._c[idx]}")
    return "; ".join(parts)


def parse_tensor(text: str, chart: Chart, kind: str = "multivector", connection=None):
    cls = Multivector if kind == "multivector" else DifferentialForm
    text = text.strip()
    if text == "0":
        return cls._raw(chart, {}, connection)
    comps = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk.startswith("["):
            raise ValueError(f"tensor component must start with '[': {chunk!r}")
        close = chunk.index("]")
        label = chunk[1:close].strip()
        rest = chunk[close + 1 :].lstrip()
        if not rest.startswith(":"):
            raise ValueError(f"missing ':' in tensor component {chunk!r}")
        idx = tuple(s.strip() for s in label.split(",")) if label else ()
        comps.append((idx, chart.parse(rest[1:])))
    t = cls(chart, comps)
    return t if connection is None else t.with_connection(connection)
