"""Adapted charts, connection forms and the bigraded exterior calculus.

An :class:`AdaptedSplit` orders the chart as ``(x^1..x^p | y^1..y^q)``; the
foliation is the family of level sets of the ``x`` coordinates.  A
:class:`ConnectionForm` with matrix ``Gamma[i][a]`` gives the horizontal frame
``h_i = d/dx^i - Gamma[i][a] d/dy^a`` and the vertical coframe
``eta^a = dy^a + Gamma[i][a] dx^i``.

Tensors in the adapted frame reuse the chart's index positions: position
``i < p`` stands for ``h_i`` (or ``dx^i``) and position ``p + a`` for
``d/dy^a`` (or ``eta^a``).  A tensor's bidegree counts horizontal and
vertical positions, in that order.
"""

from __future__ import annotations

from modcalc.errors import (
    ChartMismatch,
    DegenerateVolume,
    FrameMismatch,
    NotTopGrade,
    WrongBidegree,
)
from modcalc.exterior import (
    DifferentialForm,
    Multivector,
    VolumeForm,
    _accumulate,
    _coerce_coeff,
    _wedge_basis,
    apply_vector,
    exterior_derivative,
    interior_product,
    lie_derivative,
    schouten_bracket,
    wedge,
)
from modcalc.ratfun import Chart

__all__ = [
    "AdaptedSplit",
    "ConnectionForm",
    "BigradedTensor",
    "LeafVolume",
    "TransversalVolume",
    "to_adapted",
    "to_coordinate",
    "bigrade",
    "bidegree_of",
    "curvature",
    "curvature_insertion",
    "curvature_lie_derivative",
    "d_components",
    "d10",
    "d01",
    "horizontal_lift",
    "foliated_derivative",
    "leaf_restriction",
    "divergence_form",
    "leafwise_divergence",
    "reeb_form",
    "is_projectable",
    "total_volume",
]


class AdaptedSplit:
    """Chart ``(x^1..x^p | y^1..y^q)`` for the simple foliation by x = const."""

    __slots__ = ("horizontal", "vertical", "chart")

    def __init__(self, horizontal, vertical):
        horizontal = tuple(horizontal)
        vertical = tuple(vertical)
        if not vertical:
            raise ValueError("an adapted split needs at least one vertical coordinate")
        self.horizontal = horizontal
        self.vertical = vertical
        self.chart = Chart(horizontal + vertical)

    @property
    def p(self) -> int:
        return len(self.horizontal)

    @property
    def q(self) -> int:
        return len(self.vertical)

    @property
    def n(self) -> int:
        return self.p + self.q

    def horizontal_indices(self):
        return range(self.p)

    def vertical_indices(self):
        return range(self.p, self.n)

    def is_vertical_index(self, k: int) -> bool:
        return k >= self.p

    def bidegree(self, idx):
        h = sum(1 for k in idx if k < self.p)
        return h, len(idx) - h

    def __eq__(self, other):
        return (
            isinstance(other, AdaptedSplit)
            and other.horizontal == self.horizontal
            and other.vertical == self.vertical
        )

    def __hash__(self):
        return hash((self.horizontal, self.vertical))

    def __repr__(self):
        return f"AdaptedSplit({', '.join(self.horizontal)} | {', '.join(self.vertical)})"


class ConnectionForm:
    """Connection form gamma given by its p x q matrix ``Gamma[i][a]``."""

    __slots__ = ("split", "gamma", "_vec_in", "_vec_out", "_form_in", "_form_out", "_deta", "_hash")

    def __init__(self, split: AdaptedSplit, gamma=None):
        chart = split.chart
        p, q = split.p, split.q
        if gamma is None:
            gamma = [[0] * q for _ in range(p)]
        gamma = [list(row) for row in gamma]
        if len(gamma) != p or any(len(row) != q for row in gamma):
            raise ValueError(f"connection matrix must be {p} x {q}")
        self.split = split
        self.gamma = tuple(tuple(_coerce_coeff(chart, v) for v in row) for row in gamma)
        one = chart.one()
        # coordinate -> adapted and back, on basis vectors and covectors
        self._vec_in = {}
        self._vec_out = {}
        self._form_in = {}
        self._form_out = {}
        for i in range(p):
            self._vec_in[i] = [(i, one)] + [(p + a, g) for a, g in enumerate(self.gamma[i]) if g]
            self._vec_out[i] = [(i, one)] + [(p + a, -g) for a, g in enumerate(self.gamma[i]) if g]
            self._form_in[i] = [(i, one)]
            self._form_out[i] = [(i, one)]
        for a in range(q):
            k = p + a
            self._vec_in[k] = [(k, one)]
            self._vec_out[k] = [(k, one)]
            self._form_in[k] = [(k, one)] + [(i, -self.gamma[i][a]) for i in range(p) if self.gamma[i][a]]
            self._form_out[k] = [(k, one)] + [(i, self.gamma[i][a]) for i in range(p) if self.gamma[i][a]]
        self._deta = None
        self._hash = None

    @classmethod
    def flat(cls, split: AdaptedSplit):
        return cls(split)

    @property
    def chart(self) -> Chart:
        return self.split.chart

    def entry(self, i: int, a: int):
        return self.gamma[i][a]

    def is_trivial(self) -> bool:
        return all(g.is_zero() for row in self.gamma for g in row)

    def h(self, i: int) -> Multivector:
        """Horizontal frame field h_i in the coordinate frame."""
        return Multivector._raw(self.chart, dict(((k,), c) for k, c in self._vec_out[i]))

    def eta(self, a: int) -> DifferentialForm:
        """Vertical coframe form eta^a in the coordinate frame."""
        return DifferentialForm._raw(self.chart, dict(((k,), c) for k, c in self._form_out[self.split.p + a]))

    def h_apply(self, i: int, f):
        """h_i(f) = df/dx^i - Gamma[i][a] df/dy^a."""
        p = self.split.p
        out = f.diff(i)
        for a, g in enumerate(self.gamma[i]):
            if g:
                out = out - g * f.diff(p + a)
        return out

    def __eq__(self, other):
        return isinstance(other, ConnectionForm) and other.split == self.split and other.gamma == self.gamma

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.split, self.gamma))
        return self._hash

    def __repr__(self):
        rows = "; ".join(", ".join(str(g) for g in row) for row in self.gamma)
        return f"ConnectionForm({self.split!r}, [{rows}])"


# ---------------------------------------------------------------- frame change
def _transform(comps, images, chart):
    out = {}
    for idx, c in comps.items():
        partial = {(): c}
        for k in idx:
            nxt = {}
            for key, v in partial.items():
                for j, w in images[k]:
                    wb = _wedge_basis(key, (j,))
                    if wb is None:
                        continue
                    sign, nk = wb
                    t = v * w
                    _accumulate(nxt, nk, -t if sign < 0 else t)
            partial = nxt
        for key, v in partial.items():
            _accumulate(out, key, v)
    return out


def _check_chart(t, gamma):
    if t.chart != gamma.chart:
        raise ChartMismatch(f"tensor on {t.chart}, connection on {gamma.chart}")


def to_adapted(t, gamma: ConnectionForm):
    """Express a coordinate-frame tensor in the adapted frame of gamma."""
    _check_chart(t, gamma)
    if t.connection is not None:
        if t.connection == gamma:
            return t
        t = to_coordinate(t)
    images = gamma._vec_in if isinstance(t, Multivector) else gamma._form_in
    return type(t)._raw(t.chart, _transform(t._c, images, t.chart), gamma)


def to_coordinate(t):
    """Expand an adapted-frame tensor back into the coordinate frame."""
    gamma = t.connection
    if gamma is None:
        return t
    images = gamma._vec_out if isinstance(t, Multivector) else gamma._form_out
    return type(t)._raw(t.chart, _transform(t._c, images, t.chart), None)


def bidegree_of(t):
    """Set of bidegrees present in an adapted-frame tensor."""
    split = t.connection.split
    return sorted({split.bidegree(k) for k in t._c})


def _part(t, bidegree):
    split = t.connection.split
    return t._like({k: v for k, v in t._c.items() if split.bidegree(k) == bidegree})


class BigradedTensor:
    """Components of fixed bidegree ``(horizontal, vertical)`` in the adapted frame."""

    __slots__ = ("connection", "kind", "parts")

    def __init__(self, connection: ConnectionForm, kind, parts):
        self.connection = connection
        self.kind = kind
        self.parts = {k: v for k, v in parts.items() if not v.is_zero()}

    @classmethod
    def from_adapted(cls, t):
        split = t.connection.split
        groups = {}
        for k, v in t._c.items():
            groups.setdefault(split.bidegree(k), {})[k] = v
        return cls(t.connection, type(t), {b: t._like(c) for b, c in groups.items()})

    def __getitem__(self, bidegree):
        part = self.parts.get(tuple(bidegree))
        if part is None:
            return self.kind._raw(self.connection.chart, {}, self.connection)
        return part

    def bidegrees(self):
        return sorted(self.parts)

    def is_pure(self, bidegree=None) -> bool:
        b = self.bidegrees()
        if not b:
            return True
        return len(b) == 1 and (bidegree is None or b[0] == tuple(bidegree))

    def adapted(self):
        total = self.kind._raw(self.connection.chart, {}, self.connection)
        for v in self.parts.values():
            total = total + v
        return total

    def reassemble(self):
        return to_coordinate(self.adapted())

    def __repr__(self):
        inner = ", ".join(f"{b}: {self.parts[b]}" for b in self.bidegrees())
        return f"BigradedTensor({{{inner}}})"


def bigrade(t, gamma: ConnectionForm) -> BigradedTensor:
    return BigradedTensor.from_adapted(to_adapted(t, gamma))


# ------------------------------------------------------------------- curvature
def curvature(gamma: ConnectionForm):
    """{(i, j): R(h_i, h_j)} for i < j, vertical fields in the coordinate frame.

    R(h_i, h_j) = gamma[h_i, h_j]; the bracket of two horizontal frame fields
    is already vertical.
    """
    p = gamma.split.p
    out = {}
    for i in range(p):
        hi = gamma.h(i)
        for j in range(i + 1, p):
            out[(i, j)] = schouten_bracket(hi, gamma.h(j))
    return out


def _adapted_form(beta, gamma):
    if not isinstance(beta, DifferentialForm):
        raise NotTopGrade("expected a differential form")
    return to_adapted(beta, gamma)


def curvature_insertion(beta, gamma: ConnectionForm) -> DifferentialForm:
    """i_R beta = sum_{i<j} dx^i ^ dx^j ^ i_{R(h_i,h_j)} beta, in the adapted frame."""
    b = _adapted_form(beta, gamma)
    chart = gamma.chart
    out = DifferentialForm._raw(chart, {}, gamma)
    for (i, j), r in curvature(gamma).items():
        if r.is_zero():
            continue
        # vertical coordinate fields coincide with the adapted vertical frame
        r_ad = r.with_connection(gamma)
        inner = interior_product(r_ad, b)
        if inner.is_zero():
            continue
        dxdx = DifferentialForm._raw(chart, {(i, j): chart.one()}, gamma)
        out = out + wedge(dxdx, inner)
    return out


def _deta(gamma):
    """d(eta^a) split into its (1,1) and (2,0) parts, adapted frame."""
    if gamma._deta is None:
        split = gamma.split
        p, q = split.p, split.q
        chart = gamma.chart
        mixed, horiz = [], []
        for a in range(q):
            m, h = {}, {}
            for i in range(p):
                g = gamma.gamma[i][a]
                if g.is_zero():
                    continue
                for b in range(q):
                    dg = g.diff(p + b)
                    if not dg.is_zero():
                        # d_b Gamma eta^b ^ dx^i  =  - d_b Gamma dx^i ^ eta^b
                        _accumulate(m, (i, p + b), -dg)
                for j in range(p):
                    if j == i:
                        continue
                    hg = gamma.h_apply(j, g)
                    if hg.is_zero():
                        continue
                    sign, key = _wedge_basis((j,), (i,))
                    _accumulate(h, key, -hg if sign < 0 else hg)
            mixed.append(m)
            horiz.append(h)
        gamma._deta = (mixed, horiz)
    return gamma._deta


def d_components(beta, gamma: ConnectionForm):
    """(d_{1,0} beta, d_{0,1} beta, d_{2,-1} beta) as adapted-frame forms.

    Computed in the adapted frame with d f = h_i(f) dx^i + df/dy^a eta^a,
    d(dx^i) = 0 and the Leibniz rule on the eta^a.
    """
    b = _adapted_form(beta, gamma)
    split = gamma.split
    p = split.p
    n = split.n
    mixed, horiz = _deta(gamma)
    d10, d01, d21 = {}, {}, {}
    for idx, f in b._c.items():
        for i in range(p):
            if i in idx:
                continue
            hf = gamma.h_apply(i, f)
            if not hf.is_zero():
                sign, key = _wedge_basis((i,), idx)
                _accumulate(d10, key, -hf if sign < 0 else hf)
        for k in range(p, n):
            if k in idx:
                continue
            df = f.diff(k)
            if not df.is_zero():
                sign, key = _wedge_basis((k,), idx)
                _accumulate(d01, key, -df if sign < 0 else df)
        for pos, k in enumerate(idx):
            if k < p:
                continue
            a = k - p
            before, after = idx[:pos], idx[pos + 1 :]
            outer = -1 if pos % 2 else 1
            for target, piece in ((d10, mixed[a]), (d21, horiz[a])):
                for two, c in piece.items():
                    w1 = _wedge_basis(before, two)
                    if w1 is None:
                        continue
                    w2 = _wedge_basis(w1[1], after)
                    if w2 is None:
                        continue
                    sign = outer * w1[0] * w2[0]
                    v = f * c
                    _accumulate(target, w2[1], -v if sign < 0 else v)
    chart = gamma.chart
    return tuple(DifferentialForm._raw(chart, c, gamma) for c in (d10, d01, d21))


def d10(beta, gamma):
    return d_components(beta, gamma)[0]


def d01(beta, gamma):
    return d_components(beta, gamma)[1]


def curvature_lie_derivative(beta, gamma: ConnectionForm) -> DifferentialForm:
    """The curvature term L_R = d_{0,1} o i_R + i_R o d_{0,1}; equals (d_{1,0})^2."""
    ir = curvature_insertion(beta, gamma)
    return d01(ir, gamma) + curvature_insertion(d01(beta, gamma), gamma)


def foliated_derivative(mu, gamma: ConnectionForm) -> DifferentialForm:
    """d_{0,1} on a leafwise form of pure bidegree (0, k)."""
    if isinstance(mu, BigradedTensor):
        mu = mu.adapted()
    mu = _adapted_form(mu, gamma)
    degs = bidegree_of(mu)
    if len(degs) > 1 or (degs and degs[0][0] != 0):
        raise WrongBidegree(f"foliated derivative needs a (0,k) form, got bidegrees {degs}")
    return d01(mu, gamma)


def leaf_restriction(t) -> DifferentialForm:
    """Pullback to the leaves: drop dx terms and read eta^a as dy^a."""
    if t.connection is None:
        split_p = None
    else:
        split_p = t.connection.split.p
    if split_p is None:
        raise FrameMismatch("leaf restriction needs an adapted-frame form")
    return type(t)._raw(t.chart, {k: v for k, v in t._c.items() if all(j >= split_p for j in k)}, None)


# -------------------------------------------------------------------- volumes
class _PartialVolume:
    __slots__ = ("split", "density", "samples")

    def __init__(self, split: AdaptedSplit, density=1, samples=()):
        # reuse the nonvanishing checks of a top form on the full chart
        vol = VolumeForm(split.chart, density, samples)
        self.split = split
        self.density = vol.density
        self.samples = vol.samples

    def scaled(self, f, samples=None):
        return type(self)(self.split, self.density * f, self.samples if samples is None else samples)


class LeafVolume(_PartialVolume):
    """Leafwise volume tau, represented by tau_gamma = g eta^1 ^ ... ^ eta^q."""

    __slots__ = ()

    def form(self, gamma: ConnectionForm) -> DifferentialForm:
        return DifferentialForm._raw(gamma.chart, {tuple(self.split.vertical_indices()): self.density}, gamma)

    def __repr__(self):
        return f"LeafVolume({self.density})"


class TransversalVolume(_PartialVolume):
    """Transversal volume element g dx^1 ^ ... ^ dx^p."""

    __slots__ = ()

    def form(self, gamma: ConnectionForm | None = None) -> DifferentialForm:
        comps = {tuple(self.split.horizontal_indices()): self.density}
        return DifferentialForm._raw(self.split.chart, comps, gamma)

    def __repr__(self):
        return f"TransversalVolume({self.density})"


def total_volume(transversal: TransversalVolume, leaf: LeafVolume, samples=None) -> VolumeForm:
    """Omega = varsigma ^ tau_gamma; the eta's reduce to dy's next to a full dx block."""
    if samples is None:
        samples = tuple(leaf.samples) + tuple(transversal.samples)
    return VolumeForm(leaf.split.chart, transversal.density * leaf.density, samples)


def _divide(target, base, one_form_indices, gamma):
    """Solve alpha ^ base = target for a 1-form alpha on the given positions.

    Returns (alpha, residual) with residual = target - alpha ^ base.
    """
    (base_idx, g), = base._c.items()
    ginv = g.inverse()
    comps = {}
    for k in one_form_indices:
        w = _wedge_basis((k,), base_idx)
        if w is None:
            continue
        c = target._c.get(w[1])
        if c is None:
            continue
        v = c * ginv
        comps[(k,)] = -v if w[0] < 0 else v
    alpha = DifferentialForm._raw(gamma.chart, comps, gamma)
    return alpha, target - wedge(alpha, base)


def divergence_form(tau: LeafVolume, gamma: ConnectionForm) -> DifferentialForm:
    """theta with d_{1,0} tau_gamma = theta ^ tau_gamma; dx-only, coordinate frame."""
    if tau.density.is_zero():
        raise DegenerateVolume("leafwise volume density is identically zero")
    form = tau.form(gamma)
    theta, residual = _divide(d10(form, gamma), form, gamma.split.horizontal_indices(), gamma)
    if not residual.is_zero():
        raise AssertionError(f"divergence form equation has no dx-solution: residual {residual}")
    return theta.with_connection(None)


def leafwise_divergence(x: Multivector, tau: LeafVolume, gamma: ConnectionForm):
    """div^tau(X): the (0,q) part of L_X tau_gamma divided by tau_gamma."""
    form = to_coordinate(tau.form(gamma))
    lx = to_adapted(lie_derivative(x, form), gamma)
    key = tuple(gamma.split.vertical_indices())
    return lx[key] / tau.density


def reeb_form(varsigma: TransversalVolume, gamma: ConnectionForm) -> DifferentialForm:
    """lambda with d_{0,1} varsigma = lambda ^ varsigma; eta-only, adapted frame."""
    if varsigma.density.is_zero():
        raise DegenerateVolume("transversal volume density is identically zero")
    form = varsigma.form(gamma)
    lam, residual = _divide(d01(form, gamma), form, gamma.split.vertical_indices(), gamma)
    if not residual.is_zero():
        raise AssertionError(f"Reeb equation has no eta-solution: residual {residual}")
    return lam


def is_projectable(x: Multivector, split: AdaptedSplit) -> bool:
    """True iff the dx-components of X depend on the base coordinates only."""
    if x.connection is not None:
        x = to_coordinate(x)
    for idx, c in x._c.items():
        if len(idx) != 1:
            raise NotTopGrade("is_projectable needs a vector field")
        if idx[0] < split.p and any(c.depends_on(k) for k in split.vertical_indices()):
            return False
    return True


def horizontal_lift(gamma: ConnectionForm, base_field) -> Multivector:
    """sum_i c_i h_i for base coefficients c_i (coordinate frame)."""
    out = Multivector.zero(gamma.chart)
    for i, c in enumerate(base_field):
        c = _coerce_coeff(gamma.chart, c)
        if c:
            out = out + gamma.h(i) * c
    return out


def frame_value(x: Multivector, f):
    """Convenience alias of X(f) used by the foliated checks."""
    return apply_vector(x, f)


def coordinate_d(beta):
    """Coordinate exterior derivative of an adapted or coordinate form (coordinate result)."""
    return exterior_derivative(to_coordinate(beta))
