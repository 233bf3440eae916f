"""Poisson bivectors, modular vector fields and Poisson foliations."""

from __future__ import annotations

from modcalc.errors import (
    DegenerateVolume,
    NotLeafTangent,
    NotPoisson,
    NotTopGrade,
    WrongBidegree,
)
from modcalc.exterior import (
    DifferentialForm,
    Multivector,
    VolumeForm,
    _insert_basis,
    differential,
    dlog,
    exterior_derivative,
    interior_product,
    schouten_bracket,
    sharp,
)
from modcalc.foliated import (
    AdaptedSplit,
    ConnectionForm,
    LeafVolume,
    TransversalVolume,
    bidegree_of,
    d01,
    d10,
    reeb_form,
    to_adapted,
    to_coordinate,
    total_volume,
)
from modcalc.ratfun import Chart

__all__ = [
    "PoissonBivector",
    "PoissonFoliationData",
    "jacobi_check",
    "jacobi_via_schouten",
    "hamiltonian_field",
    "modular_field",
    "modular_transition_check",
    "is_casimir",
    "is_poisson_field",
    "foliated_modular_field",
    "mods_reeb_identity_check",
    "casimir_complex_member",
    "casimir_cocycle_check",
    "restrict_to_leaf",
]


class PoissonBivector:
    """A bivector together with the record of its Jacobi check."""

    __slots__ = ("bivector", "jacobi_verified")

    def __init__(self, bivector: Multivector, check: bool = True):
        if not isinstance(bivector, Multivector) or not bivector.is_homogeneous(2):
            raise NotTopGrade("a Poisson structure is a bivector")
        if check and not jacobi_check(bivector):
            raise NotPoisson(f"[Pi, Pi] != 0 for {bivector}")
        self.bivector = bivector
        self.jacobi_verified = bool(check)

    @property
    def chart(self) -> Chart:
        return self.bivector.chart

    def __eq__(self, other):
        other = _bivector(other)
        return self.bivector == other

    def __hash__(self):
        return hash(self.bivector)

    def __repr__(self):
        return f"PoissonBivector({self.bivector})"


def _bivector(pi):
    if isinstance(pi, PoissonBivector):
        return pi.bivector
    if isinstance(pi, PoissonFoliationData):
        return pi.P.bivector
    return pi


class PoissonFoliationData:
    """A leaf-tangent Poisson bivector P on an adapted split."""

    __slots__ = ("P", "split", "tangency_verified")

    def __init__(self, P, split: AdaptedSplit):
        if not isinstance(P, PoissonBivector):
            P = PoissonBivector(P)
        if P.chart != split.chart:
            raise NotLeafTangent(f"bivector on {P.chart}, split on {split.chart}")
        for idx in P.bivector.components:
            if any(k < split.p for k in idx):
                raise NotLeafTangent(f"P has a component along {idx}, not tangent to the leaves")
        self.P = P
        self.split = split
        self.tangency_verified = True

    @property
    def bivector(self) -> Multivector:
        return self.P.bivector

    def __repr__(self):
        return f"PoissonFoliationData({self.P.bivector}, {self.split!r})"


def jacobi_check(pi) -> bool:
    """True iff [Pi, Pi] vanishes identically.

    Equivalent to the cyclic sum  sum_l Pi^{li} d_l Pi^{jk} + cyclic = 0  for
    every i < j < k.  Writing Pi = N / D over a common denominator, D^3 times
    that sum is a polynomial, so the test runs without any gcd computations.
    """
    return _jacobi_polynomial(_bivector(pi))


def jacobi_via_schouten(pi) -> bool:
    """The same test evaluated through the Schouten bracket."""
    return schouten_bracket(_bivector(pi), _bivector(pi)).is_zero()


def _jacobi_polynomial(pi: Multivector) -> bool:
    n = pi.chart.dim
    ctx = pi.chart.ctx
    den = ctx.constant(1)
    for v in pi.components.values():
        if not v.den.is_one():
            den = den * (v.den / den.gcd(v.den))
    zero = ctx.constant(0)
    num = [[zero] * n for _ in range(n)]
    for (i, j), v in pi.components.items():
        c = v.num * (den / v.den) if not v.den.is_one() else v.num * den
        num[i][j] = c
        num[j][i] = -c
    dden = [den.derivative(l) for l in range(n)]
    # D * d_l(N^{jk}) - N^{jk} * d_l D = D^2 d_l Pi^{jk}
    grad = {}
    for j in range(n):
        for k in range(j + 1, n):
            c = num[j][k]
            if c.is_zero():
                continue
            grad[(j, k)] = [den * c.derivative(l) - c * dden[l] for l in range(n)]

    def term(i, j, k):
        sign = 1
        if j > k:
            j, k, sign = k, j, -1
        g = grad.get((j, k))
        if g is None:
            return zero
        acc = zero
        for l in range(n):
            a = num[l][i]
            if not a.is_zero() and not g[l].is_zero():
                acc = acc + a * g[l]
        return acc if sign > 0 else -acc

    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if not (term(i, j, k) + term(j, k, i) + term(k, i, j)).is_zero():
                    return False
    return True


def hamiltonian_field(pi, f) -> Multivector:
    return sharp(_bivector(pi), differential(f))


def is_casimir(pi, f) -> bool:
    return hamiltonian_field(pi, f).is_zero()


def is_poisson_field(pi, x: Multivector) -> bool:
    return schouten_bracket(x, _bivector(pi)).is_zero()


def _solve_insertion(target: DifferentialForm, volume: DifferentialForm, indices):
    """The vector field Z on the given positions with -i_Z volume = target."""
    (vol_idx, g), = volume.components.items()
    ginv = g.inverse()
    comps = {}
    for k in indices:
        r = _insert_basis((k,), vol_idx)
        if r is None:
            continue
        sign, rest = r
        c = target.components.get(rest)
        if c is None:
            continue
        v = c * ginv
        comps[(k,)] = v if sign < 0 else -v
    z = Multivector._raw(volume.chart, comps, volume.connection)
    residual = interior_product(z, volume) + target
    if not residual.is_zero():
        raise AssertionError(f"no solution of -i_Z vol = target: residual {residual}")
    return z


def modular_field(pi, omega) -> Multivector:
    """Z with -i_Z Omega = d i_Pi Omega."""
    if isinstance(omega, DifferentialForm):
        omega = VolumeForm.from_form(omega)
    if not isinstance(omega, VolumeForm):
        raise DegenerateVolume("modular_field needs a volume form")
    form = omega.form
    target = exterior_derivative(interior_product(_bivector(pi), form))
    return _solve_insertion(target, form, range(form.chart.dim))


def modular_transition_check(pi, omega: VolumeForm, f) -> bool:
    """Z^{f Omega} = Z^Omega - Pi# (df/f)."""
    if f.is_zero():
        raise DegenerateVolume("rescaling factor is identically zero")
    scaled = VolumeForm(omega.chart, omega.density * f)
    lhs = modular_field(pi, scaled)
    rhs = modular_field(pi, omega) - sharp(_bivector(pi), dlog(f))
    return lhs == rhs


def foliated_modular_field(pf: PoissonFoliationData, tau: LeafVolume, gamma: ConnectionForm) -> Multivector:
    """Vertical Z with -i_Z tau_gamma = d_{0,1} i_P tau_gamma (coordinate frame)."""
    if not isinstance(pf, PoissonFoliationData):
        pf = PoissonFoliationData(pf, gamma.split)
    if tau.density.is_zero():
        raise DegenerateVolume("leafwise volume density is identically zero")
    form = tau.form(gamma)
    # P is vertical, so its coordinate components are its adapted components
    p_ad = pf.bivector.with_connection(gamma)
    target = d01(interior_product(p_ad, form), gamma)
    z = _solve_insertion(target, form, gamma.split.vertical_indices())
    return z.with_connection(None)


def mods_reeb_identity_check(pf: PoissonFoliationData, tau: LeafVolume, varsigma: TransversalVolume, gamma) -> bool:
    """Z_P^Omega = Z_P^tau - P# lambda for Omega = varsigma ^ tau_gamma."""
    omega = total_volume(varsigma, tau)
    lhs = modular_field(pf, omega)
    lam = to_coordinate(reeb_form(varsigma, gamma))
    rhs = foliated_modular_field(pf, tau, gamma) - sharp(pf.bivector, lam)
    return lhs == rhs


def _horizontal_components(beta, gamma, k=None):
    b = to_adapted(beta, gamma)
    degs = bidegree_of(b)
    if any(v != 0 for _, v in degs) or (k is not None and any(h != k for h, _ in degs)):
        raise WrongBidegree(f"expected a pure ({k if k is not None else 'k'},0) form, got {degs}")
    return b


def casimir_complex_member(beta, pf: PoissonFoliationData, gamma: ConnectionForm) -> bool:
    """Every frame contraction beta(h_i1, ..., h_ik) is a Casimir of P."""
    b = _horizontal_components(beta, gamma)
    return all(is_casimir(pf, c) for c in b.components.values())


def casimir_cocycle_check(theta, pf: PoissonFoliationData, gamma: ConnectionForm) -> bool:
    """theta is a Casimir-valued (1,0)-form with d_{1,0} theta = 0."""
    b = _horizontal_components(theta, gamma, 1)
    if not all(is_casimir(pf, c) for c in b.components.values()):
        return False
    return d10(b, gamma).is_zero()


def restrict_to_leaf(t, split: AdaptedSplit, base_point):
    """Restrict a vertical tensor to the leaf x = base_point, on the leaf chart."""
    from modcalc.exterior import parse_tensor, format_tensor

    if len(base_point) != split.p:
        raise ValueError("base point needs one value per horizontal coordinate")
    values = dict(zip(split.horizontal, base_point))
    leaf = Chart(split.vertical)
    fixed = t.subs(values)
    if any(k < split.p for idx in fixed.components for k in idx):
        raise NotLeafTangent("tensor is not tangent to the leaves")
    kind = "multivector" if isinstance(t, Multivector) else "form"
    return parse_tensor(format_tensor(fixed), leaf, kind)


def restrict_scalar_to_leaf(f, split: AdaptedSplit, base_point):
    leaf = Chart(split.vertical)
    return leaf.parse(str(f.subs(dict(zip(split.horizontal, base_point)))))
