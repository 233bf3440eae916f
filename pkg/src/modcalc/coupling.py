"""Coupling Poisson structures and their geometric data (gamma, sigma, P).

For a split ``(x | y)`` write the bivector in blocks: ``A[i][k] = Pi^{x_i x_k}``
and ``B[i][a] = Pi^{x_i y_a}``.  The structure is coupling when ``det A`` is
not identically zero.  Then ``Gamma = -A^{-1} B``, the horizontal part is
``sum_{i<k} A[i][k] h_i ^ h_k`` and the coupling form has matrix
``S = -A^{-1}``, i.e. ``sigma = sum_{i<j} S[i][j] dx^i ^ dx^j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from modcalc import linalg
from modcalc.errors import (
    DegenerateCouplingForm,
    GaugeNotInvertible,
    GaugeSingularAtSample,
    LeafConditionViolated,
    NotCasimirValued,
    NotClosedCertificate,
    NotCoupling,
    PoleAtPoint,
    SingularMatrix,
    WrongBidegree,
)
from modcalc.exterior import (
    DifferentialForm,
    Multivector,
    VolumeForm,
    differential,
    exterior_derivative,
    interior_product,
    schouten_bracket,
    sharp,
    wedge,
    wedge_power,
)
from modcalc.foliated import (
    AdaptedSplit,
    ConnectionForm,
    LeafVolume,
    TransversalVolume,
    bigrade,
    curvature,
    d10,
    divergence_form,
    reeb_form,
    to_adapted,
    to_coordinate,
)
from modcalc.poisson import (
    PoissonBivector,
    PoissonFoliationData,
    _bivector,
    casimir_complex_member,
    foliated_modular_field,
    is_casimir,
    jacobi_check,
    modular_field,
)

__all__ = [
    "GeometricData",
    "CouplingReport",
    "ModularDecomposition",
    "UnimodularityCertificate",
    "FlatCouplingResult",
    "horizontal_block",
    "is_coupling",
    "coupling_status",
    "decompose",
    "reconstruct",
    "structure_equations_check",
    "coupling_volume",
    "modular_decomposition_check",
    "gauge_transform",
    "gauge_relations",
    "gauge_relations_check",
    "sigma_power_identity",
    "curvature_contraction",
    "curvature_identity",
    "unimodularity_certificate",
    "hamiltonian_certificate",
    "flat_coupling_build",
    "strong_compatibility_check",
]


def _matrix_form(chart, s, p, connection=None):
    comps = {}
    for i in range(p):
        for j in range(i + 1, p):
            if not s[i][j].is_zero():
                comps[(i, j)] = s[i][j]
    return DifferentialForm._raw(chart, comps, connection)


def _form_matrix(sigma, p):
    chart = sigma.chart
    m = linalg.zeros(chart, p, p)
    for idx, c in sigma.components.items():
        if len(idx) != 2 or idx[1] >= p:
            raise WrongBidegree(f"coupling form must be a (2,0) form, found component {idx}")
        i, j = idx
        m[i][j] = c
        m[j][i] = -c
    return m


def _bivector_matrix(pi, n):
    m = linalg.zeros(pi.chart, n, n)
    for (i, j), c in pi.components.items():
        m[i][j] = c
        m[j][i] = -c
    return m


def _matrix_bivector(chart, m, connection=None):
    n = len(m)
    comps = {}
    for i in range(n):
        for j in range(i + 1, n):
            if not m[i][j].is_zero():
                comps[(i, j)] = m[i][j]
    return Multivector._raw(chart, comps, connection)


def _samples_nonzero(f, samples):
    bad = []
    for pt in samples:
        try:
            if f.evaluate(pt) == 0:
                bad.append(tuple(pt))
        except PoleAtPoint:
            bad.append(tuple(pt))
    return bad


# ------------------------------------------------------------ geometric data
class GeometricData:
    """(gamma, sigma, P) with sigma nondegenerate on the horizontal frame."""

    __slots__ = ("gamma", "sigma", "P", "samples", "_smat")

    def __init__(self, gamma: ConnectionForm, sigma: DifferentialForm, P, samples=()):
        split = gamma.split
        if split.p % 2:
            raise DegenerateCouplingForm(f"horizontal dimension {split.p} is odd")
        if not isinstance(P, PoissonFoliationData):
            P = PoissonFoliationData(P, split)
        sigma = to_coordinate(sigma) if sigma.connection is not None else sigma
        smat = _form_matrix(sigma, split.p)
        if split.p:
            det = linalg.determinant(smat)
            if det.is_zero():
                raise DegenerateCouplingForm("coupling form is degenerate (determinant identically zero)")
            bad = _samples_nonzero(det, samples)
            if bad:
                raise DegenerateCouplingForm(f"coupling form degenerates at samples {bad}")
        self.gamma = gamma
        self.sigma = sigma
        self.P = P
        self.samples = tuple(samples)
        self._smat = smat

    @property
    def split(self) -> AdaptedSplit:
        return self.gamma.split

    @property
    def chart(self):
        return self.gamma.chart

    @property
    def l(self) -> int:
        return self.split.p // 2

    def sigma_matrix(self):
        return [list(r) for r in self._smat]

    def horizontal_matrix(self):
        """A = -S^{-1}: the coefficients of Pi_H on the frame h_i ^ h_k."""
        if not self.split.p:
            return []
        return linalg.neg(linalg.inverse(self._smat))

    def horizontal_bivector(self, adapted: bool = False) -> Multivector:
        """Pi_H = sum_{i<k} A[i][k] h_i ^ h_k."""
        m = self.horizontal_matrix()
        ad = _matrix_bivector(self.chart, m, self.gamma)
        return ad if adapted else to_coordinate(ad)

    def __eq__(self, other):
        return (
            isinstance(other, GeometricData)
            and self.gamma == other.gamma
            and self.sigma == other.sigma
            and self.P.bivector == other.P.bivector
        )

    def __repr__(self):
        return f"GeometricData(gamma={self.gamma!r}, sigma={self.sigma}, P={self.P.bivector})"


@dataclass
class CouplingReport:
    se0_ok: bool
    se1_ok: bool
    se2_ok: bool
    jacobi_ok: bool
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.se0_ok and self.se1_ok and self.se2_ok and self.jacobi_ok


@dataclass
class ModularDecomposition:
    Z: Multivector
    Z10: Multivector
    Z01: Multivector
    expected10: Multivector
    expected01: Multivector
    sigma_power_ok: bool
    curvature_identity_ok: bool

    @property
    def components_ok(self) -> bool:
        return self.Z10 == self.expected10 and self.Z01 == self.expected01

    @property
    def ok(self) -> bool:
        return self.components_ok and self.sigma_power_ok and self.curvature_identity_ok


@dataclass
class UnimodularityCertificate:
    zp_zero: bool
    theta_closed_zero: bool
    foliated_modular: Multivector
    theta: DifferentialForm

    @property
    def verdict(self) -> str:
        return "unimodular-certified" if self.zp_zero and self.theta_closed_zero else "inconclusive"


@dataclass
class FlatCouplingResult:
    data: GeometricData
    report: CouplingReport
    bivector: Multivector
    leaf_checks: dict = field(default_factory=dict)


# ------------------------------------------------------------------ coupling
def horizontal_block(pi, split: AdaptedSplit):
    pi = _bivector(pi)
    p = split.p
    return [[pi[(i, k)] for k in range(p)] for i in range(p)]


def coupling_status(pi, split: AdaptedSplit, samples=()):
    """(generic, failing_samples): generic means det of the horizontal block is nonzero."""
    if split.p == 0:
        return True, []
    det = linalg.determinant(horizontal_block(pi, split))
    if det.is_zero():
        return False, list(samples)
    return True, _samples_nonzero(det, samples)


def is_coupling(pi, split: AdaptedSplit, samples=()) -> bool:
    generic, bad = coupling_status(pi, split, samples)
    return generic and not bad


def decompose(pi, split: AdaptedSplit, samples=()) -> GeometricData:
    pi = _bivector(pi)
    p, q = split.p, split.q
    if pi.connection is not None:
        pi = to_coordinate(pi)
    if p == 0:
        return GeometricData(ConnectionForm(split), DifferentialForm.zero(split.chart), pi, samples)
    a = horizontal_block(pi, split)
    try:
        ainv = linalg.inverse(a)
    except SingularMatrix:
        raise NotCoupling("horizontal block of the bivector is singular") from None
    b = [[pi[(i, p + c)] for c in range(q)] for i in range(p)]
    gam = linalg.neg(linalg.matmul(ainv, b))
    gamma = ConnectionForm(split, gam)
    parts = bigrade(pi, gamma)
    if not parts[(1, 1)].is_zero():
        raise AssertionError(f"induced connection leaves a (1,1) part {parts[(1, 1)]}")
    P = to_coordinate(parts[(0, 2)])
    sigma = _matrix_form(split.chart, linalg.neg(ainv), p)
    return GeometricData(gamma, sigma, PoissonBivector(P, check=False), samples)


def reconstruct(gd: GeometricData) -> Multivector:
    total = gd.P.bivector
    if gd.split.p:
        total = total + gd.horizontal_bivector()
    return total


def structure_equations_check(gd: GeometricData) -> CouplingReport:
    gamma = gd.gamma
    P = gd.P.bivector
    details = {}
    se0 = True
    for i in range(gd.split.p):
        r = schouten_bracket(gamma.h(i), P)
        if not r.is_zero():
            se0 = False
            details[f"SE0[h_{i + 1}]"] = r
    se1 = True
    smat = gd._smat
    for (i, j), r in curvature(gamma).items():
        resid = r + sharp(P, differential(smat[i][j]))
        if not resid.is_zero():
            se1 = False
            details[f"SE1[{i + 1},{j + 1}]"] = resid
    se2_res = d10(gd.sigma, gamma)
    se2 = se2_res.is_zero()
    if not se2:
        details["SE2"] = se2_res
    jac = schouten_bracket(P, P)
    if not jac.is_zero():
        details["jacobi(P)"] = jac
    return CouplingReport(se0, se1, se2, jac.is_zero(), details)


def coupling_volume(gd: GeometricData, tau: LeafVolume) -> VolumeForm:
    """Omega = sigma^l ^ tau_gamma in the coordinate frame."""
    gamma = gd.gamma
    sig = to_adapted(gd.sigma, gamma)
    form = wedge(wedge_power(sig, gd.l), tau.form(gamma))
    return VolumeForm.from_form(to_coordinate(form), tau.samples)


def sigma_power_identity(gd: GeometricData) -> bool:
    """i_{Pi_H} sigma^l = -l sigma^{l-1}."""
    l = gd.l
    if l == 0:
        return True
    sig = to_adapted(gd.sigma, gd.gamma)
    lhs = interior_product(gd.horizontal_bivector(adapted=True), wedge_power(sig, l))
    return lhs == wedge_power(sig, l - 1) * (-l)


def curvature_contraction(gd: GeometricData) -> Multivector:
    """i_{Pi_H} R = -sum_{i<j} A[i][j] R(h_i, h_j), a vertical field."""
    a = gd.horizontal_matrix()
    out = Multivector.zero(gd.chart)
    for (i, j), r in curvature(gd.gamma).items():
        if not a[i][j].is_zero():
            out = out - r * a[i][j]
    return out


def curvature_identity(gd: GeometricData) -> bool:
    """i_{Pi_H} R = P# Lambda with d_{0,1} sigma^l = Lambda ^ sigma^l."""
    if gd.l == 0:
        return True
    sig_l = wedge_power(to_adapted(gd.sigma, gd.gamma), gd.l)
    (idx, dens), = sig_l.components.items()
    lam = to_coordinate(reeb_form(TransversalVolume(gd.split, dens), gd.gamma))
    return curvature_contraction(gd) == sharp(gd.P.bivector, lam)


def modular_decomposition_check(gd: GeometricData, tau: LeafVolume) -> ModularDecomposition:
    gamma = gd.gamma
    pi = reconstruct(gd)
    z = modular_field(pi, coupling_volume(gd, tau))
    parts = bigrade(z, gamma)
    z10 = to_coordinate(parts[(1, 0)])
    z01 = to_coordinate(parts[(0, 1)])
    theta = divergence_form(tau, gamma)
    expected10 = -sharp(pi, theta) if not theta.is_zero() else Multivector.zero(gd.chart)
    expected01 = foliated_modular_field(gd.P, tau, gamma)
    return ModularDecomposition(
        z, z10, z01, expected10, expected01, sigma_power_identity(gd), curvature_identity(gd)
    )


# --------------------------------------------------------------------- gauge
def _check_base_form(mu, split):
    if mu.connection is not None:
        mu = to_coordinate(mu)
    for idx in mu.components:
        if len(idx) != 1 or idx[0] >= split.p:
            raise WrongBidegree(f"gauge primitive must be a combination of dx's, found {idx}")
    return mu


def gauge_transform(pi, mu: DifferentialForm, samples=(), split: AdaptedSplit | None = None) -> Multivector:
    """Pi~# = Pi# o (Id - B-flat o Pi#)^{-1} with B = -d mu.

    With row covectors, Pi# is alpha -> alpha Pi and B-flat is X -> X B, so
    the gauge-transformed matrix is (I - Pi B)^{-1} Pi.
    """
    pi = _bivector(pi)
    if split is not None:
        mu = _check_base_form(mu, split)
    chart = pi.chart
    n = chart.dim
    bform = -exterior_derivative(mu)
    pm = _bivector_matrix(pi, n)
    bm = _bivector_matrix(bform, n)
    m = linalg.sub(linalg.identity(chart, n), linalg.matmul(pm, bm))
    det = linalg.determinant(m)
    if det.is_zero():
        raise GaugeNotInvertible("Id - B-flat o Pi# is not invertible")
    bad = _samples_nonzero(det, samples)
    if bad:
        raise GaugeSingularAtSample(f"gauge map is singular at samples {bad}")
    new = linalg.matmul(linalg.inverse(m), pm)
    for i in range(n):
        for j in range(i, n):
            if not (new[i][j] + new[j][i]).is_zero():
                raise AssertionError("gauge transform produced a non-skew matrix")
    return _matrix_bivector(chart, new)


def gauge_relations(pi, mu, tau: LeafVolume, split: AdaptedSplit, samples=()):
    """Residuals of the connection and divergence-form transition rules (empty when they hold)."""
    mu = _check_base_form(mu, split)
    new = gauge_transform(pi, mu, samples, split)
    gd = decompose(pi, split)
    gd_new = decompose(new, split)
    P = gd.P.bivector
    residuals = {}
    if gd_new.P.bivector != P:
        residuals["P"] = gd_new.P.bivector - P
    q = split.q
    p = split.p
    theta = divergence_form(tau, gd.gamma)
    theta_new = divergence_form(tau, gd_new.gamma)
    zp = foliated_modular_field(gd.P, tau, gd.gamma)
    from modcalc.exterior import apply_vector

    for i in range(p):
        mu_i = mu[(i,)]
        diff = Multivector(split.chart, {(p + a,): gd.gamma.gamma[i][a] - gd_new.gamma.gamma[i][a] for a in range(q)})
        r = diff - sharp(P, differential(mu_i))
        if not r.is_zero():
            residuals[f"connection[{split.horizontal[i]}]"] = r
        t = theta_new[(i,)] - theta[(i,)] - apply_vector(zp, mu_i)
        if not t.is_zero():
            residuals[f"theta[{split.horizontal[i]}]"] = t
    return new, residuals


def gauge_relations_check(pi, mu, tau: LeafVolume, split: AdaptedSplit, samples=()) -> bool:
    return not gauge_relations(pi, mu, tau, split, samples)[1]


# ------------------------------------------------------------- certificates
def unimodularity_certificate(gd: GeometricData, tau: LeafVolume) -> UnimodularityCertificate:
    zp = foliated_modular_field(gd.P, tau, gd.gamma)
    theta = divergence_form(tau, gd.gamma)
    closed = d10(tau.form(gd.gamma), gd.gamma).is_zero()
    return UnimodularityCertificate(zp.is_zero(), closed, zp, theta)


def hamiltonian_certificate(pi, omega, cert) -> bool:
    """Z^Omega = Pi# d(cert), or Pi# cert for a closed rational 1-form."""
    pi = _bivector(pi)
    if isinstance(cert, DifferentialForm):
        if not cert.is_homogeneous(1) and not cert.is_zero():
            raise NotClosedCertificate("certificate form must be a 1-form")
        if not exterior_derivative(cert).is_zero():
            raise NotClosedCertificate(f"certificate {cert} is not closed")
        alpha = cert
    else:
        alpha = differential(cert)
    return modular_field(pi, omega) == sharp(pi, alpha)


def strong_compatibility_check(gamma: ConnectionForm, gamma0: ConnectionForm, P, mu) -> bool:
    """gamma0(d/dx^i) - gamma(d/dx^i) = P# d mu_i for every i."""
    split = gamma.split
    mu = _check_base_form(mu, split)
    P = _bivector(P)
    p, q = split.p, split.q
    for i in range(p):
        diff = Multivector(split.chart, {(p + a,): gamma0.gamma[i][a] - gamma.gamma[i][a] for a in range(q)})
        if diff != sharp(P, differential(mu[(i,)])):
            return False
    return True


def flat_coupling_build(split: AdaptedSplit, sigma0, P, leaf=None, samples=()) -> FlatCouplingResult:
    """Geometric data (flat gamma, sigma0, P) and its reconstructed bivector.

    ``leaf`` is an optional dict with ``omega`` (base 2-form) and ``samples``
    (points of the leaf y = 0) for the transverse checks near the leaf.
    """
    gamma = ConnectionForm(split)
    if not isinstance(P, PoissonFoliationData):
        P = PoissonFoliationData(P, split)
    sigma0 = to_coordinate(sigma0) if sigma0.connection is not None else sigma0
    for idx, c in sigma0.components.items():
        if not is_casimir(P, c):
            raise NotCasimirValued(f"coefficient {c} of dx{idx} is not a Casimir of P")
    if not d10(sigma0, gamma).is_zero():
        raise DegenerateCouplingForm(f"sigma0 is not d_{{1,0}}-closed: {d10(sigma0, gamma)}")
    if not casimir_complex_member(sigma0, P, gamma):
        raise NotCasimirValued("sigma0 is not Casimir-valued")
    gd = GeometricData(gamma, sigma0, P, samples)
    report = structure_equations_check(gd)
    pi = reconstruct(gd)
    report.jacobi_ok = report.jacobi_ok and jacobi_check(pi)
    checks = {}
    if leaf is not None:
        checks = _leaf_checks(gd, pi, leaf)
    return FlatCouplingResult(gd, report, pi, checks)


def _leaf_checks(gd, pi, leaf):
    split = gd.split
    pts = [tuple(Fraction(v) for v in pt) for pt in leaf.get("samples", ())]
    omega = leaf.get("omega")
    for pt in pts:
        if any(v != 0 for v in pt[split.p :]):
            raise LeafConditionViolated(f"leaf sample {pt} is not on y = 0")
        for idx, c in gd.P.bivector.components.items():
            if c.evaluate(pt) != 0:
                raise LeafConditionViolated(f"P{idx} = {c} does not vanish at {pt}")
        if omega is not None:
            for idx, c in (gd.sigma - omega).components.items():
                if c.evaluate(pt) != 0:
                    raise LeafConditionViolated(f"sigma - omega does not vanish at {pt}")
        generic, bad = coupling_status(pi, split, [pt])
        if not generic or bad:
            raise LeafConditionViolated(f"horizontal subbundle is not complementary at {pt}")
    checks = {"P_vanishes": True, "rank": True, "samples": len(pts)}
    if omega is not None:
        checks["sigma_minus_omega_vanishes"] = True
    return checks
