"""Random instance generators and named randomized property suites.

Each suite is a function ``(rng) -> list of (label, ok, detail)`` evaluated on
one random instance; :func:`run_suite` repeats it ``cases`` times from a
seeded :class:`random.Random`, so results are reproducible.  ``ok`` is None
for a draw the suite could not use (a singular gauge map, say); those are
counted as skipped rather than passed.  The oracles
here avoid the code paths they check where practical (e.g. the modular
field is compared with a coordinate divergence formula).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations

from modcalc import linalg
from modcalc.coupling import (
    GeometricData,
    curvature_identity,
    decompose,
    flat_coupling_build,
    gauge_relations,
    gauge_transform,
    is_coupling,
    modular_decomposition_check,
    reconstruct,
    sigma_power_identity,
    structure_equations_check,
    coupling_volume,
)
from modcalc.errors import GaugeNotInvertible, DegenerateCouplingForm, NotCoupling
from modcalc.exterior import (
    DifferentialForm,
    Multivector,
    VolumeForm,
    apply_vector,
    contract,
    differential,
    dlog,
    exterior_derivative,
    interior_product,
    schouten_bracket,
    sharp,
    wedge,
)
from modcalc.foliated import (
    AdaptedSplit,
    ConnectionForm,
    LeafVolume,
    TransversalVolume,
    bigrade,
    curvature,
    curvature_insertion,
    curvature_lie_derivative,
    d_components,
    d01,
    d10,
    divergence_form,
    leafwise_divergence,
    to_adapted,
    to_coordinate,
)
from modcalc.poisson import (
    PoissonFoliationData,
    foliated_modular_field,
    jacobi_check,
    modular_field,
    modular_transition_check,
    mods_reeb_identity_check,
)
from modcalc.ratfun import Chart

__all__ = [
    "SuiteResult",
    "SUITES",
    "run_suite",
    "random_polynomial",
    "random_function",
    "random_positive",
    "random_form",
    "random_multivector",
    "random_poisson",
    "random_connection",
    "random_coupling_data",
    "coordinate_modular_field",
    "flat_so3_example",
]


# ------------------------------------------------------------------ scalars
def random_polynomial(rng, chart: Chart, degree=2, terms=3, variables=None, coeff=3):
    """Sum of ``terms`` random monomials of degree <= ``degree``."""
    variables = list(range(chart.dim)) if variables is None else list(variables)
    total = chart.zero()
    for _ in range(terms):
        c = rng.randint(-coeff, coeff)
        if c == 0:
            continue
        mono = chart.const(c)
        if variables:
            for _ in range(rng.randint(0, degree)):
                mono = mono * chart.coord(rng.choice(variables))
        total = total + mono
    return total


def random_positive(rng, chart: Chart, degree=1, variables=None):
    """c + r^2 with c > 0: positive at every real point."""
    r = random_polynomial(rng, chart, degree, 2, variables)
    return chart.const(rng.randint(1, 3)) + r * r


def random_function(rng, chart: Chart, degree=2, variables=None, rational=0.3):
    """A polynomial, sometimes divided by a positive polynomial."""
    f = random_polynomial(rng, chart, degree, 3, variables)
    if rng.random() < rational:
        f = f / random_positive(rng, chart, 1, variables)
    return f


def _random_indices(rng, n, k, count):
    pool = list(combinations(range(n), k))
    return rng.sample(pool, min(count, len(pool)))


def random_form(rng, chart: Chart, degree=None, max_degree=3, comps=3, poly_degree=2, rational=0.3):
    k = rng.randint(0, min(max_degree, chart.dim)) if degree is None else degree
    return DifferentialForm(
        chart,
        {idx: random_function(rng, chart, poly_degree, rational=rational) for idx in _random_indices(rng, chart.dim, k, comps)},
    )


def random_multivector(rng, chart: Chart, grade=None, max_grade=3, comps=3, poly_degree=2, rational=0.3):
    k = rng.randint(0, min(max_grade, chart.dim)) if grade is None else grade
    return Multivector(
        chart,
        {idx: random_function(rng, chart, poly_degree, rational=rational) for idx in _random_indices(rng, chart.dim, k, comps)},
    )


def random_vector_field(rng, chart, poly_degree=2, rational=0.2):
    return random_multivector(rng, chart, 1, comps=chart.dim, poly_degree=poly_degree, rational=rational)


def random_decomposable(rng, chart, grade, poly_degree=1):
    out = Multivector.scalar(chart.one())
    for _ in range(grade):
        out = wedge(out, random_vector_field(rng, chart, poly_degree, rational=0))
    return out


# ----------------------------------------------------------------- Poisson
def _so3(chart, idx):
    a, b, c = idx
    return Multivector(chart, {(a, b): chart.coord(c), (b, c): chart.coord(a), (c, a): chart.coord(b)})


def random_poisson(rng, chart: Chart, indices=None, params=(), degree=1):
    """A Poisson bivector supported on ``indices``.

    Coefficients may also depend on the ``params`` coordinates, which the
    bivector has no component along (they act as Casimirs).  Families:
    constant, f * so(3) on three coordinates, f * d_i ^ d_j, and direct sums
    of these on disjoint blocks.
    """
    indices = list(range(chart.dim)) if indices is None else list(indices)
    params = list(params)
    blocks = []
    pool = list(indices)
    rng.shuffle(pool)
    while pool:
        size = rng.choice([s for s in (1, 2, 3) if s <= len(pool)])
        blocks.append(pool[:size])
        pool = pool[size:]
        if rng.random() < 0.4:
            break
    total = Multivector.zero(chart)
    for block in blocks:
        block = sorted(block)
        own = block + params
        if len(block) == 1:
            continue
        kind = rng.choice(["constant", "scaled"] + (["so3", "so3"] if len(block) == 3 else []))
        if kind == "constant":
            comps = {pair: chart.const(rng.randint(-2, 2)) for pair in combinations(block, 2)}
            total = total + Multivector(chart, comps)
        elif kind == "so3":
            f = random_positive(rng, chart, degree, own) if rng.random() < 0.5 else chart.const(rng.randint(1, 2))
            total = total + _so3(chart, block) * f
        else:
            i, j = rng.sample(block, 2)
            f = random_function(rng, chart, degree, own, rational=0.2)
            total = total + Multivector(chart, {(i, j): f})
    if not jacobi_check(total):
        raise AssertionError(f"generator produced a non-Poisson bivector {total}")
    return total


def random_connection(rng, split: AdaptedSplit, degree=2, density=0.6):
    chart = split.chart
    gam = [
        [random_polynomial(rng, chart, degree, 2) if rng.random() < density else chart.zero() for _ in range(split.q)]
        for _ in range(split.p)
    ]
    return ConnectionForm(split, gam)


def random_split(rng, max_p=3, max_q=3, min_p=0):
    p = rng.randint(min_p, max_p)
    q = rng.randint(1, max_q)
    return AdaptedSplit([f"x{i + 1}" for i in range(p)], [f"y{a + 1}" for a in range(q)])


def _vertical_poisson(rng, split, x_dependent=True, degree=1):
    params = list(split.horizontal_indices()) if x_dependent else []
    return random_poisson(rng, split.chart, split.vertical_indices(), params, degree)


# ------------------------------------------------------------ coupling data
def flat_so3_example():
    """(x1, x2 | y1, y2, y3): Pi = d_x1 ^ d_x2 + fiberwise so(3)."""
    split = AdaptedSplit(["x1", "x2"], ["y1", "y2", "y3"])
    c = split.chart
    P = _so3(c, (2, 3, 4))
    sigma = DifferentialForm(c, {(0, 1): 1})
    return split, sigma, P


def _casimir_generators(split, P):
    """Known Casimir functions of the vertical Poisson bivectors built below."""
    chart = split.chart
    gens = []
    if P.is_zero():
        return [chart.coord(k) for k in split.vertical_indices()]
    comps = P.components
    verts = list(split.vertical_indices())
    touched = sorted({k for idx in comps for k in idx})
    gens.extend(chart.coord(k) for k in verts if k not in touched)
    if len(touched) == 3 and len(comps) == 3:
        gens.append(sum((chart.coord(k) ** 2 for k in touched), chart.zero()))
    return gens


def _flat_vertical_poisson(rng, split):
    """x-independent vertical Poisson bivector with known Casimirs."""
    c = split.chart
    v = list(split.vertical_indices())
    if len(v) == 3:
        choice = rng.choice(["zero", "area", "so3", "so3", "decomposable", "decomposable"])
    elif len(v) == 2:
        choice = rng.choice(["zero", "area", "area", "area"])
    else:
        choice = "zero"
    if choice == "zero":
        return Multivector.zero(c)
    if choice == "area":
        i, j = sorted(rng.sample(v, 2))
        return Multivector(c, {(i, j): c.const(rng.choice([1, 2, -1]))})
    if choice == "so3":
        f = c.const(rng.randint(1, 2)) if rng.random() < 0.5 else random_positive(rng, c, 1, v)
        # scaling by a Casimir-free f keeps Jacobi but changes nothing in the Casimirs
        return _so3(c, tuple(v)) * f
    i, j = rng.sample(v, 2)
    return Multivector(c, {tuple(sorted((i, j))): c.const(1) + c.coord([k for k in v if k not in (i, j)][0]) ** 2})


def random_flat_coupling(rng, p=None, q=None, degree=2):
    """Flat coupling data: Gamma = 0, sigma = standard + d_x(alpha), P x-independent."""
    p = rng.choice([2, 4]) if p is None else p
    q = rng.choice([1, 2, 2, 3, 3, 3]) if q is None else q
    split = AdaptedSplit([f"x{i + 1}" for i in range(p)], [f"y{a + 1}" for a in range(q)])
    c = split.chart
    P = _flat_vertical_poisson(rng, split)
    gens = _casimir_generators(split, P)
    gamma = ConnectionForm(split)
    for _ in range(20):
        sigma = DifferentialForm(c, {(2 * k, 2 * k + 1): rng.choice([1, 2, -1]) for k in range(p // 2)})
        alpha = {}
        for i in range(p):
            coeff = random_polynomial(rng, c, degree, 2, split.horizontal_indices())
            if gens and rng.random() < 0.7:
                coeff = coeff + c.const(rng.randint(-1, 1)) * rng.choice(gens) * c.coord(rng.randrange(p))
            alpha[(i,)] = coeff
        sigma = sigma + d10(DifferentialForm(c, alpha), gamma).with_connection(None)
        try:
            gd = GeometricData(gamma, sigma, P)
        except DegenerateCouplingForm:
            continue
        return gd
    raise AssertionError("could not draw a nondegenerate coupling form")


def random_gauge_primitive(rng, split, degree=2, terms=2):
    """mu = sum mu_i dx^i; each mu_i gets one mixed x*y monomial so the gauge bends the connection."""
    c = split.chart
    comps = {}
    for i in split.horizontal_indices():
        f = random_polynomial(rng, c, degree, terms)
        if degree >= 2 and split.p:
            mixed = c.coord(rng.randrange(split.p)) * c.coord(rng.choice(split.vertical_indices()))
            f = f + mixed * rng.choice([1, -1, 2])
        comps[(i,)] = f
    return DifferentialForm(c, comps)


def random_coupling_data(rng, curved=None, degree=2):
    """Valid geometric data; curved instances are gauge transforms of flat ones."""
    gd = random_flat_coupling(rng, degree=degree)
    if curved is None:
        curved = rng.random() < 0.7
    if not curved:
        return gd
    pi = reconstruct(gd)
    # Inverting Id - Pi B in seven or more variables with quadratic mu can
    # take tens of seconds; linear primitives keep every draw under a second.
    mu_degree = degree if gd.split.chart.dim < 7 else min(degree, 1)
    for _ in range(10):
        mu = random_gauge_primitive(rng, gd.split, mu_degree)
        try:
            new = gauge_transform(pi, mu, split=gd.split)
            return decompose(new, gd.split)
        except (GaugeNotInvertible, NotCoupling, DegenerateCouplingForm):
            continue
    return gd


# ------------------------------------------------------------------ oracles
def coordinate_modular_field(pi: Multivector, density) -> Multivector:
    """Z^i = (1/g) sum_j d_j(g Pi^{ij}) for Omega = g dx^1 ^ ... ^ dx^n."""
    chart = pi.chart
    n = chart.dim
    comps = {}
    for i in range(n):
        acc = chart.zero()
        for j in range(n):
            if i == j:
                continue
            acc = acc + (density * pi[(i, j)]).diff(j)
        comps[(i,)] = acc / density
    return Multivector(chart, comps)


def _lie_bracket_oracle(x, y, f):
    return apply_vector(x, apply_vector(y, f)) - apply_vector(y, apply_vector(x, f))


# ------------------------------------------------------------------- suites
def _chart(rng, low=2, high=5):
    n = rng.randint(low, high)
    return Chart([f"u{i + 1}" for i in range(n)])


def suite_d_squared(rng):
    chart = _chart(rng)
    beta = random_form(rng, chart, max_degree=3)
    return [("d(d beta) = 0", exterior_derivative(exterior_derivative(beta)).is_zero(), beta)]


def _foliated_instance(rng, max_p=3, max_q=3, min_p=1):
    split = random_split(rng, max_p, max_q, min_p)
    return split, random_connection(rng, split)


def suite_d01_squared(rng):
    split, gamma = _foliated_instance(rng)
    beta = random_form(rng, split.chart, max_degree=3, rational=0.15)
    return [("d01(d01 beta) = 0", d01(d01(beta, gamma), gamma).is_zero(), beta)]


def suite_d_completeness(rng):
    split, gamma = _foliated_instance(rng)
    beta = random_form(rng, split.chart, max_degree=3, rational=0.15)
    a, b, r = d_components(beta, gamma)
    out = [("d10 + d01 + d2-1 = d", to_coordinate(a + b + r) == exterior_derivative(beta), beta)]
    out.append(("d2-1 = -i_R", r == -curvature_insertion(beta, gamma), beta))
    out.append(("d10 d10 = L_R", d10(a, gamma) == curvature_lie_derivative(beta, gamma), beta))
    return out


def suite_bigrade_roundtrip(rng):
    split, gamma = _foliated_instance(rng, min_p=0)
    chart = split.chart
    t = random_form(rng, chart) if rng.random() < 0.5 else random_multivector(rng, chart)
    return [("reassemble(bigrade(T)) = T", bigrade(t, gamma).reassemble() == t, t)]


def suite_schouten(rng):
    chart = _chart(rng, 2, 4)
    ga, gb, gc = (rng.randint(0, 3) for _ in range(3))
    a = random_decomposable(rng, chart, min(ga, chart.dim))
    b = random_decomposable(rng, chart, min(gb, chart.dim))
    cc = random_decomposable(rng, chart, min(gc, chart.dim))
    a = a * random_polynomial(rng, chart, 1, 2) if not a.is_zero() else a
    pa = min(ga, chart.dim)
    pb = min(gb, chart.dim)
    pc = min(gc, chart.dim)
    eps_ab = -1 if ((pa - 1) * (pb - 1)) % 2 else 1
    anti = schouten_bracket(a, b) == schouten_bracket(b, a) * (-eps_ab)
    # graded Jacobi: [A,[B,C]] = [[A,B],C] + (-1)^{(a-1)(b-1)} [B,[A,C]]
    jac = schouten_bracket(a, schouten_bracket(b, cc)) == schouten_bracket(
        schouten_bracket(a, b), cc
    ) + schouten_bracket(b, schouten_bracket(a, cc)) * eps_ab
    # graded Leibniz: [A, B^C] = [A,B]^C + (-1)^{(a-1)b} B^[A,C]
    sgn = -1 if ((pa - 1) * pb) % 2 else 1
    leib = schouten_bracket(a, wedge(b, cc)) == wedge(schouten_bracket(a, b), cc) + wedge(
        b, schouten_bracket(a, cc)
    ) * sgn
    x = random_vector_field(rng, chart, 1, 0)
    y = random_vector_field(rng, chart, 1, 0)
    f = random_polynomial(rng, chart, 2, 3)
    lie = apply_vector(schouten_bracket(x, y), f) == _lie_bracket_oracle(x, y, f)
    xf = schouten_bracket(x, Multivector.scalar(f))[()] == apply_vector(x, f)
    return [
        ("graded antisymmetry", anti, (a, b)),
        ("graded Jacobi", jac, (a, b, cc)),
        ("graded Leibniz", leib, (a, b, cc)),
        ("vector fields: Lie bracket", lie, (x, y)),
        ("[X, f] = X(f)", xf, (x, f)),
    ]


def suite_interior_formula(rng):
    chart = _chart(rng, 2, 5)
    a = random_multivector(rng, chart, rng.randint(0, 3), rational=0.1)
    alpha = random_form(rng, chart, 1, comps=chart.dim, rational=0.1)
    beta = random_form(rng, chart, rational=0.1)
    k = a.grades()[0] if a.grades() else 0
    sign = -1 if k % 2 else 1
    lhs = interior_product(a, wedge(alpha, beta))
    rhs = (wedge(alpha, interior_product(a, beta)) - interior_product(contract(alpha, a), beta)) * sign
    return [("i_A(alpha ^ beta) identity", lhs == rhs, (a, alpha, beta))]


def suite_theta2(rng):
    split, gamma = _foliated_instance(rng, 3, 3, 2)
    chart = split.chart
    tau = LeafVolume(split, random_positive(rng, chart, 1))
    theta = divergence_form(tau, gamma)
    out = []
    for i in range(split.p):
        out.append((f"theta(h_{i + 1}) = div(h_{i + 1})", theta[(i,)] == leafwise_divergence(gamma.h(i), tau, gamma), gamma))
    dth = d10(theta, gamma)
    for (i, j), r in curvature(gamma).items():
        out.append((f"d10 theta(h_{i + 1}, h_{j + 1}) = div(R)", dth[(i, j)] == leafwise_divergence(r, tau, gamma), gamma))
    return out


def suite_theta3(rng):
    split, gamma = _foliated_instance(rng, 3, 3, 1)
    chart = split.chart
    tau = LeafVolume(split, random_positive(rng, chart, 1))
    f = random_positive(rng, chart, 1)
    lhs = divergence_form(tau.scaled(f), gamma)
    rhs = divergence_form(tau, gamma) + (d10(DifferentialForm.scalar(f), gamma) * f.inverse()).with_connection(None)
    return [("theta_{f tau} = theta_tau + d10 f / f", lhs == rhs, (gamma, f))]


def _poisson_foliation(rng, split_max=(2, 3)):
    split = random_split(rng, split_max[0], split_max[1], 0)
    P = _vertical_poisson(rng, split)
    return split, PoissonFoliationData(P, split)


def suite_divham(rng):
    split, pf = _poisson_foliation(rng)
    gamma = random_connection(rng, split, 1)
    chart = split.chart
    tau = LeafVolume(split, random_positive(rng, chart, 1))
    z = foliated_modular_field(pf, tau, gamma)
    f = random_polynomial(rng, chart, 2, 3)
    lhs = apply_vector(z, f)
    rhs = leafwise_divergence(sharp(pf.bivector, differential(f)), tau, gamma)
    return [("L_Z f = div(P# df)", lhs == rhs, (pf, tau, f))]


def suite_mod_and_poiss(rng):
    split = random_split(rng, 2, 3, 0)
    chart = split.chart
    P = _vertical_poisson(rng, split, x_dependent=False)
    pf = PoissonFoliationData(P, split)
    gamma = random_connection(rng, split, 1)
    tau = LeafVolume(split, random_positive(rng, chart, 1))
    z = foliated_modular_field(pf, tau, gamma)
    # projectable Poisson fields of an x-independent P: base fields plus Hamiltonians
    x = sharp(P, differential(random_polynomial(rng, chart, 2, 3)))
    for i in split.horizontal_indices():
        x = x + Multivector(chart, {(i,): random_polynomial(rng, chart, 1, 2, split.horizontal_indices())})
    if not schouten_bracket(x, P).is_zero():
        raise AssertionError("generated field is not Poisson")
    lhs = schouten_bracket(z, x)
    rhs = sharp(P, differential(leafwise_divergence(x, tau, gamma)))
    return [("[Z, X] = P# d div(X)", lhs == rhs, (P, x))]


def suite_modular_oracle(rng):
    chart = _chart(rng, 2, 4)
    pi = random_poisson(rng, chart)
    g = random_positive(rng, chart, 1)
    z = modular_field(pi, VolumeForm(chart, g))
    return [
        ("defining relation = coordinate formula", z == coordinate_modular_field(pi, g), (pi, g)),
        ("L_Z Pi = 0", schouten_bracket(z, pi).is_zero(), (pi, g)),
    ]


def suite_modular_transition(rng):
    chart = _chart(rng, 2, 4)
    pi = random_poisson(rng, chart)
    g = random_positive(rng, chart, 1)
    f = random_positive(rng, chart, 1)
    return [("Z^{f Omega} = Z^Omega - Pi# dlog f", modular_transition_check(pi, VolumeForm(chart, g), f), (pi, g, f))]


def suite_mods_reeb(rng):
    split = random_split(rng, 3, 3, 1)
    chart = split.chart
    P = _vertical_poisson(rng, split)
    pf = PoissonFoliationData(P, split)
    gamma = random_connection(rng, split, 2)
    tau = LeafVolume(split, random_positive(rng, chart, 1))
    vs = TransversalVolume(split, random_positive(rng, chart, 1))
    return [("Z_P^Omega = Z_P^tau - P# lambda", mods_reeb_identity_check(pf, tau, vs, gamma), (P, gamma, tau, vs))]


def suite_reeb(rng):
    split = random_split(rng, 3, 3, 1)
    chart = split.chart
    gamma = random_connection(rng, split, 2)
    from modcalc.foliated import reeb_form

    base = TransversalVolume(split, random_positive(rng, chart, 1, split.horizontal_indices()))
    vs = TransversalVolume(split, random_positive(rng, chart, 1))
    lam = reeb_form(vs, gamma)
    return [
        ("base volume has lambda = 0", reeb_form(base, gamma).is_zero(), base),
        ("d01 lambda = 0", d01(lam, gamma).is_zero(), vs),
    ]


def suite_coupling_modular(rng):
    gd = random_coupling_data(rng)
    rep = structure_equations_check(gd)
    chart = gd.chart
    tau = LeafVolume(gd.split, random_positive(rng, chart, 1))
    md = modular_decomposition_check(gd, tau)
    rt = decompose(reconstruct(gd), gd.split) == gd
    return [
        ("structure equations", rep.ok, gd),
        ("Z_10 = -Pi# theta", md.Z10 == md.expected10, gd),
        ("Z_01 = Z_P^tau", md.Z01 == md.expected01, gd),
        ("i_{Pi_H} sigma^l = -l sigma^(l-1)", md.sigma_power_ok, gd),
        ("i_{Pi_H} R = P# Lambda", md.curvature_identity_ok, gd),
        ("decompose(reconstruct(gd)) = gd", rt, gd),
    ]


def _gauge_case(rng, gd, mu, tau):
    pi = reconstruct(gd)
    split = gd.split
    new, residuals = gauge_relations(pi, mu, tau, split)
    out = [
        ("gauge output is Poisson", jacobi_check(new), mu),
        ("gauge output is coupling", is_coupling(new, split), mu),
        ("P~ = P", "P" not in residuals, mu),
        ("connection transition rule", not any(k.startswith("connection") for k in residuals), residuals),
        ("divergence-form transition rule", not any(k.startswith("theta") for k in residuals), residuals),
    ]
    zp = foliated_modular_field(gd.P, tau, gd.gamma)
    theta = divergence_form(tau, gd.gamma)
    if zp.is_zero() and theta.is_zero():
        gd_new = decompose(new, split)
        z_new = modular_field(new, coupling_volume(gd_new, tau))
        out.append(("unimodular input: transformed modular field = 0", z_new.is_zero(), z_new))
    return out


def suite_gauge(rng):
    # flat inputs keep the matrix inversion cheap; mixed terms in mu make the
    # transformed connection curved anyway
    gd = random_coupling_data(rng, curved=False)
    chart = gd.chart
    # unimodular-friendly volume half of the time
    tau = LeafVolume(gd.split, 1 if rng.random() < 0.5 else random_positive(rng, chart, 1))
    mu = random_gauge_primitive(rng, gd.split)
    try:
        return _gauge_case(rng, gd, mu, tau)
    except (GaugeNotInvertible, NotCoupling):
        return [("gauge map invertible", None, "singular draw")]


def gauge_so3_case(mu_text="y1", tau_density=1):
    split, sigma, P = flat_so3_example()
    gd = GeometricData(ConnectionForm(split), sigma, P)
    mu = DifferentialForm(split.chart, {(0,): mu_text})
    return _gauge_case(None, gd, mu, LeafVolume(split, tau_density))


SUITES = {
    "d_squared": suite_d_squared,
    "d01_squared": suite_d01_squared,
    "d_completeness": suite_d_completeness,
    "bigrade_roundtrip": suite_bigrade_roundtrip,
    "schouten": suite_schouten,
    "interior_formula": suite_interior_formula,
    "theta2": suite_theta2,
    "theta3": suite_theta3,
    "divham": suite_divham,
    "mod_and_poiss": suite_mod_and_poiss,
    "modular_oracle": suite_modular_oracle,
    "modular_transition": suite_modular_transition,
    "mods_reeb": suite_mods_reeb,
    "reeb": suite_reeb,
    "coupling_modular": suite_coupling_modular,
    "gauge": suite_gauge,
}


@dataclass
class SuiteResult:
    name: str
    seed: int
    cases: int
    checks: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)
    by_label: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures


def run_suite(name: str, seed: int = 0, cases: int = 100) -> SuiteResult:
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown property suite {name!r}; known: {', '.join(sorted(SUITES))}") from None
    result = SuiteResult(name, seed, cases)
    start = time.perf_counter()
    for case in range(cases):
        rng = random.Random(f"{name}:{seed}:{case}")
        for label, ok, detail in fn(rng):
            if ok is None:
                result.skipped += 1
                continue
            result.checks += 1
            result.by_label[label] = result.by_label.get(label, 0) + 1
            if not ok:
                result.failures.append((case, label, detail))
    result.seconds = time.perf_counter() - start
    return result
