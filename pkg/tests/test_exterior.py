import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modcalc.errors import DegenerateVolume, FrameMismatch, NotTopGrade
from modcalc.exterior import (
    DifferentialForm,
    Multivector,
    VolumeForm,
    apply_vector,
    coordinate_differential,
    coordinate_vector,
    differential,
    divergence,
    dlog,
    exterior_derivative,
    flat,
    format_tensor,
    interior_product,
    lie_derivative,
    parse_tensor,
    schouten_bracket,
    sharp,
    wedge,
    wedge_power,
)
from modcalc.foliated import AdaptedSplit, ConnectionForm
from modcalc.properties import random_form, random_function, random_multivector, random_vector_field
from modcalc.ratfun import Chart


def dx(chart, name):
    return coordinate_differential(chart, name)


def d_(chart, name):
    return coordinate_vector(chart, name)


def test_wedge_antisymmetry(xyz):
    assert wedge(dx(xyz, "x"), dx(xyz, "y")) == -wedge(dx(xyz, "y"), dx(xyz, "x"))


def test_wedge_degree_overflow():
    chart = Chart(["x1", "x2", "y"])
    sigma = DifferentialForm(chart, {("x1", "x2"): 1})
    assert wedge(sigma, sigma).is_zero()
    assert wedge_power(sigma, 2).is_zero()


def test_wedge_bilinear(xyz):
    x, y, _ = xyz.coords()
    a = dx(xyz, "y") * x
    b = dx(xyz, "z") * y
    assert wedge(a, b) == DifferentialForm(xyz, {("y", "z"): "x*y"})


def test_interior_product_composition_convention(xyz):
    biv = wedge(d_(xyz, "x"), d_(xyz, "y"))
    area = wedge(dx(xyz, "x"), dx(xyz, "y"))
    assert interior_product(d_(xyz, "y"), area) == -dx(xyz, "x")
    result = interior_product(biv, area)
    assert result == DifferentialForm(xyz, {(): -1})


def test_interior_product_on_functions(xyz):
    f = DifferentialForm(xyz, {(): "x*y"})
    assert interior_product(d_(xyz, "x"), f).is_zero()


def test_exterior_derivative_examples(xyz):
    x = xyz.coord("x")
    assert exterior_derivative(dx(xyz, "y") * x) == wedge(dx(xyz, "x"), dx(xyz, "y"))
    f = random_function(random.Random(5), xyz, 3)
    assert exterior_derivative(differential(f)).is_zero()


def test_dlog_examples(xyz):
    r2 = xyz.parse("x^2 + y^2")
    expected = DifferentialForm(xyz, {("x",): "2*x/(x^2+y^2)", ("y",): "2*y/(x^2+y^2)"})
    assert dlog(r2) == expected
    assert exterior_derivative(expected).is_zero()
    assert dlog(xyz.const(7)).is_zero()


def test_lie_derivative_example(xyz):
    form = DifferentialForm(xyz, {("x", "y"): "z"})
    assert lie_derivative(d_(xyz, "z"), form) == DifferentialForm(xyz, {("x", "y"): 1})


def lie_bracket_oracle(x, y):
    """Coordinate formula [X, Y]^k = X(Y^k) - Y(X^k)."""
    chart = x.chart
    comps = {}
    for k in range(chart.dim):
        yk = y[(k,)]
        xk = x[(k,)]
        comps[(k,)] = apply_vector(x, yk) - apply_vector(y, xk)
    return Multivector(chart, comps)


def test_schouten_on_decomposable_matches_leibniz_oracle(xyz):
    x1, x2 = d_(xyz, "x"), d_(xyz, "y")
    z = Multivector(xyz, {("z",): "x^2"})
    oracle = wedge(x1, lie_bracket_oracle(x2, z)) - wedge(x2, lie_bracket_oracle(x1, z))
    result = schouten_bracket(wedge(x1, x2), z)
    assert result == oracle
    # frozen value of the oracle
    assert result == Multivector(xyz, {("y", "z"): "-2*x"})


def test_schouten_so3_vanishes(pi_so3):
    assert schouten_bracket(pi_so3, pi_so3).is_zero()


@pytest.mark.parametrize("seed", range(10))
def test_schouten_vector_function(seed):
    rng = random.Random(seed)
    chart = Chart(["a", "b", "c", "d"][: rng.randint(2, 4)])
    x = random_vector_field(rng, chart)
    f = random_function(rng, chart, 2)
    fm = Multivector(chart, {(): f})
    assert schouten_bracket(x, fm) == Multivector(chart, {(): apply_vector(x, f)})


@pytest.mark.parametrize("seed", range(10))
def test_schouten_vectors_is_lie_bracket(seed):
    rng = random.Random(seed)
    chart = Chart(["a", "b", "c"])
    x, y = random_vector_field(rng, chart), random_vector_field(rng, chart)
    assert schouten_bracket(x, y) == lie_bracket_oracle(x, y)


def test_sharp_examples(xyz, pi_r3, pi_so3):
    alpha = -dlog(xyz.parse("x^2 + y^2"))
    assert sharp(pi_r3, alpha) == d_(xyz, "z")
    casimir = pi_so3.chart.parse("x1^2 + x2^2 + x3^2")
    assert sharp(pi_so3, differential(casimir)).is_zero()
    assert sharp(Multivector.zero(xyz), alpha).is_zero()


def test_flat_example(xyz):
    area = wedge(dx(xyz, "x"), dx(xyz, "y"))
    assert flat(area, d_(xyz, "x")) == dx(xyz, "y")


def test_flat_linear_over_functions(xyz):
    rng = random.Random(1)
    b = random_form(rng, xyz, 2)
    x, y = random_vector_field(rng, xyz), random_vector_field(rng, xyz)
    f = random_function(rng, xyz, 2)
    assert flat(b, x * f + y) == flat(b, x) * f + flat(b, y)


@pytest.mark.parametrize("seed", range(10))
def test_sharp_flat_duality(seed):
    """For a nondegenerate 2-form sigma, the bivector with matrix -sigma^-1 satisfies sigma-flat o (-Pi-sharp) = id."""
    from modcalc import linalg

    rng = random.Random(seed)
    chart = Chart(["a", "b", "c", "d"])
    n = 4
    while True:
        sigma = random_form(rng, chart, 2, poly_degree=1, rational=0)
        mat = [[sigma[(i, j)] if i < j else (-sigma[(j, i)] if i > j else chart.zero()) for j in range(n)] for i in range(n)]
        if not linalg.determinant(mat).is_zero():
            break
    inv = linalg.inverse(mat)
    pi = Multivector(chart, {(i, j): -inv[i][j] for i in range(n) for j in range(i + 1, n)})
    for k in range(n):
        alpha = dx(chart, k)
        assert flat(sigma, -sharp(pi, alpha)) == alpha


def test_divergence_examples(xyz, pi_r3):
    plane = Chart(["x", "y"])
    euler = Multivector(plane, {("x",): "x", ("y",): "y"})
    assert divergence(euler, VolumeForm.euclidean(plane)) == plane.const(2)
    ham_z = sharp(pi_r3, differential(xyz.coord("z")))
    assert ham_z == Multivector(xyz, {("x",): "x/2", ("y",): "y/2"})
    assert divergence(ham_z, VolumeForm.euclidean(xyz)) == xyz.one()


@pytest.mark.parametrize("seed", range(10))
def test_divergence_rescaling(seed):
    rng = random.Random(seed)
    chart = Chart(["a", "b", "c"])
    x = random_vector_field(rng, chart)
    from modcalc.properties import random_positive

    g = random_positive(rng, chart, 1)
    f = random_positive(rng, chart, 1)
    omega = VolumeForm(chart, g)
    scaled = VolumeForm(chart, g * f)
    assert divergence(x, scaled) == divergence(x, omega) + apply_vector(x, f) / f


def test_volume_form_errors(xyz):
    with pytest.raises(DegenerateVolume):
        VolumeForm(xyz, 0)
    with pytest.raises(DegenerateVolume):
        VolumeForm(xyz, "x", samples=[(0, 1, 1)])
    with pytest.raises(NotTopGrade):
        VolumeForm.from_form(dx(xyz, "x"))


def test_frame_mismatch():
    split = AdaptedSplit(["x"], ["y"])
    gamma = ConnectionForm(split, [["x"]])
    a = DifferentialForm(split.chart, {("x",): 1})
    b = DifferentialForm(split.chart, {("y",): 1}, gamma)
    with pytest.raises(FrameMismatch):
        wedge(a, b)


def test_format_parse_round_trip(xyz, pi_r3):
    for t in [pi_r3, Multivector.zero(xyz), DifferentialForm(xyz, {("x", "z"): "1/(x-y)", (): 3})]:
        kind = "multivector" if isinstance(t, Multivector) else "form"
        assert parse_tensor(format_tensor(t), xyz, kind) == t
    assert format_tensor(Multivector.zero(xyz)) == "0"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_formula_identity(seed):
    """i_A(alpha ^ beta) = (-1)^|A| (alpha ^ i_A beta - i_{i_alpha A} beta)."""
    from modcalc.exterior import contract

    rng = random.Random(seed)
    chart = Chart(["a", "b", "c", "d"][: rng.randint(2, 4)])
    k = rng.randint(1, min(3, chart.dim))
    a = random_multivector(rng, chart, k)
    alpha = random_form(rng, chart, 1)
    beta = random_form(rng, chart, rng.randint(0, chart.dim))
    lhs = interior_product(a, wedge(alpha, beta))
    rhs = (wedge(alpha, interior_product(a, beta)) - interior_product(contract(alpha, a), beta)) * ((-1) ** k)
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_d_squared_hypothesis(seed):
    rng = random.Random(seed)
    chart = Chart(["a", "b", "c", "d", "e"][: rng.randint(1, 5)])
    beta = random_form(rng, chart, rng.randint(0, min(3, chart.dim)))
    assert exterior_derivative(exterior_derivative(beta)).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_schouten_graded_antisymmetry_and_jacobi(seed):
    from modcalc.properties import random_decomposable

    rng = random.Random(seed)
    chart = Chart(["a", "b", "c"])
    ka, kb, kc = (rng.randint(1, 2) for _ in range(3))
    a, b, c = (random_decomposable(rng, chart, k, poly_degree=1) for k in (ka, kb, kc))
    assert schouten_bracket(a, b) == schouten_bracket(b, a) * (-((-1) ** ((ka - 1) * (kb - 1))))
    jac = (
        schouten_bracket(a, schouten_bracket(b, c)) * ((-1) ** ((ka - 1) * (kc - 1)))
        + schouten_bracket(b, schouten_bracket(c, a)) * ((-1) ** ((kb - 1) * (ka - 1)))
        + schouten_bracket(c, schouten_bracket(a, b)) * ((-1) ** ((kc - 1) * (kb - 1)))
    )
    assert jac.is_zero()
