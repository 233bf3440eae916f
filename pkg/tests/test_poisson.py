import random

import pytest

from modcalc.errors import DegenerateVolume, NotLeafTangent, NotPoisson, WrongBidegree
from modcalc.exterior import DifferentialForm, Multivector, VolumeForm, dlog, schouten_bracket, sharp
from modcalc.foliated import AdaptedSplit, ConnectionForm, LeafVolume, TransversalVolume
from modcalc.poisson import (
    PoissonBivector,
    PoissonFoliationData,
    casimir_cocycle_check,
    casimir_complex_member,
    foliated_modular_field,
    hamiltonian_field,
    is_casimir,
    is_poisson_field,
    jacobi_check,
    jacobi_via_schouten,
    modular_field,
    modular_transition_check,
    mods_reeb_identity_check,
    restrict_to_leaf,
)
from modcalc.properties import coordinate_modular_field, random_connection, random_poisson, random_positive
from modcalc.ratfun import Chart


def so3_fibre():
    split = AdaptedSplit(["x1", "x2"], ["y1", "y2", "y3"])
    P = Multivector(split.chart, {("y1", "y2"): "y3", ("y2", "y3"): "y1", ("y3", "y1"): "y2"})
    return split, P


def test_jacobi_examples(pi_so3, so3_chart):
    f = so3_chart.parse("x1^4 + x2^4 + x3^4")
    assert jacobi_check(pi_so3)
    assert jacobi_check(pi_so3 * f)
    c = Chart(["x", "y", "z", "w"])
    # {x, {z, w}} = {x, y} = 1 while the other two cyclic terms vanish
    bad = Multivector(c, {("x", "y"): 1, ("z", "w"): "y"})
    assert schouten_bracket(bad, bad) == Multivector(c, {("x", "z", "w"): 2})
    assert not jacobi_check(bad)
    with pytest.raises(NotPoisson):
        PoissonBivector(bad)


@pytest.mark.parametrize("seed", range(30))
def test_jacobi_routes_agree(seed):
    """The denominator-free cyclic test and the Schouten bracket decide the same."""
    from modcalc.properties import random_multivector

    rng = random.Random(seed)
    chart = Chart(["a", "b", "c", "d"][: rng.randint(3, 4)])
    pi = random_poisson(rng, chart) if seed % 2 else random_multivector(rng, chart, 2, rational=0.5)
    if seed % 3 == 0:
        pi = pi * chart.parse("1/(a^2 + 1)")
    assert jacobi_check(pi) == jacobi_via_schouten(pi)


def test_hamiltonian_field_examples(pi_r3, xyz, pi_so3, so3_chart):
    assert hamiltonian_field(pi_r3, xyz.coord("z")) == Multivector(xyz, {("x",): "x/2", ("y",): "y/2"})
    assert hamiltonian_field(pi_so3, so3_chart.parse("x1^2+x2^2+x3^2")).is_zero()
    assert hamiltonian_field(pi_so3, so3_chart.const(5)).is_zero()


def test_modular_field_examples(pi_r3, xyz, pi_so3, so3_chart):
    assert modular_field(pi_r3, VolumeForm.euclidean(xyz)) == Multivector(xyz, {("z",): 1})
    assert modular_field(pi_so3, VolumeForm.euclidean(so3_chart)).is_zero()
    f = so3_chart.parse("x1^4 + x2^4 + x3^4")
    z = modular_field(pi_so3 * f, VolumeForm.euclidean(so3_chart))
    # 2 eps_ijk (x_i^3 x_j - x_i x_j^3) d_k summed over i, j
    eps = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (1, 0, 2): -1, (2, 1, 0): -1, (0, 2, 1): -1}
    x = so3_chart.coords()
    comps = {}
    for (i, j, k), s in eps.items():
        term = (x[i] ** 3 * x[j] - x[i] * x[j] ** 3) * (2 * s)
        comps[(k,)] = comps.get((k,), so3_chart.zero()) + term
    assert z == Multivector(so3_chart, comps)
    assert len(z.components) == 3


def test_modular_field_degenerate_volume(pi_r3):
    with pytest.raises(DegenerateVolume):
        modular_field(pi_r3, DifferentialForm(pi_r3.chart, {}))


@pytest.mark.parametrize("seed", range(20))
def test_modular_field_matches_coordinate_oracle(seed):
    rng = random.Random(seed)
    chart = Chart(["a", "b", "c", "d"][: rng.randint(2, 4)])
    pi = random_poisson(rng, chart)
    g = random_positive(rng, chart, 1)
    z = modular_field(pi, VolumeForm(chart, g))
    assert z == coordinate_modular_field(pi, g)
    assert is_poisson_field(pi, z)


def test_modular_transition_examples(pi_so3, so3_chart):
    omega = VolumeForm.euclidean(so3_chart)
    assert modular_transition_check(pi_so3, omega, so3_chart.one())
    assert modular_transition_check(pi_so3, omega, so3_chart.parse("x1^4+x2^4+x3^4"))
    plane = Chart(["x", "y"])
    assert modular_transition_check(Multivector(plane, {("x", "y"): 1}), VolumeForm.euclidean(plane), plane.parse("1+x^2"))
    with pytest.raises(DegenerateVolume):
        modular_transition_check(pi_so3, omega, so3_chart.zero())


def test_casimir_examples(pi_so3, so3_chart):
    assert is_casimir(pi_so3, so3_chart.parse("x1^2+x2^2+x3^2"))
    assert not is_casimir(pi_so3, so3_chart.coord("x1"))
    assert is_casimir(Multivector.zero(so3_chart), so3_chart.parse("x1*x2"))


def test_poisson_field_examples(pi_r3, xyz):
    plane = Chart(["x", "y"])
    assert is_poisson_field(Multivector(plane, {("x", "y"): 1}), Multivector(plane, {("y",): "x"}))
    assert is_poisson_field(pi_r3, modular_field(pi_r3, VolumeForm.euclidean(xyz)))


def test_foliated_modular_examples():
    split, P = so3_fibre()
    gamma = ConnectionForm(split)
    pf = PoissonFoliationData(P, split)
    assert foliated_modular_field(pf, LeafVolume(split, 1), gamma).is_zero()
    zero = PoissonFoliationData(Multivector.zero(split.chart), split)
    assert foliated_modular_field(zero, LeafVolume(split, "1+y1^2"), gamma).is_zero()


def test_single_leaf_reduces_to_modular_field(pi_r3):
    split = AdaptedSplit([], ["x", "y", "z"])
    pi = Multivector(split.chart, {("z", "x"): "x/2", ("z", "y"): "y/2"})
    pf = PoissonFoliationData(pi, split)
    z = foliated_modular_field(pf, LeafVolume(split, 1), ConnectionForm(split))
    assert z == modular_field(pi, VolumeForm.euclidean(split.chart))


def test_not_leaf_tangent():
    split = AdaptedSplit(["x"], ["y", "z"])
    with pytest.raises(NotLeafTangent):
        PoissonFoliationData(Multivector(split.chart, {("x", "y"): 1}), split)


def test_mods_reeb_examples():
    split, P = so3_fibre()
    pf = PoissonFoliationData(P, split)
    gamma = ConnectionForm(split)
    tau = LeafVolume(split, 1)
    assert mods_reeb_identity_check(pf, tau, TransversalVolume(split, 1), gamma)
    assert mods_reeb_identity_check(pf, tau, TransversalVolume(split, "(1 + x1^2)*(1 + y1^2+y2^2+y3^2)"), gamma)
    toy = AdaptedSplit(["x"], ["y1", "y2"])
    rng = random.Random(4)
    pt = PoissonFoliationData(Multivector(toy.chart, {("y1", "y2"): "y1"}), toy)
    sigma = TransversalVolume(toy, random_positive(rng, toy.chart, 1))
    assert mods_reeb_identity_check(pt, LeafVolume(toy, 1), sigma, random_connection(rng, toy))


def test_casimir_member_examples():
    split, P = so3_fibre()
    pf = PoissonFoliationData(P, split)
    gamma = ConnectionForm(split)
    beta = DifferentialForm(split.chart, {("x1",): "y1^2+y2^2+y3^2"})
    assert casimir_complex_member(beta, pf, gamma)
    toy = AdaptedSplit(["x1"], ["y1", "y2"])
    pt = PoissonFoliationData(Multivector(toy.chart, {("y1", "y2"): 1}), toy)
    assert not casimir_complex_member(DifferentialForm(toy.chart, {("x1",): "y1"}), pt, ConnectionForm(toy))
    with pytest.raises(WrongBidegree):
        casimir_complex_member(DifferentialForm(toy.chart, {("y1",): 1}), pt, ConnectionForm(toy))


def test_casimir_cocycle_examples():
    split = AdaptedSplit(["x1", "x2"], ["y"])
    gamma = ConnectionForm(split)
    pf = PoissonFoliationData(Multivector.zero(split.chart), split)
    assert casimir_cocycle_check(DifferentialForm.zero(split.chart), pf, gamma)
    assert not casimir_cocycle_check(DifferentialForm(split.chart, {("x1",): "x2"}), pf, gamma)
    assert casimir_cocycle_check(DifferentialForm(split.chart, {("x1",): "x1"}), pf, gamma)


@pytest.mark.parametrize("point", [(0, 0), (1, -2), (3, 1)])
def test_leaf_restriction_of_foliated_modular_field(point):
    split = AdaptedSplit(["x1", "x2"], ["y1", "y2", "y3"])
    s = split.chart.parse("1 + x1^2 + x2*y1")
    P = Multivector(split.chart, {("y1", "y2"): s * split.chart.coord("y3"), ("y2", "y3"): s * split.chart.coord("y1"), ("y3", "y1"): s * split.chart.coord("y2")})
    pf = PoissonFoliationData(P, split)
    tau = LeafVolume(split, "2 + y2^2 + x1")
    z = foliated_modular_field(pf, tau, random_connection(random.Random(1), split))
    leaf_z = restrict_to_leaf(z, split, point)
    leaf_P = restrict_to_leaf(P, split, point)
    from modcalc.poisson import restrict_scalar_to_leaf

    g = restrict_scalar_to_leaf(tau.density, split, point)
    assert leaf_z == modular_field(leaf_P, VolumeForm(leaf_P.chart, g))
