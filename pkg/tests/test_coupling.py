import random

import pytest

from modcalc.coupling import (
    GeometricData,
    coupling_status,
    coupling_volume,
    curvature_identity,
    decompose,
    flat_coupling_build,
    gauge_relations,
    gauge_relations_check,
    gauge_transform,
    hamiltonian_certificate,
    is_coupling,
    modular_decomposition_check,
    reconstruct,
    sigma_power_identity,
    strong_compatibility_check,
    structure_equations_check,
    unimodularity_certificate,
)
from modcalc.errors import (
    DegenerateCouplingForm,
    GaugeNotInvertible,
    GaugeSingularAtSample,
    LeafConditionViolated,
    NotCasimirValued,
    NotClosedCertificate,
    NotCoupling,
)
from modcalc.exterior import DifferentialForm, Multivector, VolumeForm, differential, dlog, flat, sharp
from modcalc.foliated import AdaptedSplit, ConnectionForm, LeafVolume, divergence_form
from modcalc.poisson import foliated_modular_field, jacobi_check, modular_field
from modcalc.properties import flat_so3_example, random_coupling_data, random_gauge_primitive


@pytest.fixture
def flat_so3():
    split, sigma, P = flat_so3_example()
    gd = GeometricData(ConnectionForm(split), sigma, P)
    return split, gd, reconstruct(gd)


def test_is_coupling_examples():
    split = AdaptedSplit(["x1", "x2"], ["y1", "y2"])
    pi = Multivector(split.chart, {("x1", "x2"): 1, ("y1", "y2"): "y1"})
    assert is_coupling(pi, split, samples=[(0, 0, 1, 1), (2, 3, -1, 5)])
    vertical_only = Multivector(split.chart, {("y1", "y2"): 1})
    assert not is_coupling(vertical_only, split)
    with pytest.raises(NotCoupling):
        decompose(vertical_only, split)


def test_coupling_at_samples_is_reported_separately():
    split = AdaptedSplit(["x1", "x2"], ["y"])
    pi = Multivector(split.chart, {("x1", "x2"): "x1"})
    generic, bad = coupling_status(pi, split, samples=[(0, 1, 1), (1, 1, 1)])
    assert generic and bad == [(0, 1, 1)]
    assert not is_coupling(pi, split, samples=[(0, 1, 1)])


def test_decompose_flat_so3(flat_so3):
    split, gd, pi = flat_so3
    data = decompose(pi, split)
    assert data.gamma.is_trivial()
    assert data.sigma == DifferentialForm(split.chart, {("x1", "x2"): 1})
    assert data.P.bivector == gd.P.bivector
    assert jacobi_check(pi)
    assert reconstruct(data) == pi


def test_symplectic_horizontal_block_inverts_coupling_form():
    split = AdaptedSplit(["x1", "x2", "x3", "x4"], ["y"])
    pi = Multivector(split.chart, {("x1", "x2"): "1 + x1^2", ("x3", "x4"): "2 + x4"})
    assert jacobi_check(pi)
    gd = decompose(pi, split)
    for i in range(split.p):
        alpha = DifferentialForm(split.chart, {(i,): 1})
        # sigma-flat undoes -Pi-sharp on the horizontal covectors
        assert flat(gd.sigma, -sharp(pi, alpha)) == alpha


def test_reconstruct_examples():
    split, _, P = flat_so3_example()
    sigma = DifferentialForm(split.chart, {("x1", "x2"): 1})
    plain = reconstruct(GeometricData(ConnectionForm(split), sigma, Multivector.zero(split.chart)))
    assert plain == Multivector(split.chart, {("x1", "x2"): 1})
    full = reconstruct(GeometricData(ConnectionForm(split), sigma, P))
    assert jacobi_check(full)
    with pytest.raises(DegenerateCouplingForm):
        GeometricData(ConnectionForm(split), DifferentialForm.zero(split.chart), P)


@pytest.mark.parametrize("seed", range(20))
def test_round_trips(seed):
    gd = random_coupling_data(random.Random(f"roundtrip:{seed}"))
    pi = reconstruct(gd)
    again = decompose(pi, gd.split)
    assert again.gamma == gd.gamma and again.sigma == gd.sigma and again.P.bivector == gd.P.bivector
    assert reconstruct(again) == pi


def test_structure_equations(flat_so3):
    split, gd, _ = flat_so3
    assert structure_equations_check(gd).ok
    broken = GeometricData(ConnectionForm(split, [["y1", "0", "0"], ["0", "0", "0"]]), gd.sigma, gd.P)
    rep = structure_equations_check(broken)
    assert not (rep.se0_ok and rep.se1_ok)
    assert rep.details and all(not r.is_zero() for r in rep.details.values())


@pytest.mark.parametrize("seed", range(10))
def test_decompose_satisfies_structure_equations(seed):
    gd = random_coupling_data(random.Random(f"se:{seed}"), curved=True)
    assert structure_equations_check(decompose(reconstruct(gd), gd.split)).ok


def test_modular_decomposition_flat_so3(flat_so3):
    split, gd, _ = flat_so3
    md = modular_decomposition_check(gd, LeafVolume(split, 1))
    assert md.Z.is_zero() and md.Z10.is_zero() and md.Z01.is_zero() and md.ok


def test_modular_decomposition_scaled_leaf_volume(flat_so3):
    split, gd, pi = flat_so3
    f = split.chart.parse("1 + y1^2")
    md = modular_decomposition_check(gd, LeafVolume(split, f))
    assert md.Z01 == -sharp(gd.P.bivector, dlog(f))
    theta = divergence_form(LeafVolume(split, f), gd.gamma)
    assert md.Z10 == (-sharp(pi, theta) if not theta.is_zero() else Multivector.zero(split.chart))
    assert md.ok


def test_modular_decomposition_regular_case():
    """P = 0 (flat connection forced by SE1): Z_01 vanishes and Z_10 = -Pi# theta."""
    split = AdaptedSplit(["x1", "x2"], ["y"])
    gd = GeometricData(ConnectionForm(split, [["x2*y"], ["x1*y"]]), DifferentialForm(split.chart, {("x1", "x2"): "1 + x1^2"}), Multivector.zero(split.chart))
    pi = reconstruct(gd)
    gd = decompose(pi, split)
    assert structure_equations_check(gd).ok
    tau = LeafVolume(split, "1 + y^2 + x1^2")
    md = modular_decomposition_check(gd, tau)
    assert md.Z01.is_zero()
    assert md.Z10 == -sharp(pi, divergence_form(tau, gd.gamma))
    assert md.ok


def test_proof_identities_on_random_data():
    for seed in range(5):
        gd = random_coupling_data(random.Random(f"proof:{seed}"))
        assert sigma_power_identity(gd)
        assert curvature_identity(gd)


def test_gauge_identity(flat_so3):
    split, _, pi = flat_so3
    assert gauge_transform(pi, DifferentialForm.zero(split.chart), split=split) == pi


def test_gauge_flat_so3(flat_so3):
    split, gd, pi = flat_so3
    mu = DifferentialForm(split.chart, {("x1",): "y1"})
    new = gauge_transform(pi, mu, samples=[(0, 0, 0, 0, 0), (1, 1, "1/4", "1/2", "1/4")], split=split)
    assert jacobi_check(new)
    assert is_coupling(new, split, samples=[(0, 0, 0, 0, 0)])
    assert decompose(new, split).P.bivector == gd.P.bivector
    assert gauge_relations_check(pi, mu, LeafVolume(split, 1), split)
    back = gauge_transform(new, -mu, split=split)
    assert back == pi


def test_gauge_hand_example(flat_so3):
    """B = -d(y1 dx1) = dx1 ^ dy1 deforms the flat so(3) coupling into a frozen value."""
    split, _, pi = flat_so3
    mu = DifferentialForm(split.chart, {("x1",): "y1"})
    new = gauge_transform(pi, mu, split=split)
    c = split.chart
    expected = Multivector(c, {("x1", "x2"): 1, ("x2", "y2"): "-y3", ("x2", "y3"): "y2"}) + Multivector(
        c, {("y1", "y2"): "y3", ("y2", "y3"): "y1", ("y3", "y1"): "y2"}
    )
    assert new == expected


def test_gauge_errors():
    split = AdaptedSplit(["x1", "x2"], ["y"])
    pi = Multivector(split.chart, {("x1", "x2"): 1})
    # B = -d(x1 dx2) = -dx1 ^ dx2 makes Pi B the identity on the horizontal block
    mu = DifferentialForm(split.chart, {("x2",): "x1"})
    with pytest.raises(GaugeNotInvertible):
        gauge_transform(pi, mu, split=split)
    mu2 = DifferentialForm(split.chart, {("x2",): "x1*y"})
    with pytest.raises(GaugeSingularAtSample):
        gauge_transform(pi, mu2, samples=[(0, 0, 1)], split=split)


def test_gauge_relations_trivial_and_unimodular(flat_so3):
    split, gd, pi = flat_so3
    tau = LeafVolume(split, 1)
    assert gauge_relations_check(pi, DifferentialForm.zero(split.chart), tau, split)
    mu = DifferentialForm(split.chart, {("x1",): "y1*y2 + x2", ("x2",): "x1*y3"})
    new, residuals = gauge_relations(pi, mu, tau, split)
    assert not residuals
    gd_new = decompose(new, split)
    assert divergence_form(tau, gd_new.gamma).is_zero()


def test_gauged_output_volume_uses_transformed_coupling_form():
    """Unimodular input: the transformed volume built from the new sigma has zero modular field."""
    hits_new = hits_old = 0
    for seed in range(12):
        rng = random.Random(f"gauge-volume:{seed}")
        gd = random_coupling_data(rng, curved=False)
        tau = LeafVolume(gd.split, 1)
        if not (foliated_modular_field(gd.P, tau, gd.gamma).is_zero() and divergence_form(tau, gd.gamma).is_zero()):
            continue
        new = gauge_transform(reconstruct(gd), random_gauge_primitive(rng, gd.split), split=gd.split)
        gd_new = decompose(new, gd.split)
        hits_new += modular_field(new, coupling_volume(gd_new, tau)).is_zero()
        mixed = GeometricData(gd_new.gamma, gd.sigma, gd_new.P)
        hits_old += modular_field(new, coupling_volume(mixed, tau)).is_zero()
        assert modular_field(new, coupling_volume(gd_new, tau)).is_zero()
    assert hits_new > hits_old


def test_unimodularity_certificates(flat_so3):
    split, gd, _ = flat_so3
    assert unimodularity_certificate(gd, LeafVolume(split, 1)).verdict == "unimodular-certified"
    single = AdaptedSplit([], ["x", "y", "z"])
    pi = Multivector(single.chart, {("z", "x"): "x/2", ("z", "y"): "y/2"})
    cert = unimodularity_certificate(decompose(pi, single), LeafVolume(single, 1))
    assert cert.verdict == "inconclusive"
    assert cert.foliated_modular == Multivector(single.chart, {("z",): 1})
    regular = AdaptedSplit(["x1", "x2"], ["y"])
    closed = GeometricData(ConnectionForm(regular), DifferentialForm(regular.chart, {("x1", "x2"): 1}), Multivector.zero(regular.chart))
    assert unimodularity_certificate(closed, LeafVolume(regular, 1)).verdict == "unimodular-certified"


def test_hamiltonian_certificates(pi_r3, xyz, pi_so3, so3_chart):
    cert = -dlog(xyz.parse("x^2 + y^2"))
    assert hamiltonian_certificate(pi_r3, VolumeForm.euclidean(xyz), cert)
    assert hamiltonian_certificate(pi_so3, VolumeForm.euclidean(so3_chart), so3_chart.zero())
    scaled = pi_so3 * so3_chart.parse("x1^4+x2^4+x3^4")
    assert not hamiltonian_certificate(scaled, VolumeForm.euclidean(so3_chart), so3_chart.zero())
    with pytest.raises(NotClosedCertificate):
        hamiltonian_certificate(pi_r3, VolumeForm.euclidean(xyz), DifferentialForm(xyz, {("x",): "y"}))


def test_flat_coupling_build():
    split, sigma, P = flat_so3_example()
    leaf = {"samples": [(0, 0, 0, 0, 0), (1, 2, 0, 0, 0)], "omega": DifferentialForm(split.chart, {("x1", "x2"): 1})}
    result = flat_coupling_build(split, sigma, P, leaf)
    assert result.report.ok and jacobi_check(result.bivector)
    assert result.leaf_checks["P_vanishes"]
    casimir_sigma = DifferentialForm(split.chart, {("x1", "x2"): "1 + y1^2 + y2^2 + y3^2"})
    built = flat_coupling_build(split, casimir_sigma, P, leaf)
    assert built.report.ok
    with pytest.raises(NotCasimirValued):
        flat_coupling_build(split, DifferentialForm(split.chart, {("x1", "x2"): "1 + y1"}), P)
    with pytest.raises(LeafConditionViolated):
        flat_coupling_build(split, sigma, P, {"samples": [(0, 0, 1, 0, 0)]})


def test_strong_compatibility(flat_so3):
    split, gd, pi = flat_so3
    mu = DifferentialForm(split.chart, {("x1",): "y1", ("x2",): "y2*y3"})
    new = decompose(gauge_transform(pi, mu, split=split), split)
    assert strong_compatibility_check(new.gamma, gd.gamma, gd.P, mu)
    assert not strong_compatibility_check(new.gamma, gd.gamma, gd.P, -mu)
