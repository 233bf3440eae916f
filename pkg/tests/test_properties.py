import random

import pytest

from modcalc.coupling import GeometricData, decompose, is_coupling, reconstruct, structure_equations_check
from modcalc.exterior import Multivector
from modcalc.foliated import ConnectionForm
from modcalc.poisson import jacobi_check
from modcalc.properties import (
    SUITES,
    coordinate_modular_field,
    flat_so3_example,
    gauge_so3_case,
    random_coupling_data,
    random_poisson,
    run_suite,
)
from modcalc.ratfun import Chart

FAST_SUITES = [name for name in SUITES if name not in ("coupling_modular", "gauge")]


@pytest.mark.parametrize("name", FAST_SUITES)
def test_suite_passes_small_run(name):
    result = run_suite(name, seed=3, cases=15)
    assert result.ok, result.failures[:3]
    assert result.checks >= 15


@pytest.mark.parametrize("name", ["coupling_modular", "gauge"])
def test_coupling_suites_small_run(name):
    result = run_suite(name, seed=5, cases=6)
    assert result.ok, result.failures[:3]
    assert result.checks > 0


def test_suites_are_reproducible():
    a = run_suite("theta2", seed=11, cases=5)
    b = run_suite("theta2", seed=11, cases=5)
    assert (a.checks, a.failures) == (b.checks, b.failures)


def test_unknown_suite_is_rejected():
    with pytest.raises(KeyError, match="unknown property suite"):
        run_suite("no_such_suite")


def test_suite_runner_counts_failures_and_skips(monkeypatch):
    def fake(rng):
        return [("always", True, None), ("never", False, "detail"), ("unusable", None, "skip")]

    monkeypatch.setitem(SUITES, "fake", fake)
    result = run_suite("fake", seed=0, cases=4)
    assert result.checks == 8
    assert result.skipped == 4
    assert [f[1] for f in result.failures] == ["never"] * 4
    assert not result.ok


@pytest.mark.parametrize("seed", range(10))
def test_generated_coupling_data_is_valid(seed):
    gd = random_coupling_data(random.Random(f"valid:{seed}"))
    assert structure_equations_check(gd).ok
    pi = reconstruct(gd)
    assert jacobi_check(pi)
    assert is_coupling(pi, gd.split)


@pytest.mark.parametrize("seed", range(10))
def test_generated_poisson_bivectors_satisfy_jacobi(seed):
    rng = random.Random(f"poisson:{seed}")
    chart = Chart(["a", "b", "c", "d"][: rng.randint(2, 4)])
    assert jacobi_check(random_poisson(rng, chart))


def test_coordinate_oracle_on_linear_bivector():
    chart = Chart(["x", "y"])
    pi = Multivector(chart, {("x", "y"): "x"})
    # Z^x = d_y(Pi^{xy}) = 0, Z^y = d_x(Pi^{yx}) = -1
    assert coordinate_modular_field(pi, chart.one()) == Multivector(chart, {("y",): -1})


def test_flat_so3_example_is_coupling():
    split, sigma, P = flat_so3_example()
    gd = GeometricData(ConnectionForm(split), sigma, P)
    pi = reconstruct(gd)
    assert jacobi_check(pi)
    assert decompose(pi, split) == gd


def test_gauge_so3_case_passes():
    checks = gauge_so3_case()
    assert checks and all(ok for _, ok, _ in checks)
    assert "unimodular input: transformed modular field = 0" in [label for label, _, _ in checks]
