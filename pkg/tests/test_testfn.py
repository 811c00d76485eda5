import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmu.errors import InvalidWeight, NonIntegrableLog, NotConverged, UndefinedBoundaryValue
from dmu.measure import Measure
from dmu.testfn import (OuterFunction, RegularWeight, _phi2, dirichlet_energy_douglas,
                        dirichlet_energy_rs, dyadic_harmonic_sum, fmu_report,
                        harmonic_measure_arc, local_dirichlet_rs, outer_lower_bound_constant,
                        outer_lower_bound_ratios, random_measure, regular_weight_family)


def test_phi2_matches_direct_formula_where_it_is_stable():
    x = np.array([-0.5, -2e-3, 1e-3, 0.3, 2.0])
    np.testing.assert_allclose(_phi2(x), np.expm1(x) - x, rtol=1e-12)
    # both sides of the series cut-off agree
    np.testing.assert_allclose(_phi2(np.array([0.999e-3, 1.001e-3])),
                               np.array([0.999e-3, 1.001e-3]) ** 2 / 2, rtol=1e-3)


def test_harmonic_measure_closed_forms():
    assert harmonic_measure_arc(0.0, 0.0, 1.0) == pytest.approx(1 / (2 * np.pi))
    np.testing.assert_allclose(harmonic_measure_arc(0.9, -np.pi, np.pi), 1.0, rtol=1e-14)
    # arc centred at the point, of half-width 1 - r: (2/pi) arctan((1 + r)/(1 - r) tan((1-r)/2))
    r = 1 - 1e-6
    exact = 2 / np.pi * np.arctan((1 + r) / (1 - r) * np.tan((1 - r) / 2))
    np.testing.assert_allclose(harmonic_measure_arc(r, -(1 - r), 1 - r), exact, rtol=1e-12)


@given(st.floats(0.0, 0.9999), st.lists(st.floats(-np.pi, np.pi), min_size=1, max_size=8))
@settings(max_examples=100, deadline=None)
def test_harmonic_measure_partition_of_unity(r, cuts):
    ends = np.concatenate([[-np.pi], np.sort(cuts), [np.pi]])
    parts = [harmonic_measure_arc(r, a, b) for a, b in zip(ends[:-1], ends[1:])]
    assert min(parts) >= -1e-15
    np.testing.assert_allclose(sum(parts), 1.0, rtol=1e-12)


def test_dyadic_harmonic_sum_is_bounded():
    vals = [dyadic_harmonic_sum(1 - 2.0 ** -j) for j in range(2, 30)]
    assert 0.5 < min(vals) and max(vals) < 1.0
    with pytest.raises(ValueError):
        dyadic_harmonic_sum(0.2)


def test_regular_weights():
    for w in regular_weight_family():
        assert w.is_regular
    with pytest.raises(InvalidWeight):
        RegularWeight(lambda x: x, label="increasing")
    w = RegularWeight(lambda x: x, strict=False)
    assert not w.flags["decreasing"] and w.flags["half_doubling"]
    # 1/x^2 is not doubling
    assert not RegularWeight(lambda x: x ** -2.0, strict=False).flags["doubling"]


def test_one_minus_z():
    f = OuterFunction.one_minus_z()
    np.testing.assert_allclose(f(0.3), 0.7, atol=1e-10)
    np.testing.assert_allclose(f(-0.5j), 1 + 0.5j, atol=1e-10)
    np.testing.assert_allclose(f.derivative(0.2 + 0.1j), -1.0, atol=1e-8)
    np.testing.assert_allclose(f.geometric_mean(), 1.0, rtol=1e-9)


def test_outer_of_a_power_weight():
    w = RegularWeight(lambda x: (x / np.pi) ** 0.25, strict=False)
    f = OuterFunction.from_weight(w)
    # log|f(0)| is the mean of log w = -1/4
    np.testing.assert_allclose(f.geometric_mean(), np.exp(-0.25), rtol=1e-9)
    np.testing.assert_allclose(abs(f(0.0)), np.exp(-0.25), rtol=1e-9)
    # boundary values are approached along radii
    np.testing.assert_allclose(abs(f((1 - 1e-7) * np.exp(2j))), w(2.0), rtol=1e-4)


def test_constant_outer_function():
    f = OuterFunction(lambda x: np.full_like(x, 3.0), singular_at_zero=False)
    np.testing.assert_allclose(f(0.5 + 0.5j), 3.0, rtol=1e-12)
    np.testing.assert_allclose(abs(f.derivative(0.5j)), 0.0, atol=1e-10)


def test_non_integrable_log():
    with pytest.raises(NonIntegrableLog):
        OuterFunction(lambda x: np.exp(-1 / x))


@pytest.mark.parametrize("theta", [0.0, 1e-9, 1.0, np.pi, -3.14159])
def test_local_integral_of_one_minus_z(theta):
    val, err = local_dirichlet_rs(OuterFunction.one_minus_z(), theta, return_error=True)
    np.testing.assert_allclose(val, 1.0, rtol=1e-9)
    assert err < 1e-9


def test_local_integral_failures():
    f = OuterFunction(lambda x: (x / np.pi) ** 0.25)
    with pytest.raises(NotConverged):
        local_dirichlet_rs(f, 0.0)
    g = OuterFunction(lambda x: (np.pi / x) ** 0.25)
    with pytest.raises(UndefinedBoundaryValue):
        local_dirichlet_rs(g, 0.0)


@pytest.mark.parametrize("mu", [Measure.lebesgue(), Measure.dirac(1.0),
                                Measure.dirac(-2.0, 0.5) + Measure.lebesgue(2.0)])
def test_energy_of_one_minus_z_is_the_total_mass(mu):
    np.testing.assert_allclose(dirichlet_energy_rs(mu, OuterFunction.one_minus_z()),
                               mu.total_mass, rtol=1e-9)
    np.testing.assert_allclose(dirichlet_energy_douglas(mu, [1.0, -1.0]), mu.total_mass,
                               rtol=1e-9)


def test_area_route_of_a_quadratic():
    # D_m(z^2) = 2 for normalized Lebesgue; at an atom, D_zeta(z^2) = |z + zeta|^2 averaged = 2
    for mu in (Measure.lebesgue(), Measure.dirac(0.4)):
        np.testing.assert_allclose(dirichlet_energy_douglas(mu, [0.0, 0.0, 1.0]), 2.0, rtol=1e-9)
    with pytest.raises(NotImplementedError):
        dirichlet_energy_douglas(Measure.cantor_measure(depth=4), [0.0, 1.0])


def test_fmu_report_for_an_atom():
    rep = fmu_report(Measure.dirac(0.0))
    np.testing.assert_array_equal(rep.f, 1.0)
    assert rep.monotone and rep.over_x2_decreasing
    np.testing.assert_allclose(rep.mass_ratio, 1.0)
    # x P(1 - x) = 2 - x
    np.testing.assert_allclose(rep.poisson_ratio, 2 - rep.x, rtol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_fmu_report_properties(seed):
    rep = fmu_report(random_measure(np.random.default_rng(seed)))
    assert rep.monotone and rep.over_x2_decreasing
    pos = rep.f > 0
    assert np.all(rep.poisson_ratio[pos] > 0)


def test_outer_lower_bound():
    consts = [outer_lower_bound_constant(1 - 2.0 ** -j) for j in (1, 4, 16)]
    assert all(1 < c < 4 for c in consts)
    for w in regular_weight_family()[:3]:
        ratios = outer_lower_bound_ratios(w, js=range(1, 9))
        assert np.all(ratios <= max(consts))


def test_norm_bound_checks_stay_below_the_baseline_constants():
    import json
    from pathlib import Path

    from dmu.boundary_set import AdmissibleWeight, ClosedSet
    from dmu.testfn import analytic_norm_bound_check, distance_norm_bound_check

    base = json.loads(Path(__file__).with_name("acceptance_baseline.json").read_text())
    cfg = base["bound_checks"]
    w = RegularWeight(lambda x: 1 / (x + 0.5), lambda x: -1 / (x + 0.5) ** 2)
    check = analytic_norm_bound_check(Measure.lebesgue(), w, n=64)
    assert 0 <= check.ratio <= cfg["analytic_ratio_bound"]
    E, psi = ClosedSet.finite([0.0]), AdmissibleWeight.power(1.0, 1 / np.pi)
    for omega in (lambda t: 1 / (t + 0.05), lambda t: np.exp(-t)):
        check = distance_norm_bound_check(Measure.lebesgue(), E, omega, psi, n=1024)
        assert 0 <= check.ratio <= cfg["distance_ratio_bound"]
