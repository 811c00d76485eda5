import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmu.errors import BoundaryTooClose, InvariantViolation, OrderTooLarge, ParseError
from dmu.measure import CantorPart, Density, Measure
from dmu.testfn import random_measure


def test_lebesgue_arc_mass_and_modulus():
    mu = Measure.lebesgue()
    for s in (1e-9, 0.3, 2.0):
        np.testing.assert_allclose(mu.arc_mass(1.0, s), s / np.pi, rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(mu.modulus_of_continuity(s), s / np.pi, rtol=1e-6)
    np.testing.assert_allclose(mu.arc_mass(0.0, np.pi), 1.0, rtol=1e-14)


def test_closed_arcs_count_atoms_on_their_end_points():
    mu = Measure.dirac(0.5, 2.0)
    assert mu.arc_mass(0.0, 0.5) == 2.0
    assert mu.arc_mass(0.0, 0.4999) == 0.0
    # arcs wrap across pi
    assert Measure.dirac(np.pi).arc_mass(-3.0, 0.2) == 1.0


@pytest.mark.parametrize("r", [0.0, 0.5, 0.99, 1 - 2.0 ** -30])
def test_poisson_closed_forms(r):
    np.testing.assert_allclose(Measure.lebesgue().poisson(r), 1.0, rtol=1e-10)
    np.testing.assert_allclose(Measure.dirac(0.0).poisson(r), (1 + r) / (1 - r), rtol=1e-12)


def test_poisson_of_power_gap_density():
    # P[d^beta](0) is the mean of |t|^beta: pi^beta / (beta + 1)
    beta = -0.5
    mu = Measure(density=Density.power_gap(beta, points=[0.0]))
    np.testing.assert_allclose(mu.total_mass, np.pi ** beta / (beta + 1), rtol=1e-9)
    np.testing.assert_allclose(mu.poisson(0.0), mu.total_mass, rtol=1e-12)


def test_poisson_guard_band():
    with pytest.raises(BoundaryTooClose):
        Measure.dirac(1.0).poisson(1 - 2.0 ** -41)


def test_f_mu_closed_forms():
    for x in (1e-4, 0.1, 1.0):
        assert Measure.dirac(0.0).f_mu(x) == 1.0
        exact = x / np.pi * np.arctan(np.pi / x)
        np.testing.assert_allclose(Measure.lebesgue().f_mu(x), exact, rtol=1e-9)


def test_cantor_moments_match_atoms():
    part = CantorPart(0.3, 10, 1.5, (-1.0, 1.2))
    ks = np.arange(0, 40)
    direct = np.exp(-1j * np.outer(ks, part.atoms())).sum(axis=1) * part.mass / 2 ** 10
    np.testing.assert_allclose(part.moments(ks), direct, atol=1e-12)


def test_fourier_moments_of_density():
    mu = Measure(density=Density.samples([1.0, 3.0, 1.0, 3.0]))
    np.testing.assert_allclose(mu.fourier_moment(0), 2.0, rtol=1e-12)
    # piecewise linear interpolant: no odd frequencies except multiples of 2
    np.testing.assert_allclose(abs(mu.fourier_moment(1)), 0.0, atol=1e-12)
    np.testing.assert_allclose(mu.fourier_moment(-3), np.conj(mu.fourier_moment(3)))
    with pytest.raises(OrderTooLarge):
        mu.fourier_moment(10 ** 5)


def test_cantor_invariants():
    with pytest.raises(InvariantViolation):
        CantorPart(0.5, 4, 1.0, (-1.0, 1.0))
    with pytest.raises(InvariantViolation):
        CantorPart(0.3, 0, 1.0, (-1.0, 1.0))
    mu = Measure.cantor_measure(depth=12)
    np.testing.assert_allclose(mu.arc_mass(0.0, np.pi / 2), 1.0)
    # the middle third is a gap
    assert mu.arc_mass(0.0, np.pi / 6 - 1e-9) == 0.0


def test_measure_invariants_and_parsing():
    with pytest.raises(InvariantViolation):
        Measure.dirac(0.0, -1.0)
    with pytest.raises(InvariantViolation):
        Density.power_gap(-1.0, points=[0.0])
    with pytest.raises(ParseError):
        Measure.from_dict({"atomz": []})
    with pytest.raises(ParseError):
        Measure.from_dict({"density": {"kind": "nope"}})


@pytest.mark.parametrize("seed", range(10))
def test_dict_round_trip(seed):
    mu = random_measure(np.random.default_rng(seed))
    back = Measure.from_dict(json.loads(json.dumps(mu.to_dict())))
    np.testing.assert_allclose(back.total_mass, mu.total_mass, rtol=1e-14)
    np.testing.assert_allclose(back.arc_mass(0.3, 0.7), mu.arc_mass(0.3, 0.7), rtol=1e-14)


@given(seed=st.integers(0, 10 ** 6), c=st.floats(-np.pi, np.pi),
       s=st.floats(0.0, 3.0), r=st.floats(0.0, 0.95))
@settings(max_examples=40, deadline=None)
def test_measure_properties(seed, c, s, r):
    mu = random_measure(np.random.default_rng(seed))
    total = mu.total_mass
    m = mu.arc_mass(c, s)
    assert -1e-12 <= m <= total * (1 + 1e-9)
    assert mu.arc_mass(c, s + 0.1) >= m - 1e-9 * total
    # complementary closed arcs cover the circle
    rest = mu.arc_mass(c + np.pi, np.pi - s)
    assert m + rest >= total * (1 - 1e-9)
    # mean of the Poisson integral over a circle is the total mass
    th = -np.pi + 2 * np.pi * np.arange(64) / 64
    assert mu.poisson(r * np.exp(1j * c)) > 0
    if r < 0.5:
        mean = np.mean([mu.poisson(r * np.exp(1j * t)) for t in th])
        np.testing.assert_allclose(mean, total, rtol=1e-6)
