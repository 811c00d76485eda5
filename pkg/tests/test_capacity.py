import numpy as np
import pytest

from dmu.boundary_set import AdmissibleWeight, ClosedSet
from dmu.capacity import (DirichletForm, arc_capacity_estimate, capacity_qp_oracle,
                          covering_criterion, point_capacity_test, polar_test,
                          polar_test_alpha_gt2)
from dmu.errors import (AdmissibilityFailed, Inconclusive, InvalidArcLength, KappaBounded,
                        MajorantViolated, PreconditionFailed)
from dmu.measure import Density, Measure

N = 1 << 10


@pytest.mark.parametrize("k", [1, 3, 8])
def test_dirichlet_form_on_trigonometric_functions(k):
    F = DirichletForm(Measure.lebesgue(), N)
    u = np.cos(k * F.theta)
    # sum over n of |n| |u_n|^2
    np.testing.assert_allclose(F.dirichlet(u), k / 2, rtol=1e-3)
    np.testing.assert_allclose(F.energy(np.ones(N)), 1.0, rtol=1e-12)


def test_local_dirichlet_integral_of_cosine_at_an_atom():
    # (cos t - 1)^2 / |e^{it} - 1|^2 = (1 - cos t) / 2 has mean 1/2
    F = DirichletForm(Measure.dirac(0.0), N)
    np.testing.assert_allclose(F.dirichlet(np.cos(F.theta)), 0.5, rtol=1e-4)


def test_form_is_symmetric_and_positive():
    F = DirichletForm(Measure.dirac(0.4) + Measure.lebesgue(0.5), 64)
    H = np.array([F.matvec(e) for e in np.eye(64)])
    np.testing.assert_allclose(H, H.T, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(H)) > 0
    np.testing.assert_allclose(np.diag(H), F.diagonal(), rtol=1e-12)


def test_qp_for_the_zero_measure_is_the_arc_length():
    # with mu = 0 the capacity of an arc is its normalized length (up to one cell)
    h = 1.0 / N
    for L in (0.05, 0.3):
        val = capacity_qp_oracle(Measure.zero(), [(-np.pi * L, np.pi * L)], n=N)
        assert L <= val <= L + 2 * h


def test_qp_is_monotone_and_subadditive():
    mu = Measure.lebesgue()
    form = DirichletForm(mu, N)
    a, b = (-1.0, -0.5), (0.2, 0.6)
    ca = capacity_qp_oracle(mu, [a], form=form)
    cb = capacity_qp_oracle(mu, [b], form=form)
    cab = capacity_qp_oracle(mu, [a, b], form=form)
    big = capacity_qp_oracle(mu, [(-1.0, 0.6)], form=form)
    assert max(ca, cb) <= cab * (1 + 1e-6)
    assert cab <= (ca + cb) * (1 + 1e-6)
    assert cab <= big * (1 + 1e-6)


def test_qp_full_output():
    res = capacity_qp_oracle(Measure.lebesgue(), ClosedSet.finite([0.0]), n=N, full_output=True)
    assert np.all(res.u >= res.target_nodes - 1e-12)
    assert res.stationarity <= 1e-8
    assert capacity_qp_oracle(Measure.lebesgue(), ClosedSet.finite([0.0]), n=N) == res.value


def test_arc_capacity_estimate():
    np.testing.assert_allclose(arc_capacity_estimate(Measure.zero(), 0.0, 0.25), 0.25)
    with pytest.raises(InvalidArcLength):
        arc_capacity_estimate(Measure.zero(), 0.0, 1.0)


def test_point_capacity_dichotomy():
    assert not point_capacity_test(Measure.lebesgue(), 0.3).positive
    assert point_capacity_test(Measure.dirac(0.3), 0.3).positive
    assert not point_capacity_test(Measure.dirac(0.3), 1.0).positive
    # rho ~ t^0.4 near 0 keeps the point of positive capacity
    mu = Measure(density=Density.power_gap(-0.6, points=[0.0]))
    assert point_capacity_test(mu, 0.0).label == "positive"
    with pytest.raises(Inconclusive):
        point_capacity_test(Measure(density=Density.power_gap(-0.5, points=[0.0])), 0.0)


def test_polar_test():
    E = ClosedSet.finite([0.0, 1.0])
    rep = polar_test(Measure.lebesgue(), E, AdmissibleWeight.power(1.0, 1 / np.pi))
    assert rep.polar is True and rep.divergence.divergent
    assert polar_test(Measure.lebesgue(), E).polar is True
    with pytest.raises(MajorantViolated):
        polar_test(Measure.lebesgue(), E, AdmissibleWeight.power(1.0, 0.1))
    with pytest.raises(AdmissibilityFailed):
        polar_test(Measure.lebesgue(), E, AdmissibleWeight.power(2.5))
    # a Dirac mass at the point keeps the capacity positive: never certified polar
    assert polar_test(Measure.dirac(0.0), ClosedSet.finite([0.0])).polar is None


def test_polar_test_fast_decay():
    K = ClosedSet.cantor(1 / 3, 12)
    mu = Measure(density=Density.power_gap(1.5, closed_set=K))
    E = ClosedSet.finite(K.gap_endpoints()[:4])
    rep = polar_test_alpha_gt2(mu, E, K)
    assert rep.polar and rep.details["exponent"] > 2
    with pytest.raises(PreconditionFailed):
        polar_test_alpha_gt2(mu, ClosedSet.from_gaps([(0.0, 1.0)]))


def test_covering_criterion():
    E = ClosedSet.finite([0.0, 2.0])
    rep = covering_criterion(Measure.lebesgue(), E)
    assert rep.polar is True and rep.details["slope"] < -0.25
    with pytest.raises(KappaBounded):
        covering_criterion(Measure.dirac(0.0), E)
