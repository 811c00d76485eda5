import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmu.errors import BoundaryTooClose, EmptySupport
from dmu.kernel import (GramOracle, gram_kernel_oracle, kappa_mu, kernel_diag_estimate,
                        kernel_diag_ray, monomial_gram, zero_set_admissible,
                        zero_set_prefix_sums)
from dmu.measure import Measure


def test_zero_measure_gives_the_hardy_kernel_scale():
    mu = Measure.zero()
    for r in (0.5, 0.9, 1 - 2.0 ** -45):
        np.testing.assert_allclose(kernel_diag_estimate(mu, r), 1 / (1 - r), rtol=1e-10)


def test_lebesgue_closed_form():
    mu = Measure.lebesgue()
    for r in (0.3, 0.9, 1 - 1e-8):
        a = 1 - r
        exact = 1 + np.log((1 + a) / (2 * a))
        np.testing.assert_allclose(kernel_diag_estimate(mu, 1j * r), exact, rtol=1e-10)
    np.testing.assert_allclose(kernel_diag_estimate(mu, 0.9), 1 + np.log(5.5), rtol=1e-10)


def test_dirac_closed_form():
    # along the ray to the atom x P = 2 - x, so the integrand is 1 / (2 - x + x^2)
    mu = Measure.dirac(0.0)
    limit = 1 + 4 / np.sqrt(7) * np.arctan(1 / np.sqrt(7))
    np.testing.assert_allclose(kernel_diag_estimate(mu, 1 - 2.0 ** -40), limit, rtol=1e-9)
    assert kernel_diag_estimate(mu, 0.0) == 1.0


def test_ray_errors_are_small():
    mu = Measure.dirac(0.3) + Measure.lebesgue(0.5)
    vals, errs = kernel_diag_ray(mu, 0.3, 1 - 2.0 ** -np.arange(1, 30))
    assert np.all(np.diff(vals) > 0)
    assert np.all(errs <= 1e-6 * vals)


def test_guard_band():
    with pytest.raises(BoundaryTooClose):
        kernel_diag_estimate(Measure.dirac(0.0), 1 - 2.0 ** -41)
    with pytest.raises(BoundaryTooClose):
        kernel_diag_estimate(Measure.zero(), 1.0)


def test_gram_matrix_structure():
    mu = Measure.dirac(0.7, 2.0)
    G = monomial_gram(mu, 6)
    np.testing.assert_allclose(G, G.conj().T)
    # <z, z> = 1 + D_mu(z) = 1 + mu(T)
    np.testing.assert_allclose(G[1, 1], 3.0)
    assert np.all(np.linalg.eigvalsh(G) > 0)


def test_oracle_for_lebesgue_is_a_weighted_geometric_sum():
    # G = diag(1 + n), so k_N(z, z) = sum_{n <= N} |z|^{2n} / (1 + n)
    mu = Measure.lebesgue()
    z = 0.8 * np.exp(0.4j)
    n = np.arange(257)
    exact = np.sum(0.64 ** n / (1 + n))
    np.testing.assert_allclose(gram_kernel_oracle(mu, z, 256), exact, rtol=1e-12)


def test_oracle_truncated_hardy_sum():
    exact = np.sum(0.99 ** (2 * np.arange(257)))
    np.testing.assert_allclose(gram_kernel_oracle(Measure.zero(), 0.99, 256), exact, rtol=1e-12)


def test_oracle_trace_is_nondecreasing_in_degree():
    oracle = GramOracle(Measure.dirac(0.0) + Measure.lebesgue(0.3), 128)
    tr = oracle.kernel_trace(np.array([0.5, 0.9j]))
    assert np.all(np.diff(tr, axis=0) >= -1e-12)
    assert oracle.condition >= 1.0


@given(st.floats(0.0, 0.999), st.floats(0.0, 0.999), st.floats(-np.pi, np.pi))
@settings(max_examples=50, deadline=None)
def test_estimate_is_monotone_in_the_radius(r1, r2, theta):
    mu = Measure.dirac(1.0) + Measure.lebesgue(0.2)
    lo, hi = sorted((r1, r2))
    a = kernel_diag_estimate(mu, lo * np.exp(1j * theta))
    b = kernel_diag_estimate(mu, hi * np.exp(1j * theta))
    assert 1.0 <= a <= b * (1 + 1e-9)


def test_kappa():
    np.testing.assert_allclose(kappa_mu(Measure.lebesgue(), 0.9), 1 + np.log(5.5), rtol=1e-10)
    val, where = kappa_mu(Measure.dirac(0.5), 0.99, return_direction=True)
    assert where == 0.5
    np.testing.assert_allclose(val, kernel_diag_estimate(Measure.dirac(0.5), 0.99 * np.exp(0.5j)))
    with pytest.raises(EmptySupport):
        kappa_mu(Measure.zero(), 0.5)


def test_zero_sets():
    # for mu = 0 the terms are 1 - r_n
    r = 1 - 2.0 ** -np.arange(1, 30)
    total, ok = zero_set_admissible(Measure.zero(), r)
    np.testing.assert_allclose(total, np.sum(1 - r), rtol=1e-10)
    assert ok
    sums = zero_set_prefix_sums(Measure.zero(), r)
    np.testing.assert_allclose(sums[-1], total)
    assert np.all(np.diff(sums) > 0)
