"""
Diagonal of the reproducing kernel of D(mu).

Two independent routes:

* :func:`kernel_diag_estimate` - the one-dimensional integral
  ``1 + int_{1-|z|}^1 dx / (x P[mu]((1-x) zeta) + x^2)``, comparable to
  k(z, z) with absolute constants;
* :func:`gram_kernel_oracle` - the exact kernel of the polynomials of
  degree <= N, from the Gram matrix of monomials

      <z^n, z^m> = delta_{mn} + min(m, n) mu^(m - n),

  where ``mu^(k) = int e^{-ik theta} dmu``.
"""

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.linalg import lapack

from .errors import BoundaryTooClose, EmptySupport, IllConditioned
from .measure import GUARD_BAND
from .quadrature import gauss_legendre

__all__ = [
    "KernelReport",
    "GramOracle",
    "kernel_diag_estimate",
    "kernel_diag_ray",
    "kernel_report",
    "gram_kernel_oracle",
    "monomial_gram",
    "kappa_mu",
    "zero_set_admissible",
]

DEFAULT_ORDER = 2048
ESTIMATE_RTOL = 1e-6
REFINE_CONDITION = 1e12


@dataclass(frozen=True)
class KernelReport:
    z: complex
    estimate: float
    oracle: Optional[float]
    order: Optional[int]
    quad_error: float


# ------------------------------------------------------------ estimate --

def _check_radius(r, mu=None):
    # the guard band protects Poisson evaluations; P is constant for
    # zero and uniform measures
    trivial = mu is not None and (mu.is_zero or mu.is_rotation_invariant)
    if np.any(r >= 1.0):
        raise BoundaryTooClose("|z| must be < 1")
    if not trivial and np.any(r > 1.0 - GUARD_BAND):
        raise BoundaryTooClose("|z| exceeds 1 - 2^-40")
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")


def _integrand_sums(mu, theta, breaks, orders=(16, 24)):
    """Panel sums of 1 / (x P + x^2) for each Gauss order."""
    rules = [gauss_legendre(o) for o in orders]
    left = breaks[:-1, None]
    width = np.diff(breaks)[:, None]
    xs = [left + width * x for x, _ in rules]
    flat = np.concatenate([x.ravel() for x in xs])
    if mu.is_zero:
        p = np.zeros_like(flat)
    elif mu.is_rotation_invariant:
        # P of a uniform density is constant in the disc
        p = np.full_like(flat, mu.poisson_ray(theta, np.array([0.5]))[0])
    else:
        p = mu.poisson_ray(theta, 1.0 - flat, resolution=max(float(breaks[0]), GUARD_BAND))
    out, k = [], 0
    for x, (_, w) in zip(xs, rules):
        n = x.size
        px = p[k:k + n].reshape(x.shape)
        k += n
        out.append(np.sum(width * w / (x * px + x * x), axis=1))
    return out


def kernel_diag_ray(mu, theta, radii, rtol=ESTIMATE_RTOL, max_refine=4):
    """
    Kernel estimate at ``radii * e^{i theta}`` for many radii at once.

    Returns
    -------
    values, errors : ndarray
        Estimates and the Gauss 16 / 24 discrepancy of each integral.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    _check_radius(radii, mu)
    values = np.ones(radii.shape)
    errors = np.zeros(radii.shape)
    pos = radii > 0
    if not np.any(pos):
        return values, errors
    x0 = 1.0 - radii[pos]
    lo = float(np.min(x0))
    n = int(np.ceil(np.log2(1.0 / lo)))
    breaks = np.unique(np.concatenate([np.minimum(lo * 2.0 ** np.arange(n + 1), 1.0), [1.0], x0]))
    for _ in range(max_refine + 1):
        s16, s24 = _integrand_sums(mu, theta, breaks)
        tail24 = np.concatenate([np.cumsum(s24[::-1])[::-1], [0.0]])
        dtail = np.concatenate([np.cumsum(np.abs(s16 - s24)[::-1])[::-1], [0.0]])
        idx = np.searchsorted(breaks, x0)
        val = 1.0 + tail24[idx]
        err = dtail[idx]
        if np.all(err <= rtol * val):
            break
        mids = 0.5 * (breaks[:-1] + breaks[1:])
        breaks = np.sort(np.concatenate([breaks, mids]))
    values[pos] = val
    errors[pos] = err
    return values, errors


def kernel_diag_estimate(mu, z):
    """``1 + int_{1-|z|}^1 dx / (x P[mu]((1-x) z/|z|) + x^2)``; 1 at z = 0."""
    z = complex(z)
    r = abs(z)
    _check_radius(r, mu)
    if r == 0.0:
        return 1.0
    vals, _ = kernel_diag_ray(mu, np.angle(z), [r])
    return float(vals[0])


def kernel_report(mu, z, order=None):
    z = complex(z)
    r = abs(z)
    if r == 0.0:
        est, err = 1.0, 0.0
    else:
        v, e = kernel_diag_ray(mu, np.angle(z), [r])
        est, err = float(v[0]), float(e[0])
    oracle = gram_kernel_oracle(mu, z, order) if order else None
    return KernelReport(z, est, oracle, order, err)


# -------------------------------------------------------------- oracle --

def monomial_gram(mu, N):
    """Gram matrix ``G[m, n] = <z^n, z^m>`` for 0 <= m, n <= N."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    moments = mu.fourier_moments(N)
    idx = np.arange(N + 1)
    diff = idx[:, None] - idx[None, :]
    mom = np.where(diff >= 0, moments[np.abs(diff)], np.conj(moments[np.abs(diff)]))
    G = np.minimum(idx[:, None], idx[None, :]) * mom
    G[idx, idx] += 1.0
    return G


class GramOracle:
    """
    Cholesky factor of the monomial Gram matrix of one measure.

    ``kernel(z)`` returns the degree-N kernel; ``kernel_trace(z)`` returns
    the kernels of every degree 0..N at once.
    """

    def __init__(self, mu, N=DEFAULT_ORDER):
        self.N = int(N)
        self.gram = monomial_gram(mu, self.N)
        c, info = lapack.zpotrf(self.gram, lower=1, clean=1)
        if info != 0:
            raise IllConditioned(f"Cholesky factorization failed at column {info}", np.inf)
        self._chol = c
        anorm = float(np.max(np.sum(np.abs(self.gram), axis=0)))
        rcond, info = lapack.zpocon(c, anorm, uplo="L")
        self.condition = float(1.0 / rcond) if rcond > 0 else np.inf

    def _rhs(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(np.abs(z) >= 1):
            raise ValueError("|z| must be < 1")
        n = np.arange(self.N + 1)
        return np.conj(z)[None, :] ** n[:, None]

    def kernel_trace(self, z):
        """k_N(z, z) for N = 0..self.N (columns: points)."""
        y = solve_triangular(self._chol, self._rhs(z), lower=True, check_finite=False)
        return np.cumsum(np.abs(y) ** 2, axis=0)

    def kernel(self, z, N=None):
        N = self.N if N is None else int(N)
        if N > self.N:
            raise ValueError(f"N = {N} exceeds factored order {self.N}")
        if N == self.N and self.condition > REFINE_CONDITION:
            vals = self._refined(z)
        else:
            vals = self.kernel_trace(z)[N]
        return vals if np.ndim(z) else float(vals[0])

    def _refined(self, z, steps=3):
        """w^H G^{-1} w with residuals accumulated in extended precision."""
        w = self._rhs(z)
        gl = self.gram.astype(np.clongdouble)
        cf = (self._chol, True)
        x = cho_solve(cf, w, check_finite=False)
        for _ in range(steps):
            r = (w.astype(np.clongdouble) - gl @ x.astype(np.clongdouble)).astype(complex)
            x = x + cho_solve(cf, r, check_finite=False)
        return np.real(np.sum(np.conj(w) * x, axis=0))


_ORACLES = {}


def _oracle_for(mu, N):
    key = (json.dumps(mu.to_dict(), sort_keys=True), int(N))
    if key not in _ORACLES:
        if len(_ORACLES) >= 8:
            _ORACLES.pop(next(iter(_ORACLES)))
        _ORACLES[key] = GramOracle(mu, N)
    return _ORACLES[key]


def gram_kernel_oracle(mu, z, N=DEFAULT_ORDER):
    """
    Exact kernel of the degree-``N`` polynomial subspace of D(mu) at ``z``.

    Raises
    ------
    IllConditioned
        If the Cholesky factorization of the Gram matrix fails.
    """
    return _oracle_for(mu, N).kernel(z)


# --------------------------------------------------------------- kappa --

def kappa_mu(mu, r, n=1 << 10, rtol=1e-4, max_n=1 << 13, return_direction=False):
    """
    Infimum of the kernel estimate at ``r zeta`` over support directions.

    The direction grid doubles until the minimum is stable to ``rtol``.
    Ties resolve to the first minimizer in angle order.
    """
    if mu.is_zero:
        raise EmptySupport("measure has empty support")
    if mu.is_rotation_invariant:
        val = kernel_diag_estimate(mu, r)
        return (val, 0.0) if return_direction else val
    prev = None
    while True:
        dirs = np.unique(mu.support_samples(n))
        vals = np.array([kernel_diag_ray(mu, t, [r])[0][0] for t in dirs])
        j = int(np.argmin(vals))
        best = (float(vals[j]), float(dirs[j]))
        if prev is not None and abs(best[0] - prev[0]) <= rtol * prev[0]:
            break
        if n >= max_n:
            break
        prev, n = best, 2 * n
    return best if return_direction else best[0]


# ----------------------------------------------------------- zero sets --

def zero_set_admissible(mu, points, cutoff=1e6):
    """
    Sum of ``1 / k(z_n, z_n)`` (kernel estimate) and whether it is below
    ``cutoff``.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0:
        return 0.0, True
    total = 0.0
    ang = np.round(np.angle(pts), 15)
    for a in np.unique(ang):
        sel = ang == a
        vals, _ = kernel_diag_ray(mu, a, np.abs(pts[sel]))
        total += float(np.sum(1.0 / vals))
    return total, total < cutoff


def zero_set_prefix_sums(mu, points):
    """Prefix sums of ``1 / k(z_n, z_n)`` in the given order."""
    pts = np.asarray(points, dtype=complex).ravel()
    terms = np.empty(pts.size)
    ang = np.round(np.angle(pts), 15)
    for a in np.unique(ang):
        sel = ang == a
        vals, _ = kernel_diag_ray(mu, a, np.abs(pts[sel]))
        terms[sel] = 1.0 / vals
    return np.cumsum(terms)
