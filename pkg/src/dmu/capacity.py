"""
Capacity of boundary sets for D(mu).

Kernel-based routes (arc estimate, point dichotomy, polarity criteria) are
checked against :func:`capacity_qp_oracle`, a direct minimization of the
discretized energy over piecewise-linear functions that are >= 1 on the
target.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .boundary_set import ClosedSet, AdmissibleWeight, local_modulus, m_psi
from .divergence import TraceClass, classify_trace
from .errors import (
    AdmissibilityFailed,
    FitFailed,
    Inconclusive,
    InvalidArcLength,
    InvalidWeight,
    KappaBounded,
    MajorantViolated,
    NotConverged,
    PreconditionFailed,
)
from .kernel import kappa_mu, kernel_diag_estimate, kernel_diag_ray
from .quadrature import TWO_PI, gauss_legendre

__all__ = [
    "CapacityReport",
    "PointCapacity",
    "classify_trace",
    "arc_capacity_estimate",
    "point_capacity_test",
    "polar_test",
    "polar_test_alpha_gt2",
    "covering_criterion",
    "fit_power_majorant",
    "DirichletForm",
    "capacity_qp_oracle",
]

POINT_TRACE_J = np.arange(4, 41)
POLAR_TRACE_J = np.arange(1, 41)
COVERING_J = np.arange(3, 21)
COVERING_SLOPE = -0.25
MAJORANT_RTOL = 1e-9
MAJORANT_GRID = np.pi * 2.0 ** -np.arange(0, 31)
FIT_J = np.arange(4, 17)
FIT_RESIDUAL = 0.25


@dataclass(frozen=True)
class CapacityReport:
    """
    ``polar`` is True when a sufficient condition for zero capacity fired and
    None when the criterion was inconclusive; capacity criteria never
    certify "not polar".
    """

    target: object
    kernel_estimate: float
    qp_oracle: Optional[float] = None
    divergence: Optional[TraceClass] = None
    criterion_used: str = ""
    polar: Optional[bool] = None
    trace: Optional[np.ndarray] = None
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PointCapacity:
    positive: bool
    classification: TraceClass
    trace: np.ndarray
    cutoffs: np.ndarray

    @property
    def label(self):
        return "positive" if self.positive else "zero"


# ----------------------------------------------------------- estimates --

def arc_capacity_estimate(mu, center, length):
    """``1 / k((1 - L) e^{i center})`` for an arc of normalized length L in (0, 1)."""
    length = float(length)
    if not 0.0 < length < 1.0:
        raise InvalidArcLength("arc length must lie in (0, 1)")
    return 1.0 / kernel_diag_estimate(mu, (1.0 - length) * np.exp(1j * center))


def point_capacity_test(mu, theta):
    """
    Zero or positive capacity of the point ``e^{i theta}``.

    The trace holds the kernel estimate at radii ``1 - 2^-j``, j = 4..40,
    which is the integral of the point criterion truncated at each radius.

    Raises
    ------
    Inconclusive
        If the divergence detector cannot classify the trace.
    """
    radii = 1.0 - 2.0 ** -POINT_TRACE_J.astype(float)
    trace, _ = kernel_diag_ray(mu, theta, radii)
    cls = classify_trace(trace)
    return PointCapacity(not cls.divergent, cls, trace, radii)


# ----------------------------------------------------------- polarity --

def fit_power_majorant(mu, E, grid=MAJORANT_GRID):
    """
    Smallest ``c t^p`` above the sampled local modulus, with ``p`` from a
    least-squares fit clamped to [0.01, 1.99] so the weight stays admissible
    with alpha < 2.
    """
    rho = local_modulus(mu, E, grid)
    pos = rho > 0
    if np.count_nonzero(pos) >= 2:
        p = np.polyfit(np.log(grid[pos]), np.log(rho[pos]), 1)[0]
    else:
        p = 1.0
    p = float(np.clip(p, 0.01, 1.99))
    c = float(np.max(rho / grid ** p)) * (1 + 1e-6)
    if c <= 0:
        c = 1e-300
    return AdmissibleWeight.power(p, c)


def _polar_trace(E, psi, js):
    """T(j) = int_{2^-j}^{pi} dt / M(t) on dyadic panels split at kinks of M."""
    lo = 2.0 ** -float(js[-1])
    br = [np.pi, 1.0, *2.0 ** -np.arange(1, js[-1] + 1.0)]
    lengths, _ = E.gap_lengths
    kinks = 0.5 * lengths[(0.5 * lengths > lo) & (0.5 * lengths < np.pi)]
    br = np.unique(np.concatenate([np.array(br), kinks]))
    xg, wg = gauss_legendre(16)
    left = br[:-1, None]
    width = np.diff(br)[:, None]
    t = left + width * xg
    vals = 1.0 / m_psi(E, psi, t.ravel()).reshape(t.shape)
    panel = np.sum(width * wg * vals, axis=1)
    tail = np.concatenate([np.cumsum(panel[::-1])[::-1], [0.0]])
    idx = np.searchsorted(br, 2.0 ** -js.astype(float))
    return tail[idx]


def polar_test(mu, E, psi=None):
    """
    Sufficient condition for ``c_mu(E) = 0``: divergence of
    ``int_0^pi dt / M(t)`` with ``M(s) = max(int_0^s psi(t)/t N_E(t) dt,
    psi(s)/s |E_s|)``, where ``psi`` majorizes the local modulus of mu on E.

    Raises
    ------
    AdmissibilityFailed
        If ``psi`` fails its shape checks or has alpha >= 2.
    MajorantViolated
        If ``psi`` does not dominate the local modulus on the test grid.
    """
    if psi is None:
        psi = fit_power_majorant(mu, E)
        label = f"fitted majorant {psi.label}"
    else:
        label = psi.label
    if psi.alpha >= 2:
        raise AdmissibilityFailed(f"alpha = {psi.alpha} must be < 2")
    try:
        psi.validate()
    except InvalidWeight as exc:
        raise AdmissibilityFailed(str(exc)) from None
    rho = local_modulus(mu, E, MAJORANT_GRID)
    bound = psi(MAJORANT_GRID)
    # arc masses are CDF differences: allow their absolute round-off
    slack = 16 * np.finfo(float).eps * mu.total_mass
    bad = rho > bound * (1 + MAJORANT_RTOL) + slack
    if np.any(bad):
        t = MAJORANT_GRID[np.argmax(bad)]
        raise MajorantViolated(f"local modulus exceeds psi at t = {t:.3e}")
    trace = _polar_trace(E, psi, POLAR_TRACE_J)
    try:
        cls = classify_trace(trace)
    except Inconclusive:
        cls = None
    polar = True if cls is not None and cls.divergent else None
    return CapacityReport(
        target=E,
        kernel_estimate=float(1.0 / trace[-1]),
        divergence=cls,
        criterion_used="majorant integral test",
        polar=polar,
        trace=trace,
        details={"psi": label, "alpha": psi.alpha},
    )


def polar_test_alpha_gt2(mu, E, K=None, h=None):
    """
    Polarity of a Lebesgue-null ``E`` contained in ``K`` when the local
    modulus of mu on ``K`` decays faster than ``t^2``.

    The exponent comes from a least-squares fit of ``log rho`` against
    ``log t`` over ``t = 2^-j``, j = 4..16.  An identically zero modulus
    gives exponent +inf.  The auxiliary weight ``h`` (default
    ``s log^2(1/s)``) has finite ``int_0 ds / h``; its tail integral is
    reported.

    Raises
    ------
    PreconditionFailed
        If ``E`` has positive length (its capacity is at least |E| / 2pi)
        or is not contained in ``K``.
    FitFailed
        If the exponent cannot be certified > 2.
    """
    K = E if K is None else K
    if E.lebesgue_measure > 0:
        raise PreconditionFailed("E has positive length, so its capacity is positive")
    if K is not E and np.max(K.distance(E.points_on_set(1 << 10))) > 1e-12:
        raise PreconditionFailed("E is not contained in K")
    t = 2.0 ** -FIT_J.astype(float)
    rho = local_modulus(mu, K, t)
    if np.all(rho == 0):
        exponent, resid = np.inf, 0.0
    elif np.any(rho <= 0):
        raise FitFailed("local modulus vanishes on part of the window only")
    else:
        coef, res, *_ = np.polyfit(np.log(t), np.log(rho), 1, full=True)
        exponent = float(coef[0])
        resid = float(np.sqrt(res[0] / t.size)) if res.size else 0.0
    if not (exponent > 2 and resid < FIT_RESIDUAL):
        raise FitFailed(f"fitted exponent {exponent:.3f} (residual {resid:.3f}) is not > 2")
    if h is None:
        def h(s):
            return s * np.log(1.0 / s) ** 2
    s0 = 2.0 ** -FIT_J[-1]
    xg, wg = gauss_legendre(16)
    br = 2.0 ** -np.arange(60.0, FIT_J[-1] - 1, -1.0)
    left, width = br[:-1, None], np.diff(br)[:, None]
    tail = float(np.sum(width * wg / h(left + width * xg)))
    return CapacityReport(
        target=E,
        kernel_estimate=0.0,
        criterion_used="modulus exponent > 2",
        polar=True,
        details={"exponent": exponent, "residual": resid,
                 "h_tail_integral": tail, "h_cutoff": s0},
    )


def covering_criterion(mu, E):
    """
    Polarity from ``n_E(eps) = o(kappa(1 - eps))``.

    The ratio ``n_E(2^-j) / kappa(1 - 2^-j)`` for j = 3..20 is declared to
    tend to 0 when the slope of log ratio against log j over the last five
    samples is below -0.25.

    Raises
    ------
    KappaBounded
        If the kappa trace converges.
    Inconclusive
        If the kappa trace cannot be classified.
    """
    radii = 1.0 - 2.0 ** -COVERING_J.astype(float)
    kappa = np.array([kappa_mu(mu, r) for r in radii])
    cls = classify_trace(kappa)
    if not cls.divergent:
        raise KappaBounded(f"kappa converges to {cls.value:.6g}")
    counts = np.array([E.covering_number(2.0 ** -float(j)) for j in COVERING_J])
    ratio = counts / kappa
    slope = float(np.polyfit(np.log(COVERING_J[-5:]), np.log(ratio[-5:]), 1)[0])
    polar = True if slope < COVERING_SLOPE else None
    return CapacityReport(
        target=E,
        kernel_estimate=float(ratio[-1]),
        divergence=cls,
        criterion_used="covering number against kappa",
        polar=polar,
        trace=ratio,
        details={"slope": slope, "kappa": kappa, "covering": counts},
    )


# ---------------------------------------------------------------- QP --

def _panel_moments(n, order=20):
    """
    M(d) for d = 0..n-1: integrals of [(1-s)^2, s(1-s), s^2] against the
    chord kernel of the panel d steps ahead, in normalized arc measure.
    Entries multiplying an identically zero difference are set to 0.
    """
    h = TWO_PI / n
    x, w = gauss_legendre(order)
    d = np.arange(n)[:, None]
    with np.errstate(divide="ignore"):
        ker = (h / TWO_PI) / (4.0 * np.sin(0.5 * h * (d + x)) ** 2)
    m00 = ker @ (w * (1 - x) ** 2)
    m01 = ker @ (w * x * (1 - x))
    m11 = ker @ (w * x * x)
    m00[0] = m01[0] = 0.0
    m11[-1] = m01[-1] = 0.0
    return m00, m01, m11


class DirichletForm:
    """
    Quadratic form ``u -> ||u||^2_{L2} + D_mu(u)`` for piecewise-linear
    ``u`` on the uniform grid ``-pi + 2pi j / n``.

    ``D_mu(u) = sum_j mu_j D_j(u)`` where ``mu_j`` is the mass of the cell
    around node j and ``D_j`` is the local Dirichlet integral at node j,
    integrated exactly in the piecewise-linear values with a Gauss rule for
    the chord kernel on each panel.
    """

    def __init__(self, mu, n=1 << 12):
        if n < 8 or n & (n - 1):
            raise ValueError("n must be a power of two >= 8")
        self.n = n
        self.h = TWO_PI / n
        self.theta = -np.pi + self.h * np.arange(n)
        self.mu_j = np.atleast_1d(mu.arc_mass(self.theta, 0.5 * self.h)) if not mu.is_zero \
            else np.zeros(n)
        m00, m01, m11 = _panel_moments(n)
        c = m00.copy()
        c[1:] += m11[:-1]
        c[0] = 0.0
        m = m01
        rho = c + m + np.roll(m, 1)
        rho[0] = 0.0
        self._sigma = float(np.sum(c) + 2 * np.sum(m))
        fmu = np.fft.rfft(self.mu_j)
        self._A = np.fft.irfft(np.fft.rfft(c) * fmu, n)
        self._w = np.fft.irfft(np.fft.rfft(m) * fmu, n)
        self._frho = np.fft.rfft(rho)
        self._mass = self.h / TWO_PI

    def matvec(self, u):
        """``H u`` with ``Q(u) = u^T H u``."""
        u = np.asarray(u, dtype=float)
        n = self.n
        fu = np.fft.rfft(u)
        Ru = np.fft.irfft(np.conj(self._frho) * fu, n)
        RTmu = np.fft.irfft(self._frho * np.fft.rfft(self.mu_j * u), n)
        up, um = np.roll(u, -1), np.roll(u, 1)
        out = self._A * u + self._w * up + np.roll(self._w, 1) * um
        out -= self.mu_j * Ru + RTmu
        out += self._sigma * self.mu_j * u
        out += self._mass * (2.0 / 3.0 * u + (up + um) / 6.0)
        return out

    def diagonal(self):
        return self._A + self._sigma * self.mu_j + self._mass * 2.0 / 3.0

    def energy(self, u):
        return float(np.dot(u, self.matvec(u)))

    def dirichlet(self, u):
        """The D_mu part alone."""
        u = np.asarray(u, dtype=float)
        mass = self._mass * np.sum((u * u + u * np.roll(u, -1) + np.roll(u, -1) ** 2) / 3.0)
        return self.energy(u) - float(mass)


def _target_mask(target, theta, h):
    """Nodes within h/2 of the target (closed set or list of arcs (a, b))."""
    if isinstance(target, ClosedSet):
        return target.distance(theta) <= 0.5 * h * (1 + 1e-12)
    arcs = np.asarray(target, dtype=float).reshape(-1, 2)
    mask = np.zeros(theta.size, dtype=bool)
    for a, b in arcs:
        length = np.mod(b - a, TWO_PI)
        if b != a and length == 0:
            length = TWO_PI
        off = np.mod(theta - a, TWO_PI)
        dist = np.where(off <= length, 0.0, np.minimum(off - length, TWO_PI - off))
        mask |= dist <= 0.5 * h * (1 + 1e-12)
    return mask


def _lambda_max(op, scale, n, iters=60, seed=0):
    v = np.random.default_rng(seed).standard_normal(n)
    lam = 0.0
    for _ in range(iters):
        v /= np.linalg.norm(v)
        wv = scale * op(scale * v)
        lam = float(np.dot(v, wv))
        v = wv
    return lam


@dataclass(frozen=True)
class QPResult:
    value: float
    u: np.ndarray
    iterations: int
    stationarity: float
    target_nodes: np.ndarray


def capacity_qp_oracle(mu, target, n=1 << 12, tol=1e-8, max_iter=100_000, form=None,
                       full_output=False):
    """
    Minimize ``||u||^2_mu`` over piecewise-linear ``u`` on the n-grid with
    ``u >= 1`` on target nodes and ``u >= 0`` elsewhere.

    Accelerated projected gradient (Jacobi-scaled, restarted when the
    energy increases) stops when one projected step moves no coordinate by
    more than ``tol``.

    Raises
    ------
    NotConverged
        After ``max_iter`` iterations; ``value`` carries the best energy.
    """
    F = form if form is not None else DirichletForm(mu, n)
    mask = _target_mask(target, F.theta, F.h)
    if not np.any(mask):
        res = QPResult(0.0, np.zeros(F.n), 0, 0.0, mask)
        return res if full_output else 0.0
    lower = mask.astype(float)
    dinv = 1.0 / F.diagonal()
    scale = np.sqrt(dinv)
    lip = 1.05 * _lambda_max(F.matvec, scale, F.n)
    step = dinv / lip
    u = lower.copy()
    y = u.copy()
    t = 1.0
    f_old = F.energy(u)
    it, move = 0, np.inf
    for it in range(1, max_iter + 1):
        g = F.matvec(y)
        u_new = np.maximum(y - step * g, lower)
        f_new = F.energy(u_new)
        if f_new > f_old:
            # restart momentum from the last iterate
            y, t = u.copy(), 1.0
            g = F.matvec(y)
            u_new = np.maximum(y - step * g, lower)
            f_new = F.energy(u_new)
        gu = F.matvec(u_new)
        move = float(np.max(np.abs(np.maximum(u_new - step * gu, lower) - u_new)))
        t_new = 0.5 * (1 + np.sqrt(1 + 4 * t * t))
        y = u_new + ((t - 1) / t_new) * (u_new - u)
        u, t, f_old = u_new, t_new, f_new
        if move <= tol:
            break
    else:
        raise NotConverged(f"no stationarity after {max_iter} iterations", value=f_old)
    res = QPResult(f_old, u, it, move, mask)
    return res if full_output else f_old
