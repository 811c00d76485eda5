"""
Outer test functions and their Dirichlet energies.

``f_w`` is the outer function with boundary modulus ``w(|t|)``:

    log f(z) = int (e^{it} + z) / (e^{it} - z) log w(|t|) dt / 2pi.

Energies are computed two independent ways:

* Richter-Sundberg: the local Dirichlet integral at a boundary point from
  boundary values alone, integrated against mu;
* Douglas: the area integral ``int_D |f'|^2 P[mu] dA`` in polar coordinates.
"""

from dataclasses import dataclass

import numpy as np

from .boundary_set import m_psi
from .errors import (
    BoundaryTooClose,
    InvalidWeight,
    NonIntegrableLog,
    NotConverged,
    UndefinedBoundaryValue,
)
from .quadrature import TWO_PI, graded_breaks, panel_rule, wrap_angle

__all__ = [
    "RegularWeight",
    "OuterFunction",
    "outer_eval",
    "local_dirichlet_rs",
    "dirichlet_energy_rs",
    "dirichlet_energy_douglas",
    "harmonic_measure_arc",
    "dyadic_harmonic_sum",
    "analytic_norm_bound_check",
    "distance_norm_bound_check",
    "regular_weight_family",
    "BoundCheck",
    "FmuReport",
    "fmu_report",
    "random_measure",
    "outer_lower_bound_constant",
    "outer_lower_bound_ratios",
]

EVAL_GUARD = 2.0 ** -30
SINGULAR_WIDTH = 1e-7
RS_WIDTH = 1e-10
DOUGLAS_DEPTH = 24
SHALLOW_WIDTH = 2.0 ** -20


# ------------------------------------------------------------- weights --

class RegularWeight:
    """
    Positive boundary modulus ``w`` on (0, pi] with sampled flags:

    * ``decreasing``, ``convex``;
    * ``doubling``: ``w(x) <= 2 w(2x)``;
    * ``half_doubling``: ``w(2x) <= 2 w(x)``;
    * ``derivative_growth``: ``x^2 |w'(x)|`` nondecreasing.

    The weight is regular when all flags except ``half_doubling`` hold.
    ``strict=True`` raises :class:`InvalidWeight` for a non-regular weight.
    """

    def __init__(self, w, dw=None, label="custom", strict=True, singular_at_zero=None):
        self._w = w
        self._dw = dw
        self.label = label
        x = np.pi * 2.0 ** -np.linspace(0, 30, 601)
        v = self(x)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise InvalidWeight("w must be finite and positive on (0, pi]")
        if singular_at_zero is None:
            with np.errstate(divide="ignore", over="ignore"):
                lw = np.log(self(np.array([1e-300, 1e-30])))
            singular_at_zero = not (np.all(np.isfinite(lw)) and abs(lw[0] - lw[1]) < 1)
        self.singular_at_zero = bool(singular_at_zero)
        self.flags = self._flags()
        if strict and not self.is_regular:
            bad = [k for k, ok in self.flags.items() if not ok and k != "half_doubling"]
            raise InvalidWeight(f"weight {label!r} fails: {', '.join(bad)}")

    def __call__(self, x):
        return self._w(np.asarray(x, dtype=float))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self._dw is not None:
            return self._dw(x)
        h = 1e-5 * x
        return (self(x + h) - self(x - h)) / (2 * h)

    def _flags(self):
        x = np.pi * 2.0 ** -np.linspace(0, 30, 601)[::-1]
        v = self(x)
        half = x[x <= np.pi / 2]
        d = np.abs(self.derivative(x))
        g = x * x * d
        lin = np.linspace(x[0], np.pi, 4097)
        lv = self(lin)
        sec = lv[:-2] - 2 * lv[1:-1] + lv[2:]
        rel = 1e-9
        return {
            "decreasing": bool(np.all(np.diff(v) <= rel * np.abs(v[1:]))),
            "convex": bool(np.all(sec >= -rel * np.max(np.abs(lv)))),
            "doubling": bool(np.all(self(half) <= 2 * self(2 * half) * (1 + rel))),
            "half_doubling": bool(np.all(self(2 * half) <= 2 * self(half) * (1 + rel))),
            "derivative_growth": bool(np.all(np.diff(g) >= -1e-6 * np.abs(g[1:]))),
        }

    @property
    def is_regular(self):
        return all(v for k, v in self.flags.items() if k != "half_doubling")

    def sup(self, n=1 << 14):
        x = np.pi * 2.0 ** -np.linspace(0, 40, n)
        return float(np.max(self(x)))


def regular_weight_family():
    """Five decreasing regular weights used by the lower-bound checks."""
    return [
        RegularWeight(lambda x: np.ones_like(x), lambda x: np.zeros_like(x), "1"),
        RegularWeight(lambda x: (np.pi / x) ** 0.25,
                      lambda x: -0.25 * (np.pi / x) ** 0.25 / x, "(pi/x)^(1/4)"),
        RegularWeight(lambda x: np.log(np.e ** 2 * np.pi / x), lambda x: -1.0 / x,
                      "log(e^2 pi/x)"),
        RegularWeight(lambda x: 1 + (np.pi / x) ** (1 / 3),
                      lambda x: -(1 / 3) * (np.pi / x) ** (1 / 3) / x, "1+(pi/x)^(1/3)"),
        RegularWeight(lambda x: 1.0 / (x + 0.05), lambda x: -1.0 / (x + 0.05) ** 2,
                      "1/(x+0.05)"),
    ]


# ------------------------------------------------------ outer functions --

def _phi2(x):
    """``e^x - 1 - x`` without cancellation for small x."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-3
    xs = np.where(small, x, 0.0)
    series = xs * xs * (0.5 + xs * (1 / 6 + xs * (1 / 24 + xs / 120)))
    with np.errstate(over="ignore"):
        direct = np.expm1(np.where(small, 0.0, x)) - np.where(small, 0.0, x)
    return np.where(small, series, direct)


class OuterFunction:
    """
    Outer function with boundary modulus ``w(|t|)``, t in (-pi, pi].

    Parameters
    ----------
    w : callable
        Positive modulus on (0, pi]; may vanish or blow up at 0 as long as
        ``log w`` is integrable.
    foci : sequence of float
        Extra angles where ``w(|t|)`` is not smooth.
    singular_at_zero : bool
        Whether ``log w`` is unbounded at 0; enables panel refinement there.
    """

    def __init__(self, w, label="custom", foci=(), singular_at_zero=True):
        self._w = w
        self.label = label
        self.foci = np.atleast_1d(np.asarray(foci, dtype=float))
        self.singular_at_zero = bool(singular_at_zero)
        self._check_log()

    @classmethod
    def from_weight(cls, weight):
        return cls(weight._w, weight.label, singular_at_zero=weight.singular_at_zero)

    @classmethod
    def one_minus_z(cls):
        """``1 - z``: modulus ``|2 sin(t/2)|``."""
        return cls(lambda t: np.abs(2 * np.sin(0.5 * t)), "1-z", singular_at_zero=True)

    def modulus(self, t):
        """Boundary modulus ``w(|t|)``."""
        return self._w(np.abs(wrap_angle(t)))

    def _log_modulus(self, t):
        with np.errstate(divide="ignore"):
            return np.log(self.modulus(t))

    def _check_log(self):
        x = 2.0 ** -np.arange(1, 61, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lw = np.log(self._w(x))
        if not np.all(np.isfinite(lw)):
            raise NonIntegrableLog("w vanishes or is infinite near 0")
        # integrable when |log w| grows at most like a power of log(1/x)
        ratio = np.abs(lw) / np.log(1 / x)
        if ratio[-1] > 1e3 or (ratio[-1] > 10 and ratio[-1] > 1.5 * ratio[-11]):
            raise NonIntegrableLog("log w grows faster than a multiple of log(1/x) at 0")
        grid = np.linspace(1e-6, np.pi, 2001)
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log(self._w(grid))
        if not np.all(np.isfinite(lg)):
            raise NonIntegrableLog("w must be positive and finite on (0, pi]")

    def geometric_mean(self):
        br = graded_breaks(-np.pi, np.pi, foci=np.concatenate([[0.0], self.foci]),
                           min_width=SINGULAR_WIDTH, max_width=np.pi / 16)
        t, w = panel_rule(br, 16)
        return float(np.exp(np.sum(w * self._log_modulus(t)) / TWO_PI))

    def _nodes(self, phi, width, order=8):
        """Herglotz nodes over a 2pi window containing phi and 0 inside."""
        lo, hi, foci = _window(phi, self.foci)
        # the log singularity at 0 is weighted by a kernel of size 1/|z - 1|
        near = max(abs(float(wrap_angle(phi))) * 2 / np.pi, 8 * width)
        sing = SINGULAR_WIDTH * min(1.0, near) if self.singular_at_zero else np.pi / 64
        widths = [width, sing, np.pi / 64] + [SINGULAR_WIDTH] * self.foci.size
        br = graded_breaks(lo, hi, foci=foci, min_width=widths, max_width=np.pi / 16)
        return panel_rule(br, order)

    def ray(self, phi, radii, order=8):
        """
        ``log f`` and ``f'/f`` at ``radii * e^{i phi}``.

        Radii are grouped by ``1 - r`` in blocks of eight dyadic bands;
        each block shares one node set refined toward ``phi`` down to an
        eighth of its smallest ``1 - r``.
        """
        radii = np.atleast_1d(np.asarray(radii, dtype=float))
        if np.any(radii > 1 - EVAL_GUARD):
            raise BoundaryTooClose("|z| exceeds 1 - 2^-30")
        g0 = float(self._log_modulus(np.array([phi]))[0])
        if not np.isfinite(g0):
            g0 = 0.0
        logf = np.empty(radii.shape, dtype=complex)
        dlog = np.empty(radii.shape, dtype=complex)
        block = np.floor(-np.log2(np.maximum(1.0 - radii, 1e-300)) / 8).astype(int)
        for b in np.unique(block):
            sel = block == b
            t, w = self._nodes(phi, (1.0 - np.max(radii[sel])) / 8, order)
            g = (self._log_modulus(t) - g0) * w / TWO_PI
            eg = np.exp(1j * t) * g
            inv = 1.0 / (np.exp(1j * t)[None, :] - (radii[sel] * np.exp(1j * phi))[:, None])
            # (e + z)/(e - z) = -1 + 2e/(e - z)
            logf[sel] = g0 - np.sum(g) + 2 * (inv @ eg)
            dlog[sel] = 2 * ((inv * inv) @ eg)
        return logf, dlog

    def log(self, z):
        z = complex(z)
        if abs(z) > 1 - EVAL_GUARD:
            raise BoundaryTooClose("|z| exceeds 1 - 2^-30")
        if z == 0:
            return complex(np.log(self.geometric_mean()))
        lf, _ = self.ray(np.angle(z), [abs(z)], order=16)
        return complex(lf[0])

    def __call__(self, z):
        return complex(np.exp(self.log(z)))

    def derivative(self, z):
        z = complex(z)
        phi = np.angle(z) if z != 0 else 0.0
        lf, dl = self.ray(phi, [abs(z)], order=16)
        return complex(np.exp(lf[0]) * dl[0])


def outer_eval(f, z):
    """Value of the outer function at ``z``, |z| <= 1 - 2^-30."""
    return f(z)


# ------------------------------------------------------- local energies --

def _window(theta, extra=()):
    """
    Integration window of length 2pi centred between ``theta`` and 0, so
    that both are interior points and angles near 0 keep full precision.

    Returns ``lo, hi, foci`` with foci ``[theta, 0, +-pi inside, extra...]``.
    """
    c = 0.5 * float(theta)
    lo, hi = c - np.pi, c + np.pi
    foci = [float(theta), 0.0]
    foci.append(np.pi if c > 0 else -np.pi)
    foci += list(c + wrap_angle(np.asarray(extra, dtype=float) - c))
    return lo, hi, foci


def _rs_integrand(f, theta, t):
    w0 = float(f.modulus(np.array([theta]))[0])
    wt = f.modulus(t)
    chord = 4.0 * np.sin(0.5 * (t - theta)) ** 2
    if w0 == 0.0:
        num = wt * wt
    else:
        with np.errstate(divide="ignore"):
            u = np.log(wt) - np.log(w0)
        num = w0 * w0 * _phi2(2.0 * u)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / chord / TWO_PI
    # a node on theta itself only occurs on a panel of zero weight
    return np.where(chord > 0, out, 0.0)


def local_dirichlet_rs(f, theta, return_error=False):
    """
    Local Dirichlet integral at ``e^{i theta}`` from boundary values:

        int (|f|^2 - |f(z)|^2 - 2 |f(z)|^2 log|f/f(z)|) / |l - z|^2 dm(l).

    The numerator is evaluated as ``|f(z)|^2 (e^{2u} - 1 - 2u)`` with
    ``u = log|f/f(z)|`` through a cancellation-free series, which keeps the
    bounded integrand accurate next to ``l = z``; panels shrink
    geometrically toward ``theta``, 0 and the modulus' own singular points.

    Raises
    ------
    UndefinedBoundaryValue
        If the modulus is infinite or undefined at ``theta``.
    """
    theta = float(wrap_angle(theta))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        w0 = float(f.modulus(np.array([theta]))[0])
    if not np.isfinite(w0):
        raise UndefinedBoundaryValue(f"boundary modulus is not finite at {theta}")
    lo, hi, foci = _window(theta, f.foci)
    # resolve 0 at the scale of theta: the integrand there is ~ 1/theta^2
    scale = np.array([1.0, min(1.0, max(abs(theta), 1e-12))] + [1.0] * (len(foci) - 2))
    vals = {}
    for width in (RS_WIDTH, RS_WIDTH * 1e-4):
        br = graded_breaks(lo, hi, foci=foci, min_width=width * scale, max_width=np.pi / 32)
        for order in (16, 24):
            t, w = panel_rule(br, order)
            vals[width, order] = float(np.sum(w * _rs_integrand(f, theta, t)))
    val = vals[RS_WIDTH * 1e-4, 24]
    # a non-integrable singularity shows up as dependence on the innermost panel
    if abs(val - vals[RS_WIDTH, 24]) > 1e-8 * max(abs(val), 1.0):
        raise NotConverged(f"local integral at {theta} does not settle (infinite energy?)",
                           value=val)
    err = abs(val - vals[RS_WIDTH * 1e-4, 16])
    return (val, err) if return_error else val


def dirichlet_energy_rs(mu, f, cantor_level=8):
    """``int D_zeta(f) dmu(zeta)`` with the local integral from boundary values."""
    if mu.is_zero:
        return 0.0
    nodes, w = mu.integration_nodes(foci=np.concatenate([[0.0], f.foci]),
                                    cantor_level=cantor_level, min_width=1e-12)
    vals = np.array([local_dirichlet_rs(f, t) for t in nodes])
    return float(np.sum(w * vals))


def _poly_ray(coef, phi, radii):
    p = np.polynomial.Polynomial(coef)
    dp = p.deriv()
    z = radii * np.exp(1j * phi)
    return dp(z)


def dirichlet_energy_douglas(mu, f, depth=DOUGLAS_DEPTH, order=8, rtol=1e-3):
    """
    ``int_D |f'|^2 P[mu] dA`` (dA normalized area) in polar coordinates.

    ``f`` is an :class:`OuterFunction` (``f'`` from the differentiated
    Herglotz integral) or polynomial coefficients (``f'`` exact).  Radial
    panels are dyadic toward ``|z| = 1`` down to ``1 - 2^-depth``; the
    remaining annulus is added from the angular integral at the last
    radius, assuming power growth in ``1 - r`` fitted from the last two.
    Angular panels shrink toward 0, the atoms of mu and the singular
    points of its density.  The Gauss 8 / 6 angular discrepancy
    is the error estimate.

    Raises
    ------
    NotConverged
        If the error estimate exceeds ``rtol`` times the value; the value
        is attached.
    """
    if mu.is_zero:
        return 0.0
    if mu.cantor is not None:
        raise NotImplementedError("area route needs a measure without a Cantor part")
    is_poly = not isinstance(f, OuterFunction)
    R = 1.0 - 2.0 ** -depth
    rb = np.concatenate([[0.0], 1.0 - 2.0 ** -np.arange(1, depth + 1.0)])
    r_nodes, r_w = panel_rule(rb, order)
    R2 = 1.0 - 2.0 ** -(depth - 1)
    radii = np.concatenate([r_nodes, [R2, R]])
    # atoms make P peak at scale 1 - r; elsewhere the integrand has at
    # worst logarithmic singularities and a shallower ladder suffices
    atoms = wrap_angle(np.asarray(mu.point_angles, dtype=float))
    deep = 2.0 ** -(depth + 3)
    other = [np.pi]
    if mu.density is not None:
        other += list(mu.density.foci)
    if not is_poly:
        other += list(f.foci)
    # a singular modulus at 0 makes |f'|^2 peak there like an atom does
    zero_width = deep if (not is_poly and f.singular_at_zero) else max(deep, SHALLOW_WIDTH)
    foci = np.concatenate([atoms, [0.0], wrap_angle(np.array(other))])
    widths = np.concatenate([np.full(atoms.size, deep), [zero_width],
                             np.full(len(other), max(deep, SHALLOW_WIDTH))])
    br = graded_breaks(-np.pi, np.pi, foci=foci, min_width=widths, max_width=np.pi / 32)
    totals = []
    for a_order in (order, order - 2):
        phis, p_w = panel_rule(br, a_order)
        ang = np.zeros(radii.size)
        for phi, pw in zip(phis, p_w):
            if is_poly:
                d2 = np.abs(_poly_ray(f, phi, radii)) ** 2
            else:
                lf, dl = f.ray(phi, radii)
                d2 = np.abs(np.exp(lf) * dl) ** 2
            if mu.is_rotation_invariant:
                P = np.full(radii.size, mu.total_mass)
            else:
                P = mu.poisson_ray(phi, radii, order=8)
            ang += pw * d2 * P
        body = np.sum(r_w * r_nodes * ang[:-2])
        # remaining annulus: angular integral ~ (1 - r)^-g with g fitted
        # from the last two radii
        g = np.clip(np.log2(max(ang[-1], 1e-300) / max(ang[-2], 1e-300)), 0.0, 0.9)
        tail = ang[-1] * R * (1.0 - R) / (1.0 - g)
        totals.append((body + tail) / np.pi)
    val, err = totals[0], abs(totals[0] - totals[1])
    if err > rtol * max(abs(val), 1e-300):
        raise NotConverged(f"angular error estimate {err:.2e} exceeds tolerance", value=val)
    return float(val)


# --------------------------------------------------- harmonic measure --

def _poisson_primitive(r, theta):
    """Continuous primitive of the Poisson kernel times 2pi."""
    k = (1 + r) / (1 - r)
    n = np.round(np.asarray(theta) / TWO_PI)
    return 2 * np.arctan(k * np.tan(0.5 * (theta - n * TWO_PI))) + n * TWO_PI


def harmonic_measure_arc(r, a, b):
    """
    Harmonic measure at ``r`` of the counterclockwise arc from ``e^{ia}``
    to ``e^{ib}`` (``a <= b <= a + 2pi``).
    """
    r = float(r)
    if not 0 <= r < 1:
        raise ValueError("r must lie in [0, 1)")
    if b < a or b - a > TWO_PI * (1 + 1e-15):
        raise ValueError("need a <= b <= a + 2pi")
    return float((_poisson_primitive(r, b) - _poisson_primitive(r, a)) / TWO_PI)


def dyadic_harmonic_sum(r):
    """
    ``sum_{k=0}^{N-1} (k+1) hm(r, I_k)`` with ``I_k`` the arc from
    ``a_k`` to ``a_{k+1}``, ``a_0 = 0``, ``a_k = 2^k (1-r)`` and N the
    largest integer with ``2^N (1-r) <= pi``.
    """
    a = 1.0 - float(r)
    if not 0 < a < 0.5:
        raise ValueError("r must lie in (1/2, 1)")
    N = int(np.floor(np.log2(np.pi / a)))
    ends = np.concatenate([[0.0], a * 2.0 ** np.arange(1, N + 1)])
    return float(sum((k + 1) * harmonic_measure_arc(r, ends[k], ends[k + 1]) for k in range(N)))


# --------------------------------------------------------- norm checks --

@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    ratio: float


def analytic_norm_bound_check(mu, w, n=256):
    """
    ``D_mu(f_w)`` against ``sup F_mu |w'| * sup w`` (grid suprema over
    ``x = pi 2^-k``).  A zero right side with zero left side gives ratio 0.
    """
    f = OuterFunction.from_weight(w)
    lhs = dirichlet_energy_douglas(mu, f)
    x = np.pi * 2.0 ** -np.linspace(0, 30, n)
    F = np.array([mu.f_mu(v) for v in x])
    rhs = float(np.max(F * np.abs(w.derivative(x)))) * w.sup()
    if rhs == 0:
        ratio = 0.0 if lhs <= 1e-12 else np.inf
    else:
        ratio = lhs / rhs
    return BoundCheck(lhs, rhs, ratio)


def distance_norm_bound_check(mu, E, w, psi, n=1 << 12, route="majorant", dw=None):
    """
    ``D_mu(Omega)`` for ``Omega = w(d(., E))`` against
    ``sup |w'| M_{psi,E} * sup w``.

    The energy is the boundary double integral on the n-grid, with the
    same panel treatment as :class:`~dmu.capacity.DirichletForm`.
    ``route="log"`` uses ``sup |w'(t)| |log t| |E_t|`` instead, the
    variant for modulus exponent 2.
    """
    from .capacity import DirichletForm

    form = DirichletForm(mu, n)
    omega = w(E.distance(form.theta))
    lhs = max(form.dirichlet(omega), 0.0)
    t = np.pi * 2.0 ** -np.linspace(0, 30, 1024)
    if dw is None:
        h = 1e-5 * t
        dw_t = (w(t + h) - w(t - h)) / (2 * h)
    else:
        dw_t = dw(t)
    if route == "log":
        inner = np.abs(np.log(t)) * E.thickened_length(t)
    else:
        inner = m_psi(E, psi, t)
    sup_w = float(np.max(np.abs(w(np.concatenate([[0.0], t])))))
    rhs = float(np.max(np.abs(dw_t) * inner)) * sup_w
    if rhs == 0:
        ratio = 0.0 if lhs <= 1e-12 else np.inf
    else:
        ratio = lhs / rhs
    return BoundCheck(lhs, rhs, ratio)


# ----------------------------------------------------- F_mu properties --

@dataclass(frozen=True)
class FmuReport:
    """
    Sampled properties of ``F_mu(x) = int x^2 / (x^2 + s^2) dmu(s)``.

    ``poisson_ratio`` is ``x P[mu](1 - x) / F_mu(x)``, ``mass_ratio`` is
    ``mu([-x, x]) / F_mu(x)`` and ``doubling_slack`` is the bound
    ``(1 + 4c/(4 - c)) mu([-x, x])`` divided by ``F_mu(x)``, where c is
    the smallest growth factor with ``mu([-2^n x, 2^n x]) <= c^n mu([-x, x])``
    (NaN where c >= 4).
    """

    x: np.ndarray
    f: np.ndarray
    monotone: bool
    over_x2_decreasing: bool
    poisson_ratio: np.ndarray
    mass_ratio: np.ndarray
    doubling_slack: np.ndarray


def fmu_report(mu, x=None):
    """Evaluate the F_mu properties on ``x`` (default ``2^-j``, j = 1..20)."""
    x = 2.0 ** -np.arange(1, 21, dtype=float) if x is None else np.asarray(x, dtype=float)
    x = np.sort(x)
    F = np.array([mu.f_mu(v) for v in x])
    rtol = 1e-10
    monotone = bool(np.all(np.diff(F) >= -rtol * F[1:]))
    q = F / x ** 2
    dec = bool(np.all(np.diff(q) <= rtol * q[:-1]))
    P = np.array([mu.poisson(1.0 - v) for v in x])
    mass = np.asarray(mu.arc_mass(0.0, x), dtype=float)
    slack = np.full(x.shape, np.nan)
    for i, v in enumerate(x):
        if mass[i] <= 0:
            continue
        n = np.arange(1, int(np.ceil(np.log2(np.pi / v))) + 2)
        grown = np.asarray(mu.arc_mass(0.0, np.minimum(v * 2.0 ** n, np.pi)), dtype=float)
        c = float(np.max((grown / mass[i]) ** (1.0 / n)))
        if c < 4:
            slack[i] = (1 + 4 * c / (4 - c)) * mass[i] / F[i]
    with np.errstate(divide="ignore", invalid="ignore"):
        return FmuReport(x, F, monotone, dec, x * P / F, mass / F, slack)


def random_measure(rng):
    """
    Random finite measure: atoms, a power-gap density, an arc density,
    a Cantor measure, or atoms plus a power-gap density.
    """
    from .measure import Density, Measure

    kind = rng.integers(0, 5)
    mu = Measure.zero()
    if kind in (0, 4):
        k = int(rng.integers(1, 5))
        for t, m in zip(rng.uniform(-np.pi, np.pi, k), rng.uniform(0.1, 2.0, k)):
            mu = mu + Measure.dirac(float(t), float(m))
    if kind in (1, 4):
        pts = np.sort(rng.uniform(-np.pi, np.pi, int(rng.integers(1, 3))))
        beta = float(rng.uniform(-0.5, 2.0))
        mu = mu + Measure(density=Density.power_gap(beta, points=list(pts),
                                                    scale=float(rng.uniform(0.2, 2))))
    if kind == 2:
        a = float(rng.uniform(-np.pi, 2.0))
        mu = mu + Measure(density=Density.arc(a, a + float(rng.uniform(0.2, 1.0)),
                                              float(rng.uniform(0.5, 3))))
    if kind == 3:
        c = float(rng.uniform(-2.0, 2.0))
        mu = mu + Measure.cantor_measure(float(rng.uniform(0.2, 0.45)), depth=20,
                                         mass=float(rng.uniform(0.5, 2)),
                                         base=(c - 1.0, c + 1.0))
    if mu.is_zero:
        mu = Measure.lebesgue()
    return mu


# ------------------------------------------------ outer lower bound --

def outer_lower_bound_constant(r):
    """
    ``2^S`` with ``S = 2 sum_{k=0}^{N} (k+1) hm(r, I_k)``, the last arc
    running from ``2^N (1-r)`` to pi.  For a decreasing weight with
    ``w(x) <= 2 w(2x)`` this bounds ``w(1-r) / |f_w(r)|``.
    """
    a = 1.0 - float(r)
    N = int(np.floor(np.log2(np.pi / a)))
    ends = np.concatenate([[0.0], a * 2.0 ** np.arange(1, N + 1), [np.pi]])
    S = 2 * sum((k + 1) * harmonic_measure_arc(r, ends[k], ends[k + 1]) for k in range(N + 1))
    return float(2.0 ** S)


def outer_lower_bound_ratios(weight, js=range(1, 17)):
    """``w(1 - r) / |f_w(r)|`` at ``r = 1 - 2^-j``."""
    f = OuterFunction.from_weight(weight)
    r = 1.0 - 2.0 ** -np.asarray(list(js), dtype=float)
    lf, _ = f.ray(0.0, r, order=16)
    return weight(1.0 - r) / np.abs(np.exp(lf))
