"""
Weighted Sobolev spaces on (0, 2pi].

For a positive nondecreasing weight ``phi`` the space W^2(phi) carries the
norm ``||f||_2^2 + int_0^{2pi} |f'|^2 phi dx``, where ``||f||_2`` is taken
against the normalized measure dx / 2pi so constants have their own norm;
its subspace of functions
vanishing at 2pi has the explicit kernel

    L(t, s) = int_{max(t, s)}^{2pi} dx / phi(x),

and the diagonal of the full kernel is comparable to ``1 + L(a, a)``.
"""

import re
from dataclasses import dataclass

import numpy as np
from scipy import interpolate

from .divergence import classify_trace
from .errors import Inconclusive, InvalidWeight, ParseError, PreconditionFailed
from .quadrature import TWO_PI, gauss_legendre

__all__ = [
    "SobolevWeight",
    "WitnessFunction",
    "l_kernel",
    "k_diag_estimate",
    "gamma_lower_witness",
    "galerkin_kernel",
    "reproducing_pairing",
]

LOG_PANEL = 0.25        # maximal panel width in log x for the L integral
SMALLEST = 2.0 ** -60   # smallest cutoff used for traces and tables
FLAG_TRACE = np.arange(1, 61)

_NUM = r"[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?"
_TERM = re.compile(rf"^(?:(?P<coef>{_NUM})\*)?(?:(?P<x>x)(?:\^(?P<p>-?{_NUM}))?(?P<log>\*log)?"
                   rf"|(?P<const>{_NUM})|(?P<cword>const))$")


class SobolevWeight:
    """
    Positive nondecreasing continuous weight on (0, 2pi].

    Parameters
    ----------
    phi : callable
        Vectorized weight.
    label : str
        Text form used in reports.
    primitive : callable, optional
        Closed form of ``m -> int_m^{2pi} dx / phi(x)``.
    integrable_reciprocal, quad_growth : bool, optional
        Override the sampled flags.
    exponents : list of (p, has_log), optional
        Power terms of a parsed weight; used only when the divergence
        detector cannot decide the integrability flag.
    """

    def __init__(self, phi, label="custom", primitive=None, integrable_reciprocal=None,
                 quad_growth=None, exponents=None, check=True):
        self._phi = phi
        self.label = label
        self._primitive = primitive
        self._exponents = exponents
        if check:
            self.validate()
        self._integrable = integrable_reciprocal
        self._quad_growth = quad_growth

    def __call__(self, x):
        return self._phi(np.asarray(x, dtype=float))

    def __repr__(self):
        return f"SobolevWeight({self.label!r})"

    # -- constructors ----------------------------------------------------------

    @classmethod
    def power(cls, p, c=1.0):
        return cls.parse(f"{float(c)!r}*x^{float(p)!r}")

    @classmethod
    def constant(cls, c):
        return cls.parse(repr(float(c)))

    @classmethod
    def f_mu_plus_x2(cls, mu, table_size=512):
        """``phi(x) = F_mu(x) + x^2`` tabulated on a log grid and interpolated."""
        xs = np.geomspace(SMALLEST, TWO_PI, table_size)
        vals = np.array([mu.f_mu(x) for x in xs]) + xs * xs
        spline = interpolate.PchipInterpolator(np.log(xs), np.log(vals))

        def phi(x):
            x = np.clip(x, SMALLEST, TWO_PI)
            return np.exp(spline(np.log(x)))

        return cls(phi, label="F_mu_plus_x2")

    @classmethod
    def parse(cls, text, measure=None):
        """
        Build a weight from the mini-language.

        Terms are joined with ``+``; each term is ``[c*]x[^p][*log]``, a
        number, or ``const`` (= 1).  ``*log`` multiplies by
        ``log(2 pi e / x)``, which is >= 1 on (0, 2pi].  The name
        ``F_mu_plus_x2`` requires ``measure``.
        """
        src = text.replace(" ", "")
        if src == "F_mu_plus_x2":
            if measure is None:
                raise ParseError("F_mu_plus_x2 needs a measure")
            return cls.f_mu_plus_x2(measure)
        terms = []
        for raw in src.split("+"):
            m = _TERM.match(raw)
            if not raw or m is None:
                raise ParseError(f"cannot parse weight term {raw!r} in {text!r}")
            coef = float(m.group("coef") or 1.0)
            if m.group("x"):
                p = float(m.group("p") or 1.0)
                terms.append((coef, p, bool(m.group("log"))))
            else:
                c = float(m.group("const")) if m.group("const") else 1.0
                terms.append((coef * c, 0.0, False))
        if any(c <= 0 for c, _, _ in terms):
            raise InvalidWeight("weight coefficients must be positive")
        if any(p < 0 for _, p, _ in terms):
            raise InvalidWeight("negative exponents give a decreasing weight")

        def phi(x):
            out = np.zeros_like(x, dtype=float)
            for c, p, lg in terms:
                v = c * np.power(x, p)
                if lg:
                    v = v * np.log(TWO_PI * np.e / x)
                out = out + v
            return out

        primitive = None
        if len(terms) == 1 and not terms[0][2]:
            c, p, _ = terms[0]
            if p == 1.0:
                def primitive(m):
                    return np.log(TWO_PI / m) / c
            else:
                def primitive(m):
                    return (TWO_PI ** (1 - p) - np.power(m, 1 - p)) / (c * (1 - p))
        exps = [(p, lg) for _, p, lg in terms]
        return cls(phi, label=text, primitive=primitive, exponents=exps)

    # -- checks and flags ---------------------------------------------------------

    def validate(self):
        x = TWO_PI * 2.0 ** -np.linspace(0, 50, 1001)[::-1]
        v = self(x)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise InvalidWeight("phi must be finite and positive on (0, 2pi]")
        if np.any(np.diff(v) < -1e-12 * v[1:]):
            raise InvalidWeight("phi must be nondecreasing")
        return True

    @property
    def integrable_reciprocal(self):
        """Whether int_0 dx/phi is finite, decided by the divergence detector."""
        if self._integrable is None:
            trace = l_kernel(self, 2.0 ** -FLAG_TRACE, 2.0 ** -FLAG_TRACE)
            try:
                self._integrable = not classify_trace(trace).divergent
            except Inconclusive:
                self._integrable = self._analytic_integrable()
        return self._integrable

    def _analytic_integrable(self):
        if self._exponents is None:
            return None
        p0 = min(p for p, _ in self._exponents)
        if p0 != 1.0:
            return p0 < 1.0
        # x log(1/x) near 0 still has a divergent reciprocal integral
        return False

    @property
    def quad_growth(self):
        """``phi(t) >= t^2`` and ``t^2 / phi(t)`` nondecreasing, sampled."""
        if self._quad_growth is None:
            t = TWO_PI * 2.0 ** -np.linspace(0, 40, 801)[::-1]
            v = self(t)
            r = t * t / v
            ok_floor = bool(np.all(v >= t * t * (1 - 1e-12)))
            ok_ratio = bool(np.all(np.diff(r) >= -1e-10 * r[1:]))
            self._quad_growth = ok_floor and ok_ratio
        return self._quad_growth


# ---------------------------------------------------------------- kernels --

def _primitive(phi, m):
    """int_m^{2pi} dx/phi for an array of cutoffs, by log-panel Gauss rules."""
    m = np.asarray(m, dtype=float)
    if phi._primitive is not None:
        return np.where(m >= TWO_PI, 0.0, phi._primitive(np.minimum(m, TWO_PI)))
    flat = np.minimum(m.ravel(), TWO_PI)
    cuts = np.unique(flat)
    lo = np.log(cuts[0])
    hi = np.log(TWO_PI)
    n = max(int(np.ceil((hi - lo) / LOG_PANEL)), 1)
    br = np.unique(np.concatenate([np.linspace(lo, hi, n + 1), np.log(cuts)]))
    xg, wg = gauss_legendre(20)
    left = br[:-1, None]
    width = np.diff(br)[:, None]
    u = left + width * xg
    x = np.exp(u)
    panel = np.sum(width * wg * x / phi(x), axis=1)
    tail = np.concatenate([np.cumsum(panel[::-1])[::-1], [0.0]])
    idx = np.searchsorted(br, np.log(flat))
    idx = np.clip(idx, 0, br.size - 1)
    return tail[idx].reshape(m.shape)


def l_kernel(phi, t, s):
    """
    ``int_{max(t,s)}^{2pi} dx / phi(x)``.

    Accepts scalars or broadcastable arrays; depends on ``max(t, s)`` only,
    so the result is exactly symmetric.
    """
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t <= 0) or np.any(s <= 0) or np.any(t > TWO_PI * (1 + 1e-15)) \
            or np.any(s > TWO_PI * (1 + 1e-15)):
        raise ValueError("t and s must lie in (0, 2pi]")
    out = _primitive(phi, np.maximum(t, s))
    return out if out.ndim else float(out)


def k_diag_estimate(phi, a):
    """``1 + L(a, a)``, comparable to the diagonal of the W^2(phi) kernel."""
    return 1.0 + l_kernel(phi, a, a)


def galerkin_mesh(nodes=1 << 14, left=2.0 ** -30, extra=()):
    """Geometric mesh on [left, 2pi] containing every power of two and ``extra``."""
    octaves = np.log2(TWO_PI / left)
    per = max(int(nodes // octaves), 1)
    k = np.arange(int(np.floor(np.log2(TWO_PI / left) * per)) + 1)
    x = left * 2.0 ** (k / per)
    x = np.concatenate([x[x < TWO_PI], [TWO_PI], np.asarray(extra, dtype=float)])
    return np.unique(x)


def galerkin_kernel(phi, a, nodes=1 << 14, left=2.0 ** -30):
    """
    Diagonal of the W^2(phi) kernel from continuous piecewise-linear
    elements on a geometric mesh: ``K_h(a, a) = e_a^T A^{-1} e_a``.

    The discrete kernel is the supremum of ``f(a)^2`` over the element space
    with unit norm, so it approaches the exact value from below.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    x = galerkin_mesh(nodes, left, extra=a)
    h = np.diff(x)
    xg, wg = gauss_legendre(4)
    phi_int = np.sum(h[:, None] * wg * phi(x[:-1, None] + h[:, None] * xg), axis=1)
    stiff = phi_int / h ** 2
    hm = h / TWO_PI
    node_mass = np.zeros(x.size)
    node_mass[:-1] += hm / 3
    node_mass[1:] += hm / 3
    left_ex = _pivot_excess(stiff, node_mass, hm / 6)
    right_ex = _pivot_excess(stiff[::-1], node_mass[::-1], hm[::-1] / 6)[::-1]
    idx = np.searchsorted(x, a)
    # 1 / (A^-1)_ii from the two one-sided eliminations; the last node has
    # no element to its right
    inner = np.minimum(idx, x.size - 2)
    k, mo, er = stiff[inner], hm[inner] / 6, right_ex[np.minimum(idx + 1, x.size - 1)]
    denom = left_ex[idx] + er + 2 * mo - (er + mo) ** 2 / (k + er)
    denom = np.where(idx == x.size - 1, left_ex[idx], denom)
    vals = 1.0 / denom
    return vals if vals.size > 1 else float(vals[0])


def _pivot_excess(k, md, mo):
    """
    Forward elimination pivots of the tridiagonal ``K + M`` minus the
    stiffness of the element to the right of each node.

    Element stiffness ``k`` dwarfs the mass terms on fine elements, so the
    plain pivots lose the mass to cancellation.  With ``d_i = k_i + e_i``
    the excess obeys a recurrence free of large differences:
    ``e_i = md_i + e_{i-1} + 2 mo - (e_{i-1} + mo)^2 / (k_{i-1} + e_{i-1})``.
    """
    e = np.empty(md.size)
    e[0] = md[0]
    for i in range(1, md.size):
        prev, m = e[i - 1], mo[i - 1]
        e[i] = md[i] + prev + 2 * m - (prev + m) ** 2 / (k[i - 1] + prev)
    return e


def reproducing_pairing(phi, knots, values, s, rel_step=1e-4):
    """
    ``int_0^{2pi} f'(x) d_x L(x, s) phi(x) dx`` for a piecewise-linear ``f``.

    The derivative of ``L(., s)`` is taken by central differences of
    :func:`l_kernel`, so the pairing checks the kernel numerically rather
    than through its closed-form derivative.  Equals ``f(s)`` when
    ``f(2pi) = 0``.
    """
    knots = np.asarray(knots, dtype=float)
    values = np.asarray(values, dtype=float)
    br = np.unique(np.concatenate([knots, [s]]))
    br = br[(br >= knots[0]) & (br <= TWO_PI)]
    xg, wg = gauss_legendre(8)
    left = br[:-1, None]
    width = np.diff(br)[:, None]
    x = (left + width * xg).ravel()
    w = (width * wg).ravel()
    piece = np.searchsorted(knots, x, side="right") - 1
    slope = (np.diff(values) / np.diff(knots))[np.clip(piece, 0, knots.size - 2)]
    h = np.minimum(rel_step * x, 0.5 * np.abs(x - s))
    h = np.minimum(h, 0.5 * (TWO_PI - x))
    dl = (l_kernel(phi, np.minimum(x + h, TWO_PI), s) - l_kernel(phi, x - h, s)) / (2 * h)
    return float(np.sum(w * slope * dl * phi(x)))


# ---------------------------------------------------------------- witness --

def _dyadic_grid(n=1 << 14, depth=40):
    """n points from 2pi down to 2pi * 2^-depth, geometric."""
    return TWO_PI * 2.0 ** -np.linspace(0, depth, n)[::-1]


class WitnessFunction:
    """``f(x) = 1 + int_{y(x)}^{2pi} ds/phi(s)`` with ``y(x) = 2pi (x+a)/(2pi+a)``."""

    def __init__(self, phi, a):
        self.phi = phi
        self.a = float(a)
        self._scale = TWO_PI / (TWO_PI + self.a)

    def _y(self, x):
        return np.minimum(self._scale * (np.asarray(x, dtype=float) + self.a), TWO_PI)

    def __call__(self, x):
        return 1.0 + l_kernel(self.phi, self._y(x), self._y(x))

    def derivative(self, x):
        return -self._scale / self.phi(self._y(x))

    def sup_norm(self):
        return float(np.max(self(_dyadic_grid())))

    def weighted_derivative_norm(self):
        x = _dyadic_grid()
        return float(np.max(np.abs(self.derivative(x)) * self.phi(x)))

    def l2_norm_sq(self):
        xg, wg = gauss_legendre(20)
        br = np.concatenate([[0.0], TWO_PI * 2.0 ** -np.arange(40, -1, -0.25)])
        left = br[:-1, None]
        width = np.diff(br)[:, None]
        x = (left + width * xg).ravel()
        return float(np.sum((width * wg).ravel() * self(x) ** 2)) / TWO_PI

    def class_r_report(self, n=1 << 12):
        """
        Class-R axioms sampled on a geometric grid of (0, pi].

        Both doubling variants are reported: ``f(2t) <= 2 f(t)`` and
        ``f(t) <= 2 f(2t)``.
        """
        t = np.pi * 2.0 ** -np.linspace(0, 30, n)[::-1]
        f = self(t)
        f2 = self(2 * t)
        d = self.derivative(t)
        lin = np.linspace(t[0], TWO_PI, n)
        fl = self(lin)
        sec = fl[:-2] - 2 * fl[1:-1] + fl[2:]
        tol = 1e-12 * np.max(np.abs(fl))
        g = t * t * np.abs(d)
        return {
            "decreasing": bool(np.all(np.diff(f) <= 1e-14 * f[1:])),
            "convex": bool(np.all(sec >= -tol)),
            "doubling_upper": bool(np.all(f2 <= 2 * f * (1 + 1e-12))),
            "doubling_lower": bool(np.all(f <= 2 * f2 * (1 + 1e-12))),
            "t2_derivative_increasing": bool(np.all(np.diff(g) >= -1e-10 * g[1:])),
        }


@dataclass(frozen=True)
class WitnessReport:
    witness: WitnessFunction
    value: float
    f_at_a: float
    sup_norm: float
    derivative_norm: float
    l2_norm_sq: float


def gamma_lower_witness(phi, a):
    """
    Test function for the extremal problem and its Rayleigh-type value

        f(a)^2 / (||f' phi||_inf ||f||_inf + ||f||_2^2).

    Raises
    ------
    PreconditionFailed
        If ``phi`` lacks quadratic growth or ``a >= 1/2``.
    """
    if not phi.quad_growth:
        raise PreconditionFailed("weight needs phi(t) >= t^2 with t^2/phi(t) increasing")
    if not 0 < a < 0.5:
        raise PreconditionFailed("a must lie in (0, 1/2)")
    f = WitnessFunction(phi, a)
    fa = float(f(a))
    sup = f.sup_norm()
    der = f.weighted_derivative_norm()
    l2 = f.l2_norm_sq()
    value = fa * fa / (der * sup + l2)
    return WitnessReport(f, value, fa, sup, der, l2)
