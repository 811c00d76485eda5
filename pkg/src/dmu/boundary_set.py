"""
Closed subsets of the circle stored through their complementary gaps.

For a closed set ``E`` with gaps ``I_j`` (the components of T \\ E):

* ``n_count(t)``         = 2 #{j : |I_j| > 2t}
* ``thickened_length(t)`` = |E_t| = 2pi - sum_j max(|I_j| - 2t, 0)
* ``covering_number(e)`` = number of closed arcs of length 2e covering E (greedy)

Cantor sets are kept as (gap length, multiplicity) pairs so that counting
functions stay exact at large depth without enumerating the gaps.
"""

import numpy as np
from scipy import integrate

from .errors import InvalidWeight, InvariantViolation, ParseError
from .quadrature import TWO_PI, wrap_angle

__all__ = [
    "ClosedSet",
    "AdmissibleWeight",
    "n_count",
    "thickened_length",
    "covering_number",
    "local_modulus",
    "m_psi",
]

MAX_MATERIALIZED_GAPS = 1 << 21


class ClosedSet:
    """
    Closed subset of the circle.

    Use the constructors :meth:`from_gaps`, :meth:`finite`, :meth:`cantor` and
    :meth:`full_circle` rather than the raw initializer.
    """

    def __init__(self, lengths, counts, starts=None, spec=None, materialize=None):
        self._lengths = np.asarray(lengths, dtype=float)
        self._counts = np.asarray(counts, dtype=np.int64)
        self._starts = None if starts is None else np.asarray(starts, dtype=float)
        self._lengths_full = None if starts is None else self._lengths
        self._materialize = materialize
        self.spec = spec
        total = float(np.sum(self._lengths * self._counts))
        if np.any(self._lengths <= 0):
            raise InvariantViolation("gaps must be nonempty")
        if total > TWO_PI * (1 + 1e-12):
            raise InvariantViolation("gaps overlap: total gap length exceeds 2pi")

    # -- constructors ----------------------------------------------------------

    @classmethod
    def from_gaps(cls, gaps):
        """Gaps given as open counterclockwise arcs ``(a, b)``."""
        gaps = np.asarray(gaps, dtype=float).reshape(-1, 2)
        starts = wrap_angle(gaps[:, 0])
        lengths = np.mod(gaps[:, 1] - gaps[:, 0], TWO_PI)
        lengths = np.where(lengths == 0, TWO_PI, lengths)
        order = np.argsort(starts)
        starts, lengths = starts[order], lengths[order]
        if starts.size > 1:
            ends = starts + lengths
            nxt = np.append(starts[1:], starts[0] + TWO_PI)
            if np.any(ends > nxt + 1e-12):
                raise InvariantViolation("gaps are not pairwise disjoint")
        spec = {"kind": "gaps", "gaps": gaps.tolist()}
        return cls(lengths, np.ones(lengths.size, dtype=np.int64), starts, spec)

    @classmethod
    def finite(cls, points):
        pts = np.unique(wrap_angle(np.atleast_1d(np.asarray(points, dtype=float))))
        if pts.size == 0:
            raise InvariantViolation("finite set needs at least one point")
        lengths = np.diff(np.append(pts, pts[0] + TWO_PI))
        spec = {"kind": "finite", "points": np.atleast_1d(np.asarray(points, dtype=float)).tolist()}
        return cls(lengths, np.ones(pts.size, dtype=np.int64), pts, spec)

    @classmethod
    def full_circle(cls):
        return cls(np.empty(0), np.empty(0, dtype=np.int64), np.empty(0), {"kind": "gaps", "gaps": []})

    @classmethod
    def cantor(cls, ratio=1.0 / 3.0, depth=10, base=(-np.pi / 2, np.pi / 2)):
        """
        Union of the 2**depth generation-``depth`` cells of the symmetric
        Cantor construction on the base arc.

        ``ratio`` is either one scale for every generation or a sequence of
        per-generation scales (then ``depth`` defaults to its length).
        Children sit at the two ends of their parent cell.
        """
        if int(depth) != depth or depth < 0:
            raise InvariantViolation("cantor depth must be an integer >= 0")
        depth = int(depth)
        if np.ndim(ratio) == 0:
            ratios = np.full(depth, float(ratio))
        else:
            ratios = np.asarray(ratio, dtype=float)[:depth]
            if ratios.size < depth:
                raise InvariantViolation("fewer ratios than generations")
        if np.any(ratios <= 0.0) or np.any(ratios >= 0.5):
            raise InvariantViolation("cantor ratio outside (0, 1/2): cells overlap")
        a, b = float(base[0]), float(base[1])
        L = b - a
        if not 0 < L <= TWO_PI:
            raise InvariantViolation("cantor base must satisfy 0 < b - a <= 2pi")
        widths = L * np.concatenate([[1.0], np.cumprod(ratios)])
        lengths = list(widths[:-1] * (1 - 2 * ratios))
        counts = list(2 ** np.arange(depth))
        if L < TWO_PI:
            lengths.append(TWO_PI - L)
            counts.append(1)
        if np.ndim(ratio) == 0:
            spec = {"kind": "cantor", "ratio": float(ratio), "depth": depth, "base": [a, b]}
        else:
            spec = {"kind": "cantor", "ratios": ratios.tolist(), "depth": depth, "base": [a, b]}

        def materialize():
            centers = np.array([0.5 * (a + b)])
            starts, lens = [], []
            for k in range(depth):
                g = widths[k] * (1 - 2 * ratios[k])
                starts.append(centers - 0.5 * g)
                lens.append(np.full(centers.size, g))
                off = 0.5 * (widths[k] - widths[k + 1])
                centers = np.stack([centers - off, centers + off], axis=1).ravel()
            st = np.concatenate(starts) if starts else np.empty(0)
            ln = np.concatenate(lens) if lens else np.empty(0)
            if L < TWO_PI:
                st = np.append(st, b)
                ln = np.append(ln, TWO_PI - L)
            st = wrap_angle(st)
            order = np.argsort(st)
            return st[order], ln[order]

        lengths = np.array(lengths)
        counts = np.array(counts, dtype=np.int64)
        keep = lengths > 0
        return cls(lengths[keep], counts[keep], None, spec, materialize)

    @classmethod
    def thin_cantor(cls, offset=1, depth=None, base=(-np.pi / 2, np.pi / 2), resolution=2.0 ** -42):
        """
        Cantor set with generation scales ``2**-(k + offset)``, k = 1, 2, ...

        The limit set satisfies ``int_0 dt / |E_t| = inf``: at scale t the
        thickened length is about ``2^k (l_k + 2t)`` with ``2^k`` growing
        much slower than ``1/l_k``.  When ``depth`` is omitted, generations
        are added until cells are shorter than ``resolution``, so counting
        functions agree with those of the limit set for ``t >= resolution``.

        The part of the offset-``o`` set inside its leftmost generation-``d``
        cell is the offset-``o + d`` set on that cell, so
        ``thin_cantor_cell(o, d)`` is decreasing in ``d``.
        """
        L = float(base[1]) - float(base[0])
        if depth is None:
            depth, width = 0, L
            while width >= resolution:
                depth += 1
                width *= 2.0 ** -(depth + offset)
        ratios = 2.0 ** -(np.arange(1, depth + 1) + offset)
        return cls.cantor(ratios, depth, base)

    @classmethod
    def thin_cantor_cell(cls, offset=1, level=0, base=(-np.pi / 2, np.pi / 2)):
        """Part of ``thin_cantor(offset)`` in its leftmost generation-``level`` cell."""
        a, b = float(base[0]), float(base[1])
        width = (b - a) * np.prod(2.0 ** -(np.arange(1, level + 1) + offset))
        return cls.thin_cantor(offset + level, base=(a, a + width))

    @classmethod
    def from_dict(cls, spec):
        if not isinstance(spec, dict):
            raise ParseError("set spec must be a JSON object")
        kind = spec.get("kind")
        try:
            if kind == "gaps":
                if not spec["gaps"]:
                    return cls.full_circle()
                return cls.from_gaps(spec["gaps"])
            if kind == "finite":
                return cls.finite(spec["points"])
            if kind == "cantor":
                ratio = spec["ratios"] if "ratios" in spec else float(spec["ratio"])
                return cls.cantor(ratio, spec["depth"], tuple(float(v) for v in spec["base"]))
        except KeyError as exc:
            raise ParseError(f"set: missing field {exc}") from None
        raise ParseError(f"set: unknown kind {kind!r}")

    def to_dict(self):
        return self.spec

    def __repr__(self):
        return f"ClosedSet({self.spec.get('kind')}, gaps={self.n_gaps})"

    # -- structure ----------------------------------------------------------------

    @property
    def n_gaps(self):
        return int(self._counts.sum())

    @property
    def gap_lengths(self):
        """Distinct gap lengths and their multiplicities."""
        return self._lengths.copy(), self._counts.copy()

    def _gaps(self):
        if self._starts is None:
            if self.n_gaps > MAX_MATERIALIZED_GAPS:
                raise MemoryError(f"refusing to materialize {self.n_gaps} gaps")
            self._starts, self._lengths_full = self._materialize()
        return self._starts, self._lengths_full

    def gaps(self):
        """Sorted gaps as (start, length) arrays."""
        st, ln = self._gaps()
        return st.copy(), ln.copy()

    def gap_endpoints(self):
        st, ln = self._gaps()
        return wrap_angle(np.concatenate([st, st + ln]))

    def gap_midpoints(self):
        st, ln = self._gaps()
        return wrap_angle(st + 0.5 * ln)

    @property
    def lebesgue_measure(self):
        return max(TWO_PI - float(np.sum(self._lengths * self._counts)), 0.0)

    @property
    def is_full_circle(self):
        return self.n_gaps == 0

    def components(self):
        """
        Components of E as closed intervals ``[s, e]`` in an unwrapped frame,
        sorted, starting right after the largest gap.
        """
        if self.is_full_circle:
            return np.array([-np.pi]), np.array([np.pi])
        st, ln = self._gaps()
        ends = st + ln
        nxt = np.append(st[1:], st[0] + TWO_PI)
        s, e = ends, np.maximum(nxt, ends)
        k = int(np.argmax(ln))
        s = np.roll(s, -k)
        e = np.roll(e, -k)
        shift = np.where(np.arange(s.size) >= s.size - k, TWO_PI, 0.0) if k else 0.0
        s, e = s + shift, e + shift
        return s, e

    def distance(self, theta):
        """Arc-length distance from ``theta`` to E."""
        theta = wrap_angle(theta)
        if self.is_full_circle:
            return np.zeros_like(theta)
        st, ln = self._gaps()
        ext_st = np.concatenate([st - TWO_PI, st, st + TWO_PI])
        ext_ln = np.tile(ln, 3)
        idx = np.searchsorted(ext_st, theta, side="right") - 1
        off = theta - ext_st[idx]
        L = ext_ln[idx]
        inside = (off > 0) & (off < L)
        return np.where(inside, np.minimum(off, L - off), 0.0)

    def contains(self, theta, tol=0.0):
        return self.distance(theta) <= tol

    def points_on_set(self, n=1 << 14):
        """Component end points plus ~n points spread over E by length."""
        s, e = self.components()
        out = [s, e]
        total = float(np.sum(e - s))
        if total > 0:
            u = (np.arange(n) + 0.5) / n * total
            cum = np.concatenate([[0.0], np.cumsum(e - s)])
            j = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, s.size - 1)
            out.append(s[j] + (u - cum[j]))
        return wrap_angle(np.concatenate(out))

    # -- counting functions -----------------------------------------------------

    def n_count(self, t):
        t = np.asarray(t, dtype=float)
        val = 2 * np.sum(self._counts * (self._lengths > 2 * t[..., None]), axis=-1)
        return val if val.ndim else int(val)

    def thickened_length(self, t):
        t = np.asarray(t, dtype=float)
        excess = np.maximum(self._lengths - 2 * t[..., None], 0.0)
        val = np.maximum(TWO_PI - np.sum(self._counts * excess, axis=-1), 0.0)
        return val if val.ndim else float(val)

    def covering_number(self, eps):
        """
        Greedy cover by closed arcs of length 2 eps, sweeping counterclockwise
        from the first set point after the largest gap.  The greedy count is at
        most one more than the optimum on the circle.
        """
        eps = float(eps)
        if eps <= 0:
            raise ValueError("eps must be > 0")
        s, e = self.components()
        width = 2.0 * eps
        pos = -np.inf
        count = 0
        for si, ei in zip(s, e):
            if ei <= pos:
                continue
            x = si if si > pos else pos
            k = max(1, int(np.ceil((ei - x) / width - 1e-12)))
            count += k
            pos = x + k * width
        return count


class AdmissibleWeight:
    """
    Increasing weight ``psi`` with ``psi(0) = 0``, concave or convex, and
    ``psi(s) / s**alpha`` nonincreasing.

    ``log_primitive(u)`` is ``int_0^u psi(t) / t dt``.
    """

    def __init__(self, psi, shape, alpha, log_primitive=None, label=None, check=True):
        if shape not in ("concave", "convex"):
            raise InvalidWeight("shape must be 'concave' or 'convex'")
        if not alpha > 0:
            raise InvalidWeight("alpha must be positive")
        self._psi = psi
        self.shape = shape
        self.alpha = float(alpha)
        self._log_primitive = log_primitive
        self.label = label or "custom"
        if check:
            self.validate()

    @classmethod
    def power(cls, p, c=1.0):
        """``psi(t) = c t**p`` (concave for p <= 1, convex for p >= 1)."""
        p, c = float(p), float(c)
        if p <= 0 or c <= 0:
            raise InvalidWeight("power weight needs p > 0 and c > 0")
        return cls(lambda t: c * np.power(t, p), "concave" if p <= 1 else "convex", p,
                   log_primitive=lambda u: c * np.power(u, p) / p, label=f"{c}*t^{p}")

    def __call__(self, t):
        return self._psi(np.asarray(t, dtype=float))

    def log_primitive(self, u):
        u = np.asarray(u, dtype=float)
        if self._log_primitive is not None:
            return self._log_primitive(u)
        flat = np.sort(np.unique(u.ravel()))
        vals = np.empty(flat.size)
        acc, prev = 0.0, 0.0
        for i, x in enumerate(flat):
            if x > prev:
                acc += integrate.quad(lambda t: self._psi(t) / t, prev, x, epsrel=1e-12, limit=200)[0]
            vals[i] = acc
            prev = x
        return np.interp(u, flat, vals)

    def validate(self, grid=None):
        if grid is None:
            grid = TWO_PI * 2.0 ** -np.linspace(0, 40, 401)[::-1]
        v = self(grid)
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidWeight("psi must be finite and nonnegative")
        if np.any(np.diff(v) < -1e-12 * np.abs(v[1:])):
            raise InvalidWeight("psi is not increasing")
        with np.errstate(all="ignore"):
            v0 = self(np.array([0.0]))
        if np.all(np.isfinite(v0)) and np.any(v0 != 0):
            raise InvalidWeight("psi(0) is not 0")
        if not v[0] < v[-1]:
            raise InvalidWeight("psi is constant on (0, 2pi]")
        ratio = v / grid ** self.alpha
        if np.any(np.diff(ratio) > 1e-9 * np.abs(ratio[:-1]) + 1e-300):
            raise InvalidWeight(f"psi(s)/s^{self.alpha} is not nonincreasing")
        q = v / grid
        dq = np.diff(q)
        tol = 1e-9 * np.abs(q[1:]) + 1e-300
        # psi(s)/s monotone is the property the branch selection of M relies on
        if self.shape == "concave" and np.any(dq > tol):
            raise InvalidWeight("concave psi must have psi(s)/s nonincreasing")
        if self.shape == "convex" and np.any(dq < -tol):
            raise InvalidWeight("convex psi must have psi(s)/s nondecreasing")
        lin = np.linspace(grid[0], grid[-1], 2049)
        lv = self(lin)
        sec = lv[:-2] - 2 * lv[1:-1] + lv[2:]
        scale = 1e-9 * np.max(np.abs(lv))
        if self.shape == "concave" and np.any(sec > scale):
            raise InvalidWeight("psi is not concave")
        if self.shape == "convex" and np.any(sec < -scale):
            raise InvalidWeight("psi is not convex")
        return True


# ------------------------------------------------------------- operations --

def n_count(E, t):
    return E.n_count(t)


def thickened_length(E, t):
    return E.thickened_length(t)


def covering_number(E, eps):
    return E.covering_number(eps)


def local_modulus(mu, E, t, grid=1 << 14, rtol=1e-6, max_grid=1 << 18):
    """
    sup { mu(closed arc of half-length t centered at z) : z in E }.

    Scalar ``t`` returns a float.  For an array of ``t`` the values are made
    nondecreasing by a running maximum over sorted ``t``.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    # rotation invariance makes every center equivalent
    if E.is_full_circle or mu.is_rotation_invariant:
        vals = np.array([mu.modulus_of_continuity(x, grid=grid, rtol=rtol) for x in ts])
    else:
        vals = np.array([_local_modulus_one(mu, E, x, grid, rtol, max_grid) for x in ts])
    if np.ndim(t) == 0:
        return float(vals[0])
    order = np.argsort(ts)
    vals[order] = np.maximum.accumulate(vals[order])
    return vals


def _local_modulus_one(mu, E, t, grid, rtol, max_grid):
    if t >= np.pi:
        return mu.total_mass
    base = [E.gap_endpoints()]
    pts = mu.point_angles
    if pts.size:
        cand = np.concatenate([pts, pts + t, pts - t])
        base.append(cand[E.contains(cand)])
    base = np.concatenate(base)
    best, _ = mu.sup_arc_mass(base, t)
    if mu.density is None or mu.density_mass == 0:
        return max(best, 0.0)
    n, prev = grid, None
    while True:
        val, _ = mu.sup_arc_mass(E.points_on_set(n), t)
        best = max(best, val)
        if prev is not None and abs(best - prev) <= rtol * max(best, 1e-300):
            return best
        if n >= max_grid:
            return best
        prev, n = best, n * 2


def m_psi(E, psi, s):
    """
    max( int_0^s psi(t)/t N_E(t) dt , psi(s)/s |E_s| ).

    N_E is piecewise constant, so the integral is the finite sum
    sum_j 2 Psi(min(s, |I_j|/2)) with Psi the log-primitive of psi.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    lengths, counts = E.gap_lengths
    if lengths.size:
        caps = np.minimum(s_arr[:, None], 0.5 * lengths[None, :])
        integral = 2.0 * np.sum(counts * psi.log_primitive(caps), axis=1)
    else:
        integral = np.zeros_like(s_arr)
    second = psi(s_arr) / s_arr * E.thickened_length(s_arr)
    out = np.maximum(integral, second)
    return out if np.ndim(s) else float(out[0])


def m_psi_branches(E, psi, s):
    """The two branches of :func:`m_psi` separately (integral, thickened)."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    lengths, counts = E.gap_lengths
    if lengths.size:
        caps = np.minimum(s_arr[:, None], 0.5 * lengths[None, :])
        integral = 2.0 * np.sum(counts * psi.log_primitive(caps), axis=1)
    else:
        integral = np.zeros_like(s_arr)
    return integral, psi(s_arr) / s_arr * E.thickened_length(s_arr)
