"""
Finite positive measures on the unit circle.

A measure is the sum of three parts, each optional:

* atoms ``(theta, mass)``,
* an absolutely continuous part with density ``f`` relative to the normalized
  arc measure ``dm = dtheta / 2pi``,
* a symmetric Cantor measure, materialized as ``2**depth`` equal atoms at the
  centers of the generation-``depth`` cells.

Angles live in (-pi, pi] and arcs wrap modulo 2pi.  Arcs are closed: an atom
sitting on an arc end point is counted.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BoundaryTooClose, InvariantViolation, OrderTooLarge, ParseError
from .quadrature import TWO_PI, gauss_legendre, graded_breaks, panel_rule, wrap_angle

__all__ = [
    "Density",
    "CantorPart",
    "Measure",
    "arc_mass",
    "poisson_eval",
    "f_mu_eval",
    "modulus_of_continuity",
    "fourier_moment",
    "GUARD_BAND",
    "MAX_ORDER",
]

GUARD_BAND = 2.0 ** -40
MAX_ORDER = 8192

# Cantor cells narrower than CELL_ETA * max(distance, resolution) are merged
# into one atom; the Poisson error of the merge is below 1e-8 relative.
CELL_ETA = 1e-4


def poisson_kernel(r, dtheta):
    """(1 - r^2) / |e^{i dtheta} - r|^2 written to keep digits near r = 1."""
    one_minus = 1.0 - r
    return one_minus * (1.0 + r) / (one_minus ** 2 + 4.0 * r * np.sin(0.5 * dtheta) ** 2)


# ---------------------------------------------------------------- densities --

class Density:
    """
    Nonnegative density relative to ``dm = dtheta / 2pi``.

    ``breaks`` are angles where the density is not smooth (panel end points);
    ``foci`` are the subset where panels must also be refined because the
    density has an integrable singularity there.
    """

    def __init__(self, func, spec, breaks=(), foci=()):
        self._func = func
        self.spec = spec
        self.breaks = np.unique(wrap_angle(np.asarray(breaks, dtype=float)))
        self.foci = np.unique(wrap_angle(np.asarray(foci, dtype=float)))

    def __call__(self, theta):
        return self._func(wrap_angle(theta))

    @property
    def kind(self):
        return self.spec["kind"]

    @classmethod
    def uniform(cls, mass=1.0):
        if mass < 0:
            raise InvariantViolation("uniform density needs mass >= 0")
        return cls(lambda t: np.full(np.shape(t), float(mass)),
                   {"kind": "uniform", "mass": float(mass)})

    @classmethod
    def samples(cls, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise InvariantViolation("samples density needs at least two values")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise InvariantViolation("samples density must be finite and nonnegative")
        n = values.size
        grid = -np.pi + TWO_PI * np.arange(n + 1) / n
        closed = np.append(values, values[0])

        def func(t):
            return np.interp(np.where(t >= np.pi, -np.pi, t), grid, closed)

        breaks = grid[:-1] if n <= 4096 else ()
        return cls(func, {"kind": "samples", "values": values.tolist()}, breaks=breaks)

    @classmethod
    def arc(cls, start, end, value=1.0):
        """Constant ``value`` on the counterclockwise arc from start to end."""
        if value < 0:
            raise InvariantViolation("arc density value must be >= 0")
        start, end = float(start), float(end)
        span = np.mod(end - start, TWO_PI)
        if span == 0:
            span = TWO_PI

        def func(t):
            inside = np.mod(t - start, TWO_PI) <= span
            return np.where(inside, float(value), 0.0)

        return cls(func, {"kind": "arc", "start": start, "end": end, "value": float(value)},
                   breaks=(start, end))

    @classmethod
    def power_gap(cls, beta, points=None, closed_set=None, scale=1.0):
        """``scale * d(theta, K)**beta`` with K a finite point set or a ClosedSet."""
        if beta <= -1:
            raise InvariantViolation("power_gap needs beta > -1 for integrability")
        if scale < 0:
            raise InvariantViolation("power_gap scale must be >= 0")
        spec = {"kind": "power_gap", "beta": float(beta), "scale": float(scale)}
        if closed_set is not None:
            spec["set"] = closed_set.to_dict()
            dist = closed_set.distance
            ends = closed_set.gap_endpoints()
            mids = closed_set.gap_midpoints()
            breaks = np.concatenate([ends, mids])
            foci = ends
        else:
            pts = wrap_angle(np.atleast_1d(np.asarray(points, dtype=float)))
            if pts.size == 0:
                raise InvariantViolation("power_gap needs a nonempty point set")
            spec["points"] = pts.tolist()

            def dist(t):
                d = np.abs(wrap_angle(np.asarray(t)[..., None] - pts))
                return d.min(axis=-1)

            srt = np.sort(pts)
            gaps = np.diff(np.append(srt, srt[0] + TWO_PI))
            mids = srt + 0.5 * gaps
            breaks = np.concatenate([pts, mids])
            foci = pts

        def func(t):
            return scale * np.power(dist(t), beta)

        return cls(func, spec, breaks=breaks, foci=foci)

    @classmethod
    def from_dict(cls, spec):
        kind = spec.get("kind")
        try:
            if kind == "uniform":
                return cls.uniform(spec.get("mass", 1.0))
            if kind == "samples":
                return cls.samples(spec["values"])
            if kind == "arc":
                return cls.arc(spec["start"], spec["end"], spec.get("value", 1.0))
            if kind == "power_gap":
                if "set" in spec:
                    from .boundary_set import ClosedSet
                    return cls.power_gap(spec["beta"], closed_set=ClosedSet.from_dict(spec["set"]),
                                         scale=spec.get("scale", 1.0))
                return cls.power_gap(spec["beta"], points=spec["points"],
                                     scale=spec.get("scale", 1.0))
        except KeyError as exc:
            raise ParseError(f"density: missing field {exc}") from None
        raise ParseError(f"density: unknown kind {kind!r}")


@dataclass(frozen=True)
class CantorPart:
    """Symmetric Cantor measure on the base arc [a, b] with scale ``ratio``."""

    ratio: float
    depth: int
    mass: float
    base: tuple

    def __post_init__(self):
        if not 0.0 < self.ratio < 0.5:
            raise InvariantViolation(f"cantor ratio {self.ratio} outside (0, 1/2): cells overlap")
        if int(self.depth) != self.depth or self.depth < 1:
            raise InvariantViolation("cantor depth must be an integer >= 1")
        if not self.mass > 0:
            raise InvariantViolation("cantor mass must be > 0")
        a, b = self.base
        if not 0 < b - a <= TWO_PI:
            raise InvariantViolation("cantor base must satisfy 0 < b - a <= 2pi")

    @property
    def length(self):
        return self.base[1] - self.base[0]

    @property
    def center(self):
        return 0.5 * (self.base[0] + self.base[1])

    def offsets(self):
        """Half-distance between the two children of a level-l cell, l = 0..depth-1."""
        lev = np.arange(self.depth)
        return 0.5 * self.length * self.ratio ** lev * (1.0 - self.ratio)

    def atoms(self):
        c = np.array([self.center])
        for off in self.offsets():
            c = np.stack([c - off, c + off], axis=1).ravel()
        return c

    def cells(self, level):
        """Centers of the level-``level`` cells (each carrying mass / 2**level)."""
        c = np.array([self.center])
        for off in self.offsets()[:level]:
            c = np.stack([c - off, c + off], axis=1).ravel()
        return c

    def moments(self, ks):
        ks = np.asarray(ks, dtype=float)
        prod = np.ones_like(ks)
        for off in self.offsets():
            prod = prod * np.cos(ks * off)
        return self.mass * np.exp(-1j * ks * self.center) * prod

    def tree_nodes(self, center, resolution, eta=CELL_ETA):
        """Adaptive cell merge: fine near ``center``, coarse far away."""
        out_c, out_m = [], []
        active = np.array([self.center])
        width = self.length
        offs = self.offsets()
        for level in range(self.depth + 1):
            mass = self.mass * 0.5 ** level
            if level == self.depth:
                out_c.append(active)
                out_m.append(np.full(active.size, mass))
                break
            d = np.abs(wrap_angle(active - center))
            ok = width <= eta * np.maximum(d, resolution)
            if np.any(ok):
                out_c.append(active[ok])
                out_m.append(np.full(int(ok.sum()), mass))
            rest = active[~ok]
            if rest.size == 0:
                break
            active = np.stack([rest - offs[level], rest + offs[level]], axis=1).ravel()
            width *= self.ratio
        return np.concatenate(out_c), np.concatenate(out_m)

    def to_dict(self):
        return {"ratio": self.ratio, "depth": int(self.depth), "mass": self.mass,
                "base": [float(self.base[0]), float(self.base[1])]}


# ------------------------------------------------------------------ measure --

class Measure:
    """
    Finite positive measure on the circle.

    Parameters
    ----------
    atoms : iterable of (theta, mass)
    density : Density, optional
    cantor : CantorPart, optional
    """

    def __init__(self, atoms=(), density=None, cantor=None):
        atoms = [(float(t), float(m)) for t, m in atoms]
        for t, m in atoms:
            if not (m > 0 and np.isfinite(m)):
                raise InvariantViolation(f"atom mass must be positive and finite, got {m}")
            if not np.isfinite(t):
                raise InvariantViolation("atom angle must be finite")
        self.atoms = tuple((float(wrap_angle(t)), m) for t, m in atoms)
        self.density = density
        self.cantor = cantor
        if not np.isfinite(self.total_mass):
            raise InvariantViolation("total mass is not finite")

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def lebesgue(cls, mass=1.0):
        """``mass`` times the normalized arc measure."""
        return cls(density=Density.uniform(mass))

    @classmethod
    def dirac(cls, theta=0.0, mass=1.0):
        return cls(atoms=[(theta, mass)])

    @classmethod
    def cantor_measure(cls, ratio=1.0 / 3.0, depth=20, mass=1.0, base=(-np.pi / 2, np.pi / 2)):
        return cls(cantor=CantorPart(ratio, depth, mass, tuple(base)))

    @classmethod
    def from_dict(cls, spec):
        if not isinstance(spec, dict):
            raise ParseError("measure spec must be a JSON object")
        unknown = set(spec) - {"atoms", "density", "cantor"}
        if unknown:
            raise ParseError(f"measure: unknown fields {sorted(unknown)}")
        try:
            atoms = [(a["theta"], a["mass"]) for a in spec.get("atoms", [])]
        except (KeyError, TypeError):
            raise ParseError("measure.atoms entries need 'theta' and 'mass'") from None
        density = Density.from_dict(spec["density"]) if spec.get("density") else None
        cantor = None
        if spec.get("cantor"):
            c = spec["cantor"]
            try:
                cantor = CantorPart(float(c["ratio"]), c["depth"], float(c["mass"]),
                                    tuple(float(v) for v in c["base"]))
            except KeyError as exc:
                raise ParseError(f"measure.cantor: missing field {exc}") from None
        return cls(atoms, density, cantor)

    def to_dict(self):
        out = {}
        if self.atoms:
            out["atoms"] = [{"theta": t, "mass": m} for t, m in self.atoms]
        if self.density is not None:
            out["density"] = self.density.spec
        if self.cantor is not None:
            out["cantor"] = self.cantor.to_dict()
        return out

    def __add__(self, other):
        if self.density is not None and other.density is not None:
            raise NotImplementedError("sum of two densities")
        if self.cantor is not None and other.cantor is not None:
            raise NotImplementedError("sum of two Cantor parts")
        return Measure(self.atoms + other.atoms, self.density or other.density,
                       self.cantor or other.cantor)

    def __repr__(self):
        parts = []
        if self.atoms:
            parts.append(f"{len(self.atoms)} atoms")
        if self.density is not None:
            parts.append(f"density={self.density.kind}")
        if self.cantor is not None:
            parts.append(f"cantor(depth={self.cantor.depth})")
        return f"Measure({', '.join(parts) or 'zero'}; mass={self.total_mass:.6g})"

    # -- basic structure -----------------------------------------------------

    @property
    def is_zero(self):
        return self.total_mass == 0.0

    @property
    def is_rotation_invariant(self):
        return (not self.atoms and self.cantor is None and self.density is not None
                and self.density.kind == "uniform")

    @cached_property
    def _points(self):
        """All point masses (explicit atoms and Cantor atoms), sorted by angle."""
        th = [np.array([t for t, _ in self.atoms])]
        ms = [np.array([m for _, m in self.atoms])]
        if self.cantor is not None:
            ca = self.cantor.atoms()
            th.append(wrap_angle(ca))
            ms.append(np.full(ca.size, self.cantor.mass / ca.size))
        th = np.concatenate(th)
        ms = np.concatenate(ms)
        order = np.argsort(th, kind="stable")
        th, ms = th[order], ms[order]
        # periodic extension for arc queries
        ext_th = np.concatenate([th - TWO_PI, th, th + TWO_PI])
        ext_cum = np.concatenate([[0.0], np.cumsum(np.tile(ms, 3))])
        return th, ms, ext_th, ext_cum

    @property
    def point_angles(self):
        return self._points[0]

    @property
    def point_masses(self):
        return self._points[1]

    @cached_property
    def _density_table(self):
        d = self.density
        br = graded_breaks(-np.pi, np.pi, foci=d.foci, min_width=1e-12, max_width=np.pi / 64)
        br = np.unique(np.concatenate([br, d.breaks]))
        x, w = gauss_legendre(16)
        width = np.diff(br)
        nodes = br[:-1, None] + width[:, None] * x
        panel = (d(nodes) * w).sum(axis=1) * width / TWO_PI
        for f in d.foci:
            _singular_tail(br, panel, f)
        cum = np.concatenate([[0.0], np.cumsum(panel)])
        return br, cum

    @cached_property
    def density_mass(self):
        if self.density is None:
            return 0.0
        return float(self._density_table[1][-1])

    @cached_property
    def total_mass(self):
        m = sum(mass for _, mass in self.atoms) + self.density_mass
        if self.cantor is not None:
            m += self.cantor.mass
        return float(m)

    # -- cumulative distribution ----------------------------------------------

    def _density_cdf(self, theta):
        """Density mass of [-pi, theta] for theta in [-pi, pi]."""
        br, cum = self._density_table
        theta = np.clip(np.asarray(theta, dtype=float), -np.pi, np.pi)
        idx = np.clip(np.searchsorted(br, theta, side="right") - 1, 0, br.size - 2)
        left = br[idx]
        x, w = gauss_legendre(16)
        h = theta - left
        nodes = left[..., None] + h[..., None] * x
        part = (self.density(nodes) * w).sum(axis=-1) * h / TWO_PI
        return cum[idx] + part

    def _density_F(self, theta):
        """Periodic extension: F(theta + 2pi) = F(theta) + density mass."""
        theta = np.asarray(theta, dtype=float)
        k = np.floor((theta + np.pi) / TWO_PI)
        return k * self.density_mass + self._density_cdf(theta - k * TWO_PI)

    def arc_mass(self, center, half_length):
        """Mass of the closed arc [center - half_length, center + half_length]."""
        center = np.asarray(center, dtype=float)
        s = np.asarray(half_length, dtype=float)
        if np.any(s < 0):
            raise ValueError("half-length must be >= 0")
        lo, hi = center - s, center + s
        total = np.zeros(np.broadcast(lo, hi).shape)
        _, _, ext_th, ext_cum = self._points
        if ext_th.size:
            lo_w = wrap_angle(lo)
            hi_w = lo_w + (hi - lo)
            i0 = np.searchsorted(ext_th, lo_w, side="left")
            i1 = np.searchsorted(ext_th, hi_w, side="right")
            total = total + ext_cum[i1] - ext_cum[i0]
        if self.density is not None:
            total = total + self._density_F(hi) - self._density_F(lo)
        full = np.broadcast_to(s >= np.pi, total.shape)
        total = np.where(full, self.total_mass, total)
        return total if total.ndim else float(total)

    # -- discretization for singular integrals ---------------------------------

    def discretize(self, center=0.0, resolution=1e-3, eta=CELL_ETA, order=16):
        """
        Quadrature nodes for integrals against ``mu`` whose kernel is peaked at
        ``center`` with width ``resolution``.

        Returns angles in the window [center - pi, center + pi] and weights.
        Atoms are exact, Cantor atoms are merged by ``eta``-separation, and the
        density is integrated on panels graded toward ``center`` and toward its
        own singular points.
        """
        th, ms = [], []
        if self.atoms:
            a = np.array([t for t, _ in self.atoms])
            th.append(center + wrap_angle(a - center))
            ms.append(np.array([m for _, m in self.atoms]))
        if self.cantor is not None:
            c, m = self.cantor.tree_nodes(center, resolution, eta)
            th.append(center + wrap_angle(c - center))
            ms.append(m)
        if self.density is not None and self.density_mass > 0:
            nodes, w = self._density_nodes(center, resolution, order)
            th.append(nodes)
            ms.append(w)
        if not th:
            return np.empty(0), np.empty(0)
        return np.concatenate(th), np.concatenate(ms)

    def _density_nodes(self, center, resolution, order=16, max_width=np.pi / 16):
        d = self.density
        lo, hi = center - np.pi, center + np.pi
        foci_d = center + wrap_angle(d.foci - center)
        foci = np.concatenate([[center], foci_d])
        widths = np.concatenate([[resolution / 8.0], np.full(foci_d.size, 1e-10)])
        br = graded_breaks(lo, hi, foci=foci, min_width=widths, max_width=max_width)
        extra = center + wrap_angle(d.breaks - center)
        br = np.unique(np.concatenate([br, extra[(extra > lo) & (extra < hi)]]))
        nodes, w = panel_rule(br, order)
        return nodes, w * d(nodes) / TWO_PI

    def integration_nodes(self, foci=(), cantor_level=8, order=8, max_width=np.pi / 8,
                          min_width=1e-8):
        """
        Moderate-size node set for integrating a function of the boundary
        point against ``mu`` (energy routes).  Density panels are graded toward
        ``foci`` and the density's own singular points.
        """
        th, ms = [], []
        if self.atoms:
            th.append(np.array([t for t, _ in self.atoms]))
            ms.append(np.array([m for _, m in self.atoms]))
        if self.cantor is not None:
            lev = min(cantor_level, self.cantor.depth)
            c = self.cantor.cells(lev)
            th.append(wrap_angle(c))
            ms.append(np.full(c.size, self.cantor.mass / c.size))
        if self.density is not None and self.density_mass > 0:
            d = self.density
            f = np.concatenate([wrap_angle(np.asarray(foci, dtype=float)), d.foci])
            br = graded_breaks(-np.pi, np.pi, foci=f, min_width=min_width, max_width=max_width)
            br = np.unique(np.concatenate([br, d.breaks]))
            nodes, w = panel_rule(br, order)
            th.append(nodes)
            ms.append(w * d(nodes) / TWO_PI)
        if not th:
            return np.empty(0), np.empty(0)
        th, ms = np.concatenate(th), np.concatenate(ms)
        keep = ms > 0
        return th[keep], ms[keep]

    # -- analytic quantities --------------------------------------------------

    def poisson_ray(self, theta, radii, resolution=None, eta=CELL_ETA, order=16):
        """Poisson integral at ``radii * e^{i theta}`` (one direction, many radii)."""
        radii = np.asarray(radii, dtype=float)
        if resolution is None:
            resolution = max(float(np.min(1.0 - radii)), GUARD_BAND) if radii.size else 1.0
        nodes, w = self.discretize(theta, resolution, eta, order)
        if nodes.size == 0:
            return np.zeros_like(radii)
        out = np.empty(radii.shape)
        flat_r = radii.ravel()
        res = out.ravel()
        dt = nodes - theta
        step = max(1, int(4_000_000 // max(nodes.size, 1)))
        for i in range(0, flat_r.size, step):
            r = flat_r[i:i + step, None]
            res[i:i + step] = poisson_kernel(r, dt[None, :]) @ w
        return res.reshape(radii.shape)

    def poisson(self, z):
        z = complex(z)
        r = abs(z)
        if r > 1.0 - GUARD_BAND:
            raise BoundaryTooClose(f"|z| = {r!r} exceeds 1 - 2^-40")
        if r == 0.0:
            return self.total_mass
        return float(self.poisson_ray(np.angle(z), np.array([r]), 1.0 - r)[0])

    def f_mu(self, x):
        """``F(x) = int x^2 / (x^2 + s^2) dmu(s)`` with s the angle in (-pi, pi]."""
        x = float(x)
        if x < 0:
            raise ValueError("x must be >= 0")
        if x == 0.0:
            return float(self.arc_mass(0.0, 0.0))
        s, w = self.discretize(0.0, x)
        if s.size == 0:
            return 0.0
        s = wrap_angle(s)
        return float(np.sum(w * x * x / (x * x + s * s)))

    def fourier_moments(self, kmax, max_order=MAX_ORDER):
        """``int e^{-i k theta} dmu`` for k = 0..kmax."""
        kmax = int(kmax)
        if kmax > max_order:
            raise OrderTooLarge(f"order {kmax} exceeds configured maximum {max_order}")
        cache = self.__dict__.setdefault("_moment_cache", {})
        for kk, val in cache.items():
            if kk >= kmax:
                return val[: kmax + 1].copy()
        ks = np.arange(kmax + 1)
        out = np.zeros(kmax + 1, dtype=complex)
        if self.atoms:
            t = np.array([a for a, _ in self.atoms])
            m = np.array([b for _, b in self.atoms])
            out += np.exp(-1j * np.outer(ks, t)) @ m
        if self.cantor is not None:
            out += self.cantor.moments(ks)
        if self.density is not None and self.density_mass > 0:
            hw = min(np.pi / 16, 8.0 / max(kmax, 1))
            nodes, w = self._density_nodes(0.0, 1.0, order=16, max_width=hw)
            out += _exp_sums(nodes, w, kmax)
        out[0] = self.total_mass
        cache[kmax] = out
        return out.copy()

    def fourier_moment(self, k, max_order=MAX_ORDER):
        k = int(k)
        if abs(k) > max_order:
            raise OrderTooLarge(f"|k| = {abs(k)} exceeds configured maximum {max_order}")
        val = self.fourier_moments(abs(k), max_order)[abs(k)]
        return complex(np.conj(val)) if k < 0 else complex(val)

    def sup_arc_mass(self, centers, t):
        """Largest closed-arc mass over the candidate ``centers``; returns (value, center)."""
        centers = np.asarray(centers, dtype=float)
        if centers.size == 0:
            return 0.0, float("nan")
        best_v, best_c = -1.0, float("nan")
        for i in range(0, centers.size, 1 << 18):
            chunk = centers[i:i + (1 << 18)]
            vals = np.atleast_1d(self.arc_mass(chunk, t))
            j = int(np.argmax(vals))
            if vals[j] > best_v:
                best_v, best_c = float(vals[j]), float(chunk[j])
        return best_v, best_c

    def modulus_of_continuity(self, t, grid=1 << 14, rtol=1e-6, max_grid=1 << 20):
        """Supremum over centers of the mass of a closed arc of half-length t."""
        t = float(t)
        if t >= np.pi:
            return self.total_mass
        pts = self.point_angles
        cand = [pts + t, pts - t, pts]
        best, _ = self.sup_arc_mass(np.concatenate(cand), t) if pts.size else (0.0, None)
        if self.density is None or self.density_mass == 0:
            return max(best, 0.0)
        prev = None
        n = grid
        while True:
            g = -np.pi + TWO_PI * (np.arange(n) + 0.5) / n
            g = np.concatenate([g, self.density.breaks + t, self.density.breaks - t])
            val, _ = self.sup_arc_mass(g, t)
            best = max(best, val)
            if prev is not None and abs(best - prev) <= rtol * max(best, 1e-300):
                return best
            if n >= max_grid:
                return best
            prev = best
            n *= 2

    def support_samples(self, n=1 << 10):
        """Angles spread over supp(mu): atoms, Cantor cell centers and density support."""
        out = [np.array([t for t, _ in self.atoms])]
        if self.cantor is not None:
            lev = min(self.cantor.depth, max(1, int(np.ceil(np.log2(n)))))
            out.append(wrap_angle(self.cantor.cells(lev)))
        if self.density is not None and self.density_mass > 0:
            g = -np.pi + TWO_PI * (np.arange(n) + 0.5) / n
            out.append(g[self.density(g) > 0])
        return np.concatenate(out)


def _singular_tail(br, panel, focus):
    """
    Replace the masses of the two panels touching ``focus`` by the geometric
    tail of the dyadic ladder beside them.  Gauss rules lose digits on a
    panel ending at a power singularity; the ladder masses m_k of a power law
    have a constant ratio q, and the mass below m_k is m_k q / (1 - q).
    """
    i = int(np.searchsorted(br, focus))
    if i >= br.size or br[i] != focus:
        return
    for first, step in ((i, 1), (i - 1, -1)):
        second, third = first + step, first + 2 * step
        if min(first, third) < 0 or max(first, third) >= panel.size:
            continue
        w0, w1, w2 = (abs(br[k + 1] - br[k]) for k in (first, second, third))
        if not (np.isclose(w1, 2 * w0) and np.isclose(w2, 2 * w1)):
            continue
        m1, m2 = panel[second], panel[third]
        if m1 <= 0 or m2 <= 0:
            continue
        q = m1 / m2
        if 0.25 < q < 1.0:
            panel[first] = m1 * q / (1.0 - q)


def _exp_sums(nodes, weights, kmax, block=64):
    """sum_j w_j exp(-i k t_j) for k = 0..kmax, in blocks to bound memory."""
    out = np.empty(kmax + 1, dtype=complex)
    base_block = np.exp(-1j * np.outer(np.arange(block), nodes))
    step = np.exp(-1j * block * nodes)
    carry = weights.astype(complex)
    for k0 in range(0, kmax + 1, block):
        k1 = min(k0 + block, kmax + 1)
        out[k0:k1] = base_block[: k1 - k0] @ carry
        carry = carry * step
    return out


# -------------------------------------------------------- functional API ----

def arc_mass(mu, center, half_length):
    """mu of the closed arc with the given center angle and half-length in [0, pi]."""
    if np.any(np.asarray(half_length) > np.pi):
        raise ValueError("half-length must lie in [0, pi]")
    return mu.arc_mass(center, half_length)


def poisson_eval(mu, z):
    """Poisson integral ``P[mu](z)`` for |z| <= 1 - 2^-40."""
    return mu.poisson(z)


def f_mu_eval(mu, x):
    return mu.f_mu(x)


def modulus_of_continuity(mu, t, **kw):
    return mu.modulus_of_continuity(t, **kw)


def fourier_moment(mu, k, max_order=MAX_ORDER):
    return mu.fourier_moment(k, max_order)
