"""
Panel quadrature helpers shared by every module.

Everything here works on composite Gauss-Legendre rules over panels that are
refined geometrically toward a list of focus points.  The same panel builder
serves the density part of a measure, the Herglotz integrals of outer
functions and the radial integral of the kernel estimate.
"""

from functools import lru_cache

import numpy as np

__all__ = [
    "gauss_legendre",
    "graded_breaks",
    "panel_rule",
    "dyadic_rule",
    "wrap_angle",
]

TWO_PI = 2.0 * np.pi


@lru_cache(maxsize=32)
def gauss_legendre(order):
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def wrap_angle(theta):
    """Map angles into (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    out = np.mod(theta + np.pi, TWO_PI) - np.pi
    out = np.where(out == -np.pi, np.pi, out)
    # angles already in range pass through exactly (keeps tiny angles)
    return np.where((theta > -np.pi) & (theta <= np.pi), theta, out)


def graded_breaks(a, b, foci=(), min_width=1e-12, max_width=None):
    """
    Breakpoints of a panel partition of [a, b].

    Panels shrink geometrically (factor 2) toward every focus point inside
    [a, b] until they are narrower than ``min_width``; away from the foci
    panels are at most ``max_width`` wide.

    Parameters
    ----------
    a, b : float
        Interval end points, ``a < b``.
    foci : sequence of float
        Points toward which panels are refined.  The foci themselves become
        breakpoints, so integrable endpoint singularities sit on panel ends.
    min_width : float or sequence of float
        Smallest panel width next to each focus (scalar or one per focus).
    max_width : float, optional
        Largest panel width; defaults to ``b - a``.

    Returns
    -------
    ndarray
        Sorted, unique breakpoints including ``a`` and ``b``.
    """
    if max_width is None:
        max_width = b - a
    foci = np.atleast_1d(np.asarray(foci, dtype=float))
    widths = np.broadcast_to(np.asarray(min_width, dtype=float), foci.shape)
    keep = (foci >= a) & (foci <= b)
    foci, widths = foci[keep], widths[keep]

    pts = [np.array([a, b]), foci]
    for f, h in zip(foci, widths):
        # dyadic ladders on both sides of the focus
        for side, room in ((1.0, b - f), (-1.0, f - a)):
            if room <= 0:
                continue
            n = int(np.ceil(np.log2(max(room / max(h, 1e-300), 1.0))))
            steps = room * 2.0 ** -np.arange(n + 1)
            pts.append(f + side * steps)
    br = np.unique(np.concatenate(pts))
    br = br[(br >= a) & (br <= b)]

    # enforce the maximum panel width
    gaps = np.diff(br)
    n_sub = np.maximum(np.ceil(gaps / max_width).astype(int), 1)
    if np.any(n_sub > 1):
        k = np.repeat(n_sub, n_sub)
        step = np.arange(k.size) - np.repeat(np.cumsum(n_sub) - n_sub, n_sub) + 1
        pts = np.repeat(br[:-1], n_sub) + np.repeat(gaps, n_sub) * step / k
        br = np.unique(np.concatenate([br[:1], pts]))
    # drop round-off duplicates (panels a few ulps wide)
    tiny = 8 * np.finfo(float).eps * np.maximum(np.abs(br[1:]), np.abs(br[:-1]))
    br = br[np.concatenate([[True], np.diff(br) > tiny])]
    br[-1] = b
    return br


def panel_rule(breaks, order=16):
    """Composite Gauss-Legendre nodes and weights over consecutive panels."""
    x, w = gauss_legendre(order)
    breaks = np.asarray(breaks, dtype=float)
    left = breaks[:-1, None]
    width = np.diff(breaks)[:, None]
    nodes = left + width * x[None, :]
    weights = width * w[None, :]
    return nodes.ravel(), weights.ravel()


def dyadic_rule(x0, x1=1.0, order=16):
    """
    Nodes and weights for integrals over [x0, x1] whose integrand varies on
    the scale of the distance to ``x0``: panels [x0 2^k, x0 2^(k+1)].
    """
    if not x0 < x1:
        return np.empty(0), np.empty(0)
    n = int(np.ceil(np.log2(x1 / x0)))
    br = np.minimum(x0 * 2.0 ** np.arange(n + 1), x1)
    br = np.unique(np.append(br, x1))
    return panel_rule(br, order)
