"""
Finite-evidence classification of improper-integral traces.

A trace ``T(j)`` holds the integral truncated at cutoff ``2**-j`` for
increasing ``j``.  Only the last ``window`` increments are inspected:

* divergent  - every increment is at least ``delta``;
* convergent - increments decay geometrically with ratio at most
  ``max_ratio`` and the geometric tail bound is below ``rtol * T``;
* otherwise the trace is inconclusive.
"""

from dataclasses import dataclass

import numpy as np

from .errors import Inconclusive

__all__ = ["TraceClass", "classify_trace"]

DELTA = 1e-3
WINDOW = 8
MAX_RATIO = 0.7
TAIL_RTOL = 1e-3


@dataclass(frozen=True)
class TraceClass:
    """
    Outcome of :func:`classify_trace`.

    ``value`` is the last trace value plus the tail bound for convergent
    traces; ``growth`` is the mean increment per step for divergent ones.
    """

    divergent: bool
    value: float
    growth: float
    tail_bound: float

    @property
    def label(self):
        return "divergent" if self.divergent else "convergent"


def classify_trace(trace, delta=DELTA, window=WINDOW, max_ratio=MAX_RATIO, rtol=TAIL_RTOL):
    """
    Classify a nondecreasing trace as convergent or divergent.

    Raises
    ------
    Inconclusive
        If neither rule applies.  The trace is attached to the exception.
    """
    trace = np.asarray(trace, dtype=float)
    if trace.size < window + 1:
        raise ValueError(f"trace needs at least {window + 1} samples")
    inc = np.diff(trace[-(window + 1):])
    last = float(trace[-1])
    if np.all(inc >= delta):
        return TraceClass(True, np.inf, float(np.mean(inc)), np.inf)
    # round-off can leave tiny negative increments on a flat trace
    if np.all(inc >= -1e-13 * max(abs(last), 1.0)):
        inc = np.maximum(inc, 0.0)
        if not np.any(inc):
            return TraceClass(False, last, 0.0, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(inc[:-1] > 0, inc[1:] / inc[:-1], np.where(inc[1:] > 0, np.inf, 0.0))
        rho = float(np.max(ratios))
        if rho <= max_ratio:
            tail = float(inc[-1] * rho / (1.0 - rho))
            if tail < rtol * abs(last):
                return TraceClass(False, last + tail, 0.0, tail)
    raise Inconclusive("trace is neither clearly bounded nor clearly growing", trace=trace)
