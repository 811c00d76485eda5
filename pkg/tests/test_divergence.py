import numpy as np
import pytest

from dmu.divergence import classify_trace
from dmu.errors import Inconclusive


def test_geometric_trace_converges_to_its_limit():
    j = np.arange(30)
    res = classify_trace(1 - 0.5 ** j)
    assert not res.divergent
    np.testing.assert_allclose(res.value, 1.0, rtol=1e-12)


def test_linear_trace_diverges():
    res = classify_trace(0.01 * np.arange(20))
    assert res.divergent and res.label == "divergent"
    np.testing.assert_allclose(res.growth, 0.01)


def test_flat_trace_with_round_off():
    trace = 2.0 + np.array([0, 1e-16, -1e-16, 0, 0, 1e-16, 0, 0, 0, 0])
    res = classify_trace(trace)
    assert not res.divergent and res.tail_bound == 0.0


def test_slow_decay_is_inconclusive():
    trace = np.cumsum(1.0 / np.arange(1, 30) ** 2) * 1e-3
    with pytest.raises(Inconclusive) as info:
        classify_trace(trace)
    assert info.value.trace is not None


def test_short_trace_rejected():
    with pytest.raises(ValueError):
        classify_trace([0.0, 1.0])
