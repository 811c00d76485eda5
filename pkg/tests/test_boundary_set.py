import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmu.boundary_set import AdmissibleWeight, ClosedSet, local_modulus, m_psi, m_psi_branches
from dmu.errors import InvalidWeight, InvariantViolation, ParseError
from dmu.measure import Measure


def test_cantor_length_and_counts():
    E = ClosedSet.cantor(1 / 3, 6)
    np.testing.assert_allclose(E.lebesgue_measure, np.pi * (2 / 3) ** 6, rtol=1e-13)
    assert E.n_gaps == 2 ** 6  # 63 inner gaps plus the outer one
    # a cover by arcs one cell wide needs one arc per cell
    cell = np.pi / 3 ** 6
    assert E.covering_number(cell / 2 * (1 + 1e-9)) == 2 ** 6
    starts, lengths = E.gaps()
    np.testing.assert_allclose(np.sum(lengths), 2 * np.pi - E.lebesgue_measure, rtol=1e-13)


def test_finite_set_counting_functions():
    E = ClosedSet.finite([0.0, np.pi / 2, np.pi, -np.pi / 2])
    for t in (1e-6, 0.3, 0.7):
        np.testing.assert_allclose(E.thickened_length(t), 8 * t, rtol=1e-12, atol=1e-15)
        assert E.n_count(t) == 8
    assert E.thickened_length(np.pi / 4) == pytest.approx(2 * np.pi)
    assert E.n_count(np.pi / 4) == 0
    np.testing.assert_allclose(E.distance(np.array([0.1, 1.0, 3.0])),
                               [0.1, np.pi / 2 - 1.0, np.pi - 3.0], rtol=1e-13)
    assert E.covering_number(1e-3) == 4


def test_full_circle():
    E = ClosedSet.full_circle()
    assert E.is_full_circle
    assert E.thickened_length(0.0) == 2 * np.pi
    assert E.distance(1.0) == 0.0


def test_thin_cantor_cells_are_nested():
    lengths = [ClosedSet.thin_cantor_cell(1, d).lebesgue_measure for d in range(4)]
    assert all(a > b for a, b in zip(lengths, lengths[1:]))
    # log-integral of 1/|E_t| keeps growing on dyadic shells
    E = ClosedSet.thin_cantor_cell(1, 0)
    shells = [2.0 ** -j / E.thickened_length(2.0 ** -j) for j in range(10, 40)]
    assert min(shells) > 1e-3


def test_invariants():
    with pytest.raises(InvariantViolation):
        ClosedSet.cantor(0.5, 3)
    with pytest.raises(InvariantViolation):
        ClosedSet.from_gaps([(0.0, 1.0), (0.5, 2.0)])
    with pytest.raises(ParseError):
        ClosedSet.from_dict({"kind": "blob"})


def test_dict_round_trip():
    for E in (ClosedSet.cantor(0.25, 5), ClosedSet.finite([1.0, 2.0]),
              ClosedSet.from_gaps([(0.0, 1.0)]), ClosedSet.full_circle()):
        F = ClosedSet.from_dict(E.to_dict())
        assert F.lebesgue_measure == E.lebesgue_measure
        np.testing.assert_array_equal(F.thickened_length(np.array([1e-3, 0.1])),
                                      E.thickened_length(np.array([1e-3, 0.1])))


def test_local_modulus_closed_forms():
    E = ClosedSet.finite([0.0])
    for t in (1e-6, 0.1, 1.0):
        np.testing.assert_allclose(local_modulus(Measure.lebesgue(), E, t), t / np.pi, rtol=1e-9)
        assert local_modulus(Measure.dirac(0.05), E, t) == (1.0 if t >= 0.05 else 0.0)


def test_m_psi_for_a_point():
    # E = {0}, psi(t) = t: both branches equal 2s for s < pi
    E = ClosedSet.finite([0.0])
    psi = AdmissibleWeight.power(1.0)
    s = np.array([1e-8, 1e-3, 0.5])
    a, b = m_psi_branches(E, psi, s)
    np.testing.assert_allclose(a, 2 * s, rtol=1e-12)
    np.testing.assert_allclose(b, 2 * s, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(m_psi(E, psi, s), 2 * s, rtol=1e-12, atol=1e-15)


def test_admissible_weight_validation():
    AdmissibleWeight.power(0.5).validate()
    AdmissibleWeight.power(1.7).validate()
    with pytest.raises(InvalidWeight):
        AdmissibleWeight(lambda t: 1.0 + t, "concave", 1.0)
    with pytest.raises(InvalidWeight):
        AdmissibleWeight(lambda t: t ** 2, "concave", 2.0)
    with pytest.raises(InvalidWeight):
        AdmissibleWeight.power(-1.0)


def test_numeric_log_primitive():
    psi = AdmissibleWeight(lambda t: t / (1 + t), "concave", 1.0)
    u = np.array([0.1, 1.0, 3.0])
    np.testing.assert_allclose(psi.log_primitive(u), np.log1p(u), rtol=1e-10)


@given(st.lists(st.floats(-np.pi, np.pi), min_size=1, max_size=12),
       st.floats(1e-9, 4.0), st.floats(1e-9, 4.0))
@settings(max_examples=100, deadline=None)
def test_counting_function_properties(points, t1, t2):
    E = ClosedSet.finite(points)
    lo, hi = sorted((t1, t2))
    assert E.thickened_length(lo) <= E.thickened_length(hi) + 1e-12
    assert E.n_count(lo) >= E.n_count(hi)
    assert E.thickened_length(hi) <= 2 * np.pi
    # |E_t| <= N(t) t + (number of points) 2t and the cover needs at most one arc per point
    assert E.covering_number(lo) <= len(set(np.round(points, 12)))
    assert E.thickened_length(lo) <= 2 * lo * len(points) + 1e-12
