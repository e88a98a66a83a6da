import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import chebyshev as C

from normesh.errors import InvalidAngleError, InvalidIntervalError
from normesh.nodes1d import (AngularInterval, AngularKind, Family, Interval,
                             chebyshev_lobatto, chebyshev_zeros, psi_map,
                             subperiodic_angles)

PI = math.pi


# --- intervals ----------------------------------------------------------------

def test_interval_rejects_degenerate_and_nonfinite():
    for a, b in [(1, 1), (2, 1), (0, math.inf), (math.nan, 1)]:
        with pytest.raises(InvalidIntervalError):
            Interval(a, b)


def test_angular_kind_classification():
    assert AngularInterval(-PI, PI).kind is AngularKind.PERIODIC
    assert AngularInterval(0, 2 * PI + 5e-13).kind is AngularKind.PERIODIC
    sub = AngularInterval(-1.0, 1.0)
    assert sub.kind is AngularKind.SUBPERIODIC
    assert sub.omega == 1.0 and sub.center == 0.0
    assert AngularInterval(-PI, PI).omega == PI
    with pytest.raises(InvalidAngleError):
        AngularInterval(0, 2 * PI + 1e-9)
    with pytest.raises(InvalidAngleError):
        AngularInterval(1, 1)


# --- Chebyshev-Lobatto ------------------------------------------------------------

def test_lobatto_examples():
    np.testing.assert_array_equal(chebyshev_lobatto(2, (-1, 1)).nodes, [-1, 0, 1])
    np.testing.assert_array_equal(chebyshev_lobatto(1, (0, 1)).nodes, [0, 1])
    h = math.sqrt(2) / 2
    expected = [0, (1 - h) / 2, 0.5, (1 + h) / 2, 1]
    np.testing.assert_allclose(chebyshev_lobatto(4, (0, 1)).nodes, expected, atol=1e-15)


def test_lobatto_matches_cosine_definition():
    for nu in (1, 2, 5, 17, 64):
        ref = np.sort(np.cos(np.arange(nu + 1) * PI / nu))
        got = chebyshev_lobatto(nu, (-1, 1))
        assert got.family is Family.LOBATTO and len(got) == nu + 1
        np.testing.assert_allclose(got.nodes, ref, atol=2e-16 * nu)


def test_lobatto_rejects_nu_zero():
    with pytest.raises(ValueError):
        chebyshev_lobatto(0, (-1, 1))


# --- Chebyshev zeros -----------------------------------------------------------------

def test_zeros_examples():
    np.testing.assert_array_equal(chebyshev_zeros(0, (-1, 1)).nodes, [0.0])
    h = math.sqrt(2) / 2
    np.testing.assert_allclose(chebyshev_zeros(1, (-1, 1)).nodes, [-h, h], atol=1e-16)
    s = math.sqrt(3) / 2
    np.testing.assert_allclose(chebyshev_zeros(2, (0, 2)).nodes, [1 - s, 1, 1 + s], atol=1e-15)


def test_zeros_are_roots_of_chebyshev_polynomial():
    for nu in (0, 1, 4, 11, 40):
        x = chebyshev_zeros(nu, (-1, 1)).nodes
        coef = np.zeros(nu + 2)
        coef[-1] = 1
        assert np.max(np.abs(C.chebval(x, coef))) < 1e-13
        assert np.all(np.abs(x) < 1)


# --- psi map ------------------------------------------------------------------------

def test_psi_examples():
    assert psi_map(PI, 1.0) == pytest.approx(PI, abs=1e-15)
    assert psi_map(0.7, 0.0) == 0.0
    assert psi_map(PI / 2, 1.0) == pytest.approx(PI / 2, abs=1e-15)
    s = np.linspace(-1, 1, 11)
    np.testing.assert_allclose(psi_map(PI, s), 2 * np.arcsin(s), atol=1e-15)


def test_psi_errors():
    for omega in (0.0, -1.0, PI + 1e-6):
        with pytest.raises(InvalidAngleError):
            psi_map(omega, 0.5)
    with pytest.raises(ValueError):
        psi_map(1.0, 1.5)


@settings(max_examples=1000, deadline=None)
@given(st.floats(1e-3, PI), st.floats(-1, 1), st.floats(-1, 1))
def test_psi_monotone_and_odd(omega, s1, s2):
    if s1 == s2:
        return
    lo, hi = min(s1, s2), max(s1, s2)
    assert psi_map(omega, lo) < psi_map(omega, hi) or hi - lo < 1e-15
    assert psi_map(omega, -s1) == -psi_map(omega, s1)


# --- subperiodic angles ---------------------------------------------------------------

def test_subperiodic_examples():
    got = subperiodic_angles(1, (-PI, PI)).nodes
    np.testing.assert_allclose(got, [-2 * PI / 3, 0, 2 * PI / 3], atol=1e-15)
    got = subperiodic_angles(1, (0, 2 * PI)).nodes
    np.testing.assert_allclose(got, [PI - 2 * PI / 3, PI, PI + 2 * PI / 3], atol=1e-15)
    got = subperiodic_angles(2, (-PI / 2, PI / 2)).nodes
    assert len(got) == 5
    assert np.all((got > -PI / 2) & (got < PI / 2))
    np.testing.assert_allclose(got, -got[::-1], atol=1e-15)


def test_subperiodic_matches_definition():
    # psi applied to the zeros of T_{2nu+1}, shifted to the centre
    for nu in (1, 3, 8):
        for u, v in [(-0.3, 1.1), (0.0, 3.0), (-PI, PI)]:
            s = np.cos((2 * np.arange(2 * nu + 1) + 1) * PI / (2 * (2 * nu + 1)))
            omega = min((v - u) / 2, PI)
            ref = np.sort(2 * np.arcsin(math.sin(omega / 2) * s)) + (u + v) / 2
            np.testing.assert_allclose(subperiodic_angles(nu, (u, v)).nodes, ref, atol=1e-12)


def test_periodic_nodes_equispaced():
    for nu in range(1, 60):
        for u in (-PI, 0.0, 1.234):
            th = subperiodic_angles(nu, (u, u + 2 * PI)).nodes
            assert len(th) == 2 * nu + 1
            np.testing.assert_allclose(np.diff(th), 2 * PI / (2 * nu + 1), atol=1e-12)


intervals = st.tuples(st.floats(-50, 50), st.floats(1e-3, 100)).map(lambda t: (t[0], t[0] + t[1]))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 200), intervals)
def test_cardinality_and_order(nu, iv):
    lob = chebyshev_lobatto(nu, iv).nodes
    zer = chebyshev_zeros(nu, iv).nodes
    assert len(lob) == nu + 1 and len(zer) == nu + 1
    assert lob[0] == iv[0] and lob[-1] == iv[1]
    assert np.all(np.diff(lob) > 0) and np.all(np.diff(zer) > 0)
    assert np.all((zer > iv[0]) & (zer < iv[1]))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 200), intervals)
def test_reflection_invariance(nu, iv):
    a, b = iv
    scale = max(abs(a), abs(b), 1.0)
    for fam in (chebyshev_lobatto, chebyshev_zeros):
        x = fam(nu, iv).nodes
        np.testing.assert_allclose(a + b - x[::-1], x, atol=1e-14 * scale)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 200), st.floats(1e-3, PI - 1e-6))
def test_subperiodic_odd_symmetry(nu, omega):
    th = subperiodic_angles(nu, (-omega, omega)).nodes
    assert len(th) == 2 * nu + 1
    np.testing.assert_allclose(-th[::-1], th, atol=1e-14)
    assert np.all(np.diff(th) > 0)
    assert th[0] > -omega and th[-1] < omega
