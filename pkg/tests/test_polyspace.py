import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normesh.errors import ExtractionError, ScalingError
from normesh.mesh import alpha, build_mesh
from normesh.polyspace import (TotalDegreeBasis, approx_fekete, basis_for, graded_indices,
                               greedy_rows, lebesgue_constant, ls_operator_norm,
                               ls_projection, numeric_dimension, numerical_rank,
                               orthonormalize, space_dimension, vandermonde,
                               variety_dimension)
from normesh.sections import EXAMPLE_PARAMS, example_section, make_section


# --- basis and Vandermonde ------------------------------------------------------

def test_vandermonde_examples():
    b = TotalDegreeBasis(1, 1, [-1], [1])
    np.testing.assert_array_equal(vandermonde([[-1], [1]], b), [[1, -1], [1, 1]])
    b0 = TotalDegreeBasis(2, 0, [0, 0], [1, 1])
    np.testing.assert_array_equal(vandermonde(np.random.default_rng(0).random((3, 2)), b0),
                                  np.ones((3, 1)))
    b2 = TotalDegreeBasis(1, 2, [-1], [1])
    np.testing.assert_allclose(vandermonde([[0.0]], b2), [[1, 0, -1]], atol=1e-15)


def test_scaling_error_outside_box():
    b = TotalDegreeBasis(2, 2, [0, 0], [1, 1])
    with pytest.raises(ScalingError):
        vandermonde([[0.5, 1.1]], b)
    V = vandermonde(np.random.default_rng(1).random((50, 2)), b)
    assert np.max(np.abs(V)) <= 1 + 1e-15


def _pascal(d, n):
    # dim P_n^d = dim P_n^{d-1} + dim P_{n-1}^d
    if d == 0 or n == 0:
        return 1
    return _pascal(d - 1, n) + _pascal(d, n - 1)


def test_graded_count_matches_pascal():
    for d in (1, 2, 3):
        for n in range(21):
            idx = graded_indices(d, n)
            assert len(idx) == space_dimension(d, n) == _pascal(d, n)
            assert len({tuple(a) for a in idx}) == len(idx)
            assert np.all(np.diff(idx.sum(axis=1)) >= 0)


# --- numerical dimension ---------------------------------------------------------

def test_dimension_examples():
    assert numeric_dimension(make_section("sphere"), 3).numeric_rank == 16
    assert numeric_dimension(make_section("disk"), 4).numeric_rank == 15
    info = numeric_dimension(make_section("torus", R=3.0, r=1.0), 4)
    assert info.numeric_rank == 34 == info.variety_count
    assert any("2n^2" in note for note in info.notes)


def test_sphere_variety_identity():
    for n in range(2, 11):
        assert variety_dimension(3, n, 2) == math.comb(n + 3, 3) - math.comb(n + 1, 3) == (n + 1) ** 2


@pytest.mark.parametrize("kind", sorted(EXAMPLE_PARAMS))
def test_rank_saturated_in_probe_m(kind):
    spec = example_section(kind)
    for n in range(1, 6):
        ranks = {numeric_dimension(spec, n, probe_m=pm).numeric_rank for pm in (4, 6, 8)}
        assert len(ranks) == 1, (n, ranks)
        assert ranks.pop() <= space_dimension(spec.ambient_dim, n)


# --- Fekete ----------------------------------------------------------------------

def _interval_mesh():
    return build_mesh(make_section("interval"), 4, 3)


def test_fekete_interval_against_exhaustive_oracle():
    mesh = _interval_mesh()
    assert len(mesh) == 13
    res = approx_fekete(mesh)
    x = mesh.points[:, 0]
    assert len(res.indices) == 5 and len(set(np.round(res.points[:, 0], 14))) == 5
    assert np.isclose(res.points[:, 0].min(), -1) and np.isclose(res.points[:, 0].max(), 1)
    basis = TotalDegreeBasis(1, 4, [-1], [1])
    V = vandermonde(mesh.points, basis)
    best = max(abs(np.linalg.det(V[list(s)])) for s in itertools.combinations(range(13), 5))
    got = abs(np.linalg.det(V[res.indices]))
    assert got >= 0.5 * best
    assert set(np.flatnonzero(np.isin(x, [-1.0, 1.0]))) <= set(res.indices)


def test_fekete_disk_degree_one_not_collinear():
    res = approx_fekete(build_mesh(make_section("disk"), 1, 2))
    a, b, c = res.points
    u, v = b - a, c - a
    assert abs(u[0] * v[1] - u[1] * v[0]) > 1e-6


def test_fekete_sphere_full_rank():
    mesh = build_mesh(make_section("sphere"), 2, 2, dedup=True)
    probe = build_mesh(make_section("sphere"), 2, 8, dedup=True)
    res = approx_fekete(mesh, probe=probe)
    assert len(res.indices) == 9
    basis = basis_for(mesh.points, probe.points, degree=2)
    assert numerical_rank(vandermonde(res.points, basis))[0] == 9
    assert np.isfinite(res.lebesgue) and res.lebesgue >= 1 - 1e-12


def test_fekete_interpolation_reproduces_polynomials():
    spec = example_section("circular_sector")
    mesh = build_mesh(spec, 4, 2, dedup=True)
    res = approx_fekete(mesh)
    basis = basis_for(mesh.points, degree=4)
    rng = np.random.default_rng(3)
    coef = rng.standard_normal(len(basis))
    V = vandermonde(mesh.points, basis)
    values = V @ coef
    ob = orthonormalize(mesh.points, basis)
    QS = ob(res.points)
    interp = ob.values @ np.linalg.solve(QS, values[res.indices])
    cond = np.linalg.cond(QS)
    assert np.max(np.abs(interp - values)) <= 1e-10 * cond * np.max(np.abs(values))


def test_greedy_rows_ties_and_deficiency():
    Q = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
    np.testing.assert_array_equal(greedy_rows(Q, 2), [0, 2])
    with pytest.raises(ExtractionError):
        greedy_rows(np.array([[1.0, 0.0], [2.0, 0.0]]), 2)


def test_lebesgue_constant_at_all_nodes_is_one():
    mesh = _interval_mesh()
    ob = orthonormalize(mesh.points, TotalDegreeBasis(1, 4, [-1], [1]))
    res = approx_fekete(mesh)
    assert lebesgue_constant(ob, res.points, res.points) == pytest.approx(1.0, abs=1e-12)


# --- least squares ----------------------------------------------------------------

def _disk_mesh(n=4):
    return build_mesh(make_section("disk"), n, 2, dedup=True)


def test_ls_constant_function():
    mesh = _disk_mesh()
    fit = ls_projection(mesh, np.ones(len(mesh)))
    np.testing.assert_allclose(fit.fitted, 1.0, atol=1e-13)
    assert fit.residual <= 1e-13


def test_ls_reproduces_coordinate():
    mesh = _disk_mesh(1)
    fit = ls_projection(mesh, mesh.points[:, 0])
    assert fit.residual <= 1e-12
    x = np.array([[0.3, -0.2]])
    assert fit(x)[0] == pytest.approx(0.3, abs=1e-12)


def test_ls_runge_improves_with_degree():
    spec = make_section("disk")
    errs = []
    for n in (4, 8):
        mesh = build_mesh(spec, n, 2, dedup=True)
        f = 1.0 / (1.0 + 25.0 * np.sum(mesh.points ** 2, axis=1))
        errs.append(ls_projection(mesh, f).residual)
    assert errs[1] < errs[0]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["disk", "circular_segment", "sphere", "torus", "solid_cap"]),
       st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_ls_idempotent(kind, n, seed):
    mesh = build_mesh(example_section(kind), n, 2, dedup=True)
    f = np.random.default_rng(seed).standard_normal(len(mesh))
    fit = ls_projection(mesh, f)
    again = ls_projection(mesh, fit.fitted)
    np.testing.assert_allclose(again.coefficients, fit.coefficients, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["disk", "planar_lune", "sphere", "spherical_rectangle", "ball"]),
       st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_ls_reproduces_random_polynomials(kind, n, seed):
    mesh = build_mesh(example_section(kind), n, 2, dedup=True)
    basis = basis_for(mesh.points, degree=n)
    coef = np.random.default_rng(seed).standard_normal(len(basis))
    values = vandermonde(mesh.points, basis) @ coef
    fit = ls_projection(mesh, values, basis=basis)
    assert fit.relative_residual <= 1e-8


def test_ls_rejects_bad_samples():
    mesh = _disk_mesh(2)
    with pytest.raises(ValueError):
        ls_projection(mesh, np.ones(3))
    f = np.ones(len(mesh))
    f[0] = np.nan
    with pytest.raises(ValueError):
        ls_projection(mesh, f)


def test_ls_operator_norm_single_point():
    b = TotalDegreeBasis(2, 0, [0, 0], [1, 1])
    assert ls_operator_norm(np.array([[0.5, 0.5]]), b,
                            probe=np.random.default_rng(0).random((20, 2))) == pytest.approx(1.0)


def test_ls_operator_norm_bounds():
    mesh = build_mesh(make_section("disk"), 4, 2, dedup=True)
    probe = build_mesh(make_section("disk"), 4, 8, dedup=True)
    value = ls_operator_norm(mesh, probe=probe)
    assert 1 <= value <= 2 * math.sqrt(2) * math.sqrt(len(mesh))
    mesh = _interval_mesh()
    probe = build_mesh(make_section("interval"), 4, 12)
    value = ls_operator_norm(mesh, probe=probe)
    assert 1 <= value <= alpha(3) * math.sqrt(13)


def test_ls_summary_bound_check():
    mesh = build_mesh(make_section("sphere"), 4, 2, dedup=True)
    probe = build_mesh(make_section("sphere"), 4, 8, dedup=True)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fit = ls_projection(mesh, mesh.points[:, 2], probe=probe)
    s = fit.summary()
    assert s["rank"] == 25 and s["bound_holds"] is True
    assert s["bound"] == pytest.approx(mesh.c * math.sqrt(len(mesh)))
