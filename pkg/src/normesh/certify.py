"""Certification of norming inequalities ``||p||_K <= c ||p||_A``.

Two independent routes are provided:

* :func:`random_ratio_test` samples random polynomials of the discrete space
  and compares their maxima on a fine reference mesh with their maxima on the
  mesh;
* :func:`certify_mesh_constant` computes the exact constant of the mesh
  relative to a probe set, one linear program per probe point, pruned by
  branch and bound.
"""

from __future__ import annotations

import json
import math
import platform
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from . import __name__ as _pkg
from ._parallel import chunked_rows
from .errors import DeterminingSetError, DomainError, ParameterError
from .mesh import DEDUP_RTOL, Mesh, _diameter, alpha, beta, build_mesh, dedup_indices
from .polyspace import (DiscreteBasis, TotalDegreeBasis, basis_for, greedy_rows,
                        numerical_rank, orthonormalize, vandermonde)
from .sections import make_section, membership_defect, signature
from .simplex import PIVOT_TOL, PRICING_TOL, solve_pointwise

CERT_RTOL = 1e-12
MEMBERSHIP_TOL = 1e-8
SPACE_TOL = 1e-8


def _passes(value: float, bound: float) -> bool:
    return value <= bound * (1.0 + CERT_RTOL)


@dataclass
class CertificationReport:
    """Outcome of the sampling check, optionally joined with the LP constant.

    ``reference_inflation`` is the norming constant of the reference mesh
    itself: the true ratio ``||p||_K / ||p||_mesh`` is at most
    ``max_ratio_observed * reference_inflation``.
    """

    spec: dict
    n: int
    m: float
    c_theoretical: float
    max_ratio_observed: float
    trials: int
    seed: int
    reference_m: float
    reference_inflation: float
    lp_constant: Optional[float] = None
    lp_probe_count: Optional[int] = None
    lp_probe_m: Optional[float] = None
    environment: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        ok = _passes(self.max_ratio_observed, self.c_theoretical)
        if self.lp_constant is not None:
            ok = ok and _passes(self.lp_constant, self.c_theoretical)
        return ok

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = self.passed
        return out

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


def _environment(**extra) -> dict:
    env = {
        "package": _pkg,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "rank_threshold_rule": "card * eps * sigma_max",
        "dedup_rtol": DEDUP_RTOL,
        "certification_rtol": CERT_RTOL,
        "simplex_pricing_tol": PRICING_TOL,
        "simplex_pivot_tol": PIVOT_TOL,
    }
    env.update(extra)
    return env


def _distinct_points(mesh) -> np.ndarray:
    if isinstance(mesh, Mesh):
        if mesh.deduped:
            return mesh.points
        return mesh.points[dedup_indices(mesh.points)]
    P = np.atleast_2d(np.asarray(mesh, dtype=float))
    return P[dedup_indices(P)]


def _require_mesh(mesh) -> Mesh:
    if not isinstance(mesh, Mesh):
        raise TypeError("a Mesh (with its section) is required")
    return mesh


def _check_determining(ob: DiscreteBasis, ref_points: np.ndarray) -> int:
    rank, _, _ = numerical_rank(vandermonde(ref_points, ob.basis))
    if rank > ob.rank:
        raise DeterminingSetError(
            f"mesh spans a space of dimension {ob.rank} but the reference set spans {rank}")
    return rank


def polynomial_ratios(ob: DiscreteBasis, mesh_points, ref_points, coeffs) -> np.ndarray:
    """``max_ref |p| / max_mesh |p|`` for each coefficient column.

    Both maxima are evaluated through the same ambient path, so identical
    point sets give ratios of exactly one.
    """
    C = np.atleast_2d(np.asarray(coeffs, dtype=float).T).T
    mesh_max = np.abs(ob(mesh_points) @ C).max(axis=0)
    ref_max = chunked_rows(lambda X: np.abs(ob(X) @ C).max(axis=0)[None, :], ref_points,
                           chunk=4096).max(axis=0)
    if np.any(mesh_max == 0):
        raise DeterminingSetError("a nonzero polynomial of the space vanishes on the mesh")
    return ref_max / mesh_max


def random_ratio_test(mesh: Mesh, trials: int = 1000, seed: int = 0,
                      reference_m: Optional[float] = None) -> CertificationReport:
    """Sampling check of the norming inequality.

    Parameters
    ----------
    mesh : Mesh
    trials : int
        Number of random polynomials; coefficients are standard normal in
        the mesh-orthonormal basis drawn from ``default_rng(seed)``.
    seed : int
    reference_m : float, optional
        Oversampling of the reference mesh, default ``4 * m``. Must be at
        least ``m``; ``reference_m == m`` reproduces the mesh and gives a
        ratio of exactly one.
    """
    mesh = _require_mesh(mesh)
    if int(trials) != trials or trials < 1:
        raise ParameterError(f"trials must be a positive integer, got {trials!r}")
    if reference_m is None:
        reference_m = 4.0 * mesh.m
    reference_m = float(reference_m)
    if reference_m < mesh.m:
        raise ParameterError(
            f"reference_m = {reference_m} must be at least the mesh factor m = {mesh.m}")
    pts = _distinct_points(mesh)
    ref = build_mesh(mesh.spec, mesh.n, reference_m, family=mesh.family, dedup=True)
    basis = basis_for(pts, ref.points, degree=mesh.n)
    ob = orthonormalize(pts, basis)
    ref_rank = _check_determining(ob, ref.points)
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((ob.rank, int(trials)))
    ratios = polynomial_ratios(ob, pts, ref.points, C)
    sig = signature(mesh.spec)
    return CertificationReport(
        spec=mesh.spec.to_dict(), n=mesh.n, m=mesh.m,
        c_theoretical=sig.constant(mesh.m),
        max_ratio_observed=float(ratios.max()),
        trials=int(trials), seed=int(seed), reference_m=reference_m,
        reference_inflation=sig.constant(reference_m),
        environment=_environment(
            mesh_rank=ob.rank, reference_rank=ref_rank, rank_threshold=ob.threshold,
            mesh_points=len(pts), reference_points=len(ref.points)),
    )


def lp_point_constant(mesh, basis: Optional[TotalDegreeBasis], x) -> float:
    """``max |p(x)|`` over polynomials of the space with ``||p||_mesh <= 1``.

    Solved exactly by the dense simplex method; by the symmetry ``p -> -p``
    of the feasible set one program gives the maximum of both signs.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if len(x) != 1:
        raise ValueError("lp_point_constant takes a single point")
    if isinstance(mesh, Mesh):
        defect = membership_defect(mesh.spec, x)
        if defect is not None and float(np.max(defect)) > MEMBERSHIP_TOL:
            raise DomainError(f"point lies outside the section (defect {float(np.max(defect)):.3g})")
        degree = mesh.n
    elif basis is None:
        raise ValueError("a basis is required when passing a bare point array")
    pts = _distinct_points(mesh)
    if basis is None:
        basis = basis_for(pts, x, degree=degree)
    ob = orthonormalize(pts, basis)
    if ob.space_residual(x)[0] > SPACE_TOL:
        raise DeterminingSetError("point is not determined by the mesh: LP is unbounded")
    S = greedy_rows(ob.values, ob.rank)
    return solve_pointwise(ob.values, ob(x)[0], S).value


@dataclass
class ConstantCertificate:
    """Result of :func:`certify_mesh_constant` with ``details=True``."""

    value: float
    upper: float
    argmax: np.ndarray
    probe_count: int
    excluded: int
    lp_solves: int
    probe_m: float


def _probe_points(mesh_pts, probe_pts):
    diam = _diameter(np.vstack([mesh_pts, probe_pts]))
    tol = DEDUP_RTOL * max(diam, np.finfo(float).tiny)
    dist, _ = cKDTree(mesh_pts).query(probe_pts, distance_upper_bound=tol)
    keep = ~np.isfinite(dist)
    return probe_pts[keep], int((~keep).sum())


def _basis_bounds(qX, inv, j=None, val=None):
    """Per-point upper bounds from one basis ``S`` (``inv = Q_S^-1``).

    ``||q(x) Q_S^-1||_1`` is the l1 norm of a feasible dual vector. The
    pointwise constant is a norm of ``q(x)``, hence subadditive, which gives
    the second bound ``val_j + ||(q(x) - q(x_j)) Q_S^-1||_1`` around a solved
    point ``x_j``.
    """
    if j is None:
        return chunked_rows(lambda B: np.abs(B @ inv).sum(axis=1), qX)
    Lj = qX[j] @ inv

    def block(B):
        L = B @ inv
        return np.minimum(np.abs(L).sum(axis=1), val + np.abs(L - Lj).sum(axis=1))
    return chunked_rows(block, qX)


def _sampled_lower_bound(Q, qX, count: int = 256):
    """Best ``|q(x) . y|`` over a fixed batch of random feasible ``y``.

    Only used to start the pruning from a sensible level; the generator is
    seeded with a constant so results stay deterministic.
    """
    C = np.random.default_rng(0).standard_normal((Q.shape[1], count))
    C /= np.abs(Q @ C).max(axis=0)
    vals = chunked_rows(lambda B: np.abs(B @ C).max(axis=1), qX, chunk=4096)
    k = int(np.argmax(vals))
    return float(vals[k]), k


NEIGHBORS = 256


def _branch_and_bound(ob: DiscreteBasis, X: np.ndarray):
    """Exact ``max_x LP(x)`` over the rows of ``X``.

    Optimal bases of solved points give upper bounds (see
    :func:`_basis_bounds`) and their multiplier vectors ``y`` lower bounds
    ``|q(x) . y|`` (feasible polynomials). LPs are solved at the point with
    the largest upper bound until no upper bound exceeds the best lower
    bound. A new basis is only informative near its point, so bounds are
    refreshed on the ``NEIGHBORS`` nearest probe points; this changes the
    work done, never the value returned.
    """
    Q = ob.values
    qX = chunked_rows(ob, X)
    bases = [greedy_rows(Q, ob.rank)]
    ub = _basis_bounds(qX, np.linalg.inv(Q[bases[0]]))
    start = np.zeros(len(X), dtype=int)
    alive = np.ones(len(X), dtype=bool)
    best, arg = _sampled_lower_bound(Q, qX)
    tree = cKDTree(X)
    K = min(len(X), NEIGHBORS)
    solves = 0
    while True:
        j = int(np.argmax(np.where(alive, ub, -np.inf)))
        if not (alive[j] and ub[j] > best * (1.0 + CERT_RTOL)):
            break
        res = solve_pointwise(Q, qX[j], bases[start[j]], stop_below=best)
        solves += 1
        alive[j] = False
        _, nb = tree.query(X[j], k=K)
        nb = np.atleast_1d(nb)
        nb = nb[alive[nb]]
        if res.optimal:
            scale = max(1.0, float(np.abs(Q @ res.y).max()))
            if res.lower > best:
                best, arg = res.lower, j
            if len(nb):
                lb = np.abs(qX[nb] @ res.y) / scale
                k = int(np.argmax(lb))
                if lb[k] > best:
                    best, arg = float(lb[k]), int(nb[k])
        if len(nb):
            bases.append(res.rows)
            local = np.vstack([qX[j], qX[nb]])
            new = _basis_bounds(local, np.linalg.inv(Q[res.rows]), 0, res.upper)[1:]
            better = new < ub[nb]
            ub[nb[better]] = new[better]
            start[nb[better]] = len(bases) - 1
    rest = alive & (ub > best)
    upper = float(max(best, ub[rest].max())) if np.any(rest) else best
    return best, upper, arg, solves


def certify_mesh_constant(mesh: Mesh, basis: Optional[TotalDegreeBasis] = None,
                          probe_m: Optional[float] = None, details: bool = False):
    """Exact norming constant of the mesh relative to a probe mesh.

    Parameters
    ----------
    mesh : Mesh
    basis : TotalDegreeBasis, optional
        Must enclose mesh and probe points; built from both when omitted.
    probe_m : float, optional
        Oversampling of the probe mesh, default ``4 * m``; must be at least
        ``m``. Probe points within the dedup tolerance of a mesh point are
        dropped.
    details : bool
        Return a :class:`ConstantCertificate` instead of the bare value.

    Returns
    -------
    float
        ``max over probe x`` of :func:`lp_point_constant`; a lower bound of
        the true constant on the section.
    """
    mesh = _require_mesh(mesh)
    if probe_m is None:
        probe_m = 4.0 * mesh.m
    probe_m = float(probe_m)
    if probe_m < mesh.m:
        raise ParameterError(f"probe_m = {probe_m} must be at least m = {mesh.m}")
    pts = _distinct_points(mesh)
    probe = build_mesh(mesh.spec, mesh.n, probe_m, family=mesh.family, dedup=True)
    if basis is None:
        basis = basis_for(pts, probe.points, degree=mesh.n)
    ob = orthonormalize(pts, basis)
    _check_determining(ob, probe.points)
    X, excluded = _probe_points(pts, probe.points)
    if len(X) == 0:
        value, upper, arg, solves = 1.0, 1.0, 0, 0
        argmax = probe.points[0]
    else:
        value, upper, arg, solves = _branch_and_bound(ob, X)
        argmax = X[arg]
    if not details:
        return value
    return ConstantCertificate(value, upper, argmax, len(X), excluded, solves, probe_m)


def certify(mesh: Mesh, trials: int = 1000, seed: int = 0,
            reference_m: Optional[float] = None, lp: bool = False,
            probe_m: Optional[float] = None) -> CertificationReport:
    """Sampling check plus, with ``lp=True``, the exact LP constant."""
    report = random_ratio_test(mesh, trials, seed, reference_m)
    if lp:
        cert = certify_mesh_constant(mesh, probe_m=probe_m, details=True)
        report.lp_constant = cert.value
        report.lp_probe_count = cert.probe_count
        report.lp_probe_m = cert.probe_m
        report.environment.update(lp_upper=cert.upper, lp_solves=cert.lp_solves,
                                  lp_excluded=cert.excluded)
    return report


# ---------------------------------------------------------------------------
# univariate inequalities

UNIVARIATE_KINDS = ("algebraic", "periodic", "subperiodic")


@dataclass
class UnivariateReport:
    kind: str
    n: int
    m: float
    omega: Optional[float]
    bound: float
    certified: float
    probe_m: float

    @property
    def gap(self) -> float:
        return self.bound - self.certified

    @property
    def passed(self) -> bool:
        return self.certified < self.bound

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(gap=self.gap, passed=self.passed)
        return out


def univariate_inequality_suite(kind: str, n: int, m: float, omega: Optional[float] = None,
                                probe_m: Optional[float] = None) -> UnivariateReport:
    """Certified constant of a one-factor mesh against its theoretical bound.

    ``algebraic``: Chebyshev-Lobatto mesh of ``[-1, 1]``, bound ``alpha(m)``.
    ``periodic``: equispaced angles on the full circle (trigonometric
    polynomials of degree ``n``), bound ``alpha(m)``. ``subperiodic``: the
    arc ``[-omega, omega]``, ``0 < omega < pi``, bound ``beta(m)``.
    """
    if kind == "algebraic":
        spec, bound = make_section("interval"), alpha(m)
    elif kind == "periodic":
        spec, bound = make_section("circle"), alpha(m)
    elif kind == "subperiodic":
        if omega is None:
            raise ParameterError("subperiodic suite needs omega")
        if not 0.0 < omega < math.pi:
            raise ParameterError(f"omega must lie in (0, pi), got {omega!r}")
        spec, bound = make_section("circle_arc", omega=omega), beta(m)
    else:
        raise ParameterError(f"kind must be one of {UNIVARIATE_KINDS}, got {kind!r}")
    mesh = build_mesh(spec, n, m, dedup=True)
    if probe_m is None:
        probe_m = 4.0 * m
    value = certify_mesh_constant(mesh, probe_m=probe_m)
    return UnivariateReport(kind, int(n), float(m), omega, bound, value, float(probe_m))
