"""Total-degree polynomial spaces on point sets.

Polynomials of total degree ``<= n`` in ``d`` variables are represented in
the product-Chebyshev basis of a bounding box. On sets lying on an
algebraic variety (sphere, torus, circle) that basis is linearly dependent,
so every computation goes through :class:`DiscreteBasis`, an orthonormal
basis of the column space of the Vandermonde matrix identified by an SVD
with the threshold ``card * eps * sigma_max``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial.chebyshev import chebvander

from .errors import ExtractionError, NumericalError, ScalingError
from .mesh import Mesh, build_mesh
from .sections import SectionSpec, signature

EPS = np.finfo(float).eps
CHUNK = 1 << 15


def graded_indices(dim: int, degree: int) -> np.ndarray:
    """Multi-indices with ``|a| <= degree`` in graded lexicographic order."""
    out = []
    for k in range(degree + 1):
        level = [a for a in itertools.product(range(k, -1, -1), repeat=dim) if sum(a) == k]
        out.extend(level)
    return np.array(out, dtype=int).reshape(-1, dim)


def space_dimension(dim: int, degree: int) -> int:
    return math.comb(degree + dim, dim)


class TotalDegreeBasis:
    """Products of Chebyshev polynomials of box-scaled coordinates.

    Parameters
    ----------
    dim, degree : int
    lo, hi : array_like
        Corners of the bounding box. Degenerate directions get unit
        half-width.
    """

    def __init__(self, dim: int, degree: int, lo, hi):
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        self.dim = int(dim)
        self.degree = int(degree)
        lo = np.asarray(lo, dtype=float).reshape(self.dim)
        hi = np.asarray(hi, dtype=float).reshape(self.dim)
        if np.any(hi < lo):
            raise ValueError("box requires lo <= hi")
        center = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        scale = max(1.0, float(np.max(np.abs(center))))
        half = np.where(half > 1e-13 * scale, half, 1.0)
        self.center = center
        self.half = half
        self.multi_indices = graded_indices(self.dim, self.degree)

    @classmethod
    def for_points(cls, points, degree: int) -> "TotalDegreeBasis":
        P = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(P.shape[1], degree, P.min(axis=0), P.max(axis=0))

    @property
    def box(self) -> tuple:
        return self.center - self.half, self.center + self.half

    def __len__(self):
        return len(self.multi_indices)

    def scaled(self, points) -> np.ndarray:
        P = np.atleast_2d(np.asarray(points, dtype=float))
        if P.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim}-dimensional points, got shape {P.shape}")
        Y = (P - self.center) / self.half
        if np.any(np.abs(Y) > 1.0 + 1e-9):
            raise ScalingError("point outside the bounding box of the basis")
        return np.clip(Y, -1.0, 1.0)

    def __call__(self, points) -> np.ndarray:
        Y = self.scaled(points)
        cols = [chebvander(Y[:, j], self.degree) for j in range(self.dim)]
        V = np.ones((len(Y), len(self.multi_indices)))
        for j in range(self.dim):
            V *= cols[j][:, self.multi_indices[:, j]]
        return V

    def __repr__(self):
        return f"TotalDegreeBasis(dim={self.dim}, degree={self.degree}, size={len(self)})"


def vandermonde(points, basis: TotalDegreeBasis) -> np.ndarray:
    """``V[i, j]`` = basis function ``j`` at point ``i``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if len(P) == 0:
        raise ValueError("vandermonde needs at least one point")
    return basis(P)


def numerical_rank(V) -> tuple:
    """Rank of ``V`` with threshold ``rows * eps * sigma_max``.

    Returns ``(rank, singular_values, threshold)``.
    """
    try:
        s = np.linalg.svd(V, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed on a {V.shape} Vandermonde matrix: {exc}") from None
    thr = V.shape[0] * EPS * (s[0] if len(s) else 0.0)
    return int(np.sum(s > thr)), s, thr


@dataclass
class DiscreteBasis:
    """Orthonormal basis of ``P_n`` restricted to a point set.

    ``values`` holds the basis at the defining points (orthonormal columns);
    calling the object evaluates it anywhere through the ambient basis.
    """

    basis: TotalDegreeBasis
    points: np.ndarray
    transform: np.ndarray
    values: np.ndarray
    singular_values: np.ndarray
    threshold: float
    rowspace: Optional[np.ndarray] = None

    @property
    def rank(self) -> int:
        return self.transform.shape[1]

    @property
    def condition(self) -> float:
        s = self.singular_values
        return float(s[0] / s[self.rank - 1])

    @property
    def orthogonality_defect(self) -> float:
        Q = self.values
        return float(np.max(np.abs(Q.T @ Q - np.eye(self.rank))))

    def __call__(self, points) -> np.ndarray:
        return self.basis(points) @ self.transform

    def space_residual(self, points) -> np.ndarray:
        """Relative distance of each ambient basis row to the row space
        spanned on the defining points; large values mean the points do not
        determine the space near ``points``."""
        V = self.basis(points)
        W = self.rowspace
        R = V - (V @ W) @ W.T
        return np.linalg.norm(R, axis=1) / np.maximum(np.linalg.norm(V, axis=1), 1e-300)


def orthonormalize(points, basis: TotalDegreeBasis) -> DiscreteBasis:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    V = vandermonde(P, basis)
    try:
        U, s, Wt = np.linalg.svd(V, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from None
    thr = V.shape[0] * EPS * s[0]
    r = int(np.sum(s > thr))
    if r == 0:
        raise NumericalError("Vandermonde matrix is numerically zero")
    T = Wt[:r].T / s[:r]
    # second pass restores orthogonality lost to the small singular values
    Q = V @ T
    Q2, R = np.linalg.qr(Q)
    T = T @ np.linalg.inv(R)
    return DiscreteBasis(basis, P, T, Q2, s, thr, Wt[:r].T.copy())


def _points_of(mesh) -> np.ndarray:
    if isinstance(mesh, Mesh):
        return mesh.points
    return np.atleast_2d(np.asarray(mesh, dtype=float))


def _degree_of(mesh, basis) -> int:
    if basis is not None:
        return basis.degree
    if isinstance(mesh, Mesh):
        return mesh.n
    raise ValueError("a basis is required when passing a bare point array")


def basis_for(*point_sets, degree: int) -> TotalDegreeBasis:
    """Basis whose box encloses every given point set."""
    P = np.vstack([np.atleast_2d(p) for p in point_sets if p is not None])
    return TotalDegreeBasis.for_points(P, degree)


# ---------------------------------------------------------------------------
# dimension

@dataclass
class DimensionInfo:
    ambient_count: int
    numeric_rank: int
    variety_count: Optional[int] = None
    variety_degree: Optional[int] = None
    asymptotic: Optional[tuple] = None
    probe_m: float = 4.0
    probe_count: int = 0
    threshold: float = 0.0
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ambient_count": self.ambient_count,
            "variety_count": self.variety_count,
            "variety_degree": self.variety_degree,
            "numeric_rank": self.numeric_rank,
            "asymptotic": None if self.asymptotic is None else
            {"lambda": self.asymptotic[0], "gamma": self.asymptotic[1]},
            "probe_m": self.probe_m,
            "probe_count": self.probe_count,
            "rank_threshold": self.threshold,
            "notes": list(self.notes),
        }


def variety_dimension(dim: int, degree: int, k: int) -> int:
    """``C(n+d, d) - C(n-k+d, d)``: dimension of ``P_n`` on an irreducible
    degree-``k`` hypersurface of ``R^d`` (valid for ``n >= k``)."""
    low = degree - k + dim
    return math.comb(degree + dim, dim) - (math.comb(low, dim) if low >= dim else 0)


def numeric_dimension(spec: SectionSpec, n: int, probe_m: float = 4.0) -> DimensionInfo:
    """Numerical dimension of ``P_n`` restricted to the section.

    The rank is computed on the deduplicated mesh of degree ``n`` and
    factor ``probe_m``; the theoretical hypersurface count is attached for
    sphere/torus/circle kinds when ``n`` reaches the variety degree.
    """
    probe = build_mesh(spec, n, probe_m, dedup=True)
    basis = TotalDegreeBasis.for_points(probe.points, n)
    rank, _, thr = numerical_rank(vandermonde(probe.points, basis))
    d = spec.ambient_dim
    info = DimensionInfo(
        ambient_count=space_dimension(d, n),
        numeric_rank=rank,
        probe_m=float(probe_m),
        probe_count=len(probe.points),
        threshold=float(thr),
    )
    sig = signature(spec)
    if spec.variety is not None:
        k = spec.variety.degree
        info.variety_degree = k
        if n >= k:
            info.variety_count = variety_dimension(d, n, k)
        info.asymptotic = (d - 1, k / math.factorial(d - 1))
        if spec.variety.name == "torus":
            in_text = 2 * n * n
            if info.variety_count is not None and info.variety_count != in_text:
                info.notes.append(
                    f"hypersurface formula gives {info.variety_count} = 2n^2+2 while the "
                    f"quoted torus count 2n^2 gives {in_text}; numeric rank {rank}")
    else:
        info.asymptotic = (d, 1.0 / math.factorial(d))
    if sig.n_factors != info.asymptotic[0]:
        info.notes.append(
            f"factor count {sig.n_factors} differs from growth exponent {info.asymptotic[0]}: "
            "mesh is not optimal")
    return info


# ---------------------------------------------------------------------------
# Fekete points

@dataclass
class FeketeResult:
    indices: np.ndarray
    points: np.ndarray
    lebesgue: Optional[float]
    abs_det: float
    probe_count: int = 0


def greedy_rows(Q: np.ndarray, k: int) -> np.ndarray:
    """Greedy volume maximization on the rows of ``Q``.

    Equivalent to QR with column pivoting on ``Q.T``; ties are broken by
    the lowest index.
    """
    A = np.array(Q, dtype=float, copy=True)
    norms = np.einsum("ij,ij->i", A, A)
    scale = float(norms.max()) if len(norms) else 0.0
    chosen = []
    for _ in range(k):
        i = int(np.argmax(norms))
        if norms[i] <= 1e-24 * max(scale, 1.0):
            raise ExtractionError(
                f"rank-deficient selection after {len(chosen)} of {k} points")
        chosen.append(i)
        v = A[i] / math.sqrt(norms[i])
        A -= np.outer(A @ v, v)
        norms = np.einsum("ij,ij->i", A, A)
        norms[chosen] = -1.0
    return np.array(chosen, dtype=int)


def approx_fekete(mesh, basis: Optional[TotalDegreeBasis] = None,
                  probe=None) -> FeketeResult:
    """Approximate Fekete points extracted from a mesh.

    The Vandermonde columns are orthonormalized first, then rows are picked
    greedily to maximize volume. When ``probe`` points are given, the
    Lebesgue constant of interpolation at the selected points is estimated
    as the maximum of the Lebesgue function over them.
    """
    P = _points_of(mesh)
    probe_pts = None if probe is None else _points_of(probe)
    if basis is None:
        basis = basis_for(P, probe_pts, degree=_degree_of(mesh, None))
    ob = orthonormalize(P, basis)
    idx = greedy_rows(ob.values, ob.rank)
    QS = ob.values[idx]
    abs_det = abs(float(np.linalg.det(vandermonde(P[idx], basis) @ ob.transform)))
    if not np.isfinite(np.linalg.cond(QS)) or np.linalg.matrix_rank(QS) < ob.rank:
        raise ExtractionError("selected Vandermonde submatrix is singular")
    leb = None
    if probe_pts is not None:
        leb = lebesgue_constant(ob, P[idx], probe_pts)
    return FeketeResult(idx, P[idx], leb, abs_det,
                        0 if probe_pts is None else len(probe_pts))


def lebesgue_constant(ob: DiscreteBasis, nodes, probe) -> float:
    """Max over ``probe`` of the Lebesgue function of interpolation at ``nodes``."""
    inv = np.linalg.inv(ob(nodes))
    best = 0.0
    for start in range(0, len(probe), CHUNK):
        L = ob(probe[start:start + CHUNK]) @ inv
        best = max(best, float(np.abs(L).sum(axis=1).max()))
    return best


# ---------------------------------------------------------------------------
# least squares

@dataclass
class LSFit:
    """Discrete least-squares projection onto ``P_n`` restricted to a mesh.

    ``coefficients`` refer to the mesh-orthonormal basis ``discrete``.
    """

    coefficients: np.ndarray
    discrete: DiscreteBasis
    residual: float
    relative_residual: float
    operator_norm_estimate: Optional[float] = None
    bound: Optional[float] = None
    conditioning_warning: bool = False

    def __call__(self, points) -> np.ndarray:
        return self.discrete(points) @ self.coefficients

    @property
    def fitted(self) -> np.ndarray:
        return self.discrete.values @ self.coefficients

    @property
    def bound_holds(self) -> Optional[bool]:
        if self.operator_norm_estimate is None or self.bound is None:
            return None
        return self.operator_norm_estimate <= self.bound

    def summary(self) -> dict:
        return {
            "degree": self.discrete.basis.degree,
            "card": len(self.discrete.points),
            "rank": self.discrete.rank,
            "residual": self.residual,
            "relative_residual": self.relative_residual,
            "operator_norm_estimate": self.operator_norm_estimate,
            "bound": self.bound,
            "bound_holds": self.bound_holds,
            "conditioning_warning": self.conditioning_warning,
        }


def ls_projection(mesh, samples, basis: Optional[TotalDegreeBasis] = None,
                  probe=None) -> LSFit:
    """Least-squares fit of ``samples`` (values at the mesh points).

    With ``probe`` points the operator norm is estimated on them and, for a
    :class:`Mesh`, compared against ``c * sqrt(card)``.
    """
    P = _points_of(mesh)
    f = np.asarray(samples, dtype=float).ravel()
    if f.shape != (len(P),):
        raise ValueError(f"expected {len(P)} samples, got {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("samples must be finite")
    probe_pts = None if probe is None else _points_of(probe)
    if basis is None:
        basis = basis_for(P, probe_pts, degree=_degree_of(mesh, None))
    ob = orthonormalize(P, basis)
    coef = ob.values.T @ f
    res = f - ob.values @ coef
    fnorm = float(np.linalg.norm(f))
    defect = ob.orthogonality_defect
    warn = defect > 1e-8
    if warn:
        warnings.warn(f"least-squares basis lost orthogonality ({defect:.2e})", RuntimeWarning)
    fit = LSFit(coef, ob, float(np.max(np.abs(res))) if len(res) else 0.0,
                float(np.linalg.norm(res) / fnorm) if fnorm > 0 else 0.0,
                conditioning_warning=warn)
    if probe_pts is not None:
        fit.operator_norm_estimate = _operator_norm(ob, probe_pts)
        if isinstance(mesh, Mesh):
            fit.bound = mesh.c * math.sqrt(len(P))
    return fit


def _operator_norm(ob: DiscreteBasis, probe) -> float:
    Qt = ob.values.T
    best = 0.0
    for start in range(0, len(probe), CHUNK):
        K = ob(probe[start:start + CHUNK]) @ Qt
        best = max(best, float(np.abs(K).sum(axis=1).max()))
    return best


def ls_operator_norm(mesh, basis: Optional[TotalDegreeBasis] = None, probe=None) -> float:
    """Max over probe points of ``sum_i |K(x, a_i)|`` with the reproducing
    kernel of the mesh-orthonormal basis: the LS operator norm seen from
    the probe set (a lower bound of the continuous norm)."""
    P = _points_of(mesh)
    probe_pts = P if probe is None else _points_of(probe)
    if basis is None:
        basis = basis_for(P, probe_pts, degree=_degree_of(mesh, None))
    return _operator_norm(orthonormalize(P, basis), probe_pts)
