"""Product meshes ``A_n(m) = sigma(B_n(m))`` and their constants."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import InvalidFactorError
from .nodes1d import (Family, chebyshev_lobatto, chebyshev_zeros,
                      subperiodic_angles)
from .sections import (SectionSpec, evaluate_map, section_from_dict,
                       signature)

DEDUP_RTOL = 1e-10


def _ceil(x: float) -> int:
    # absorbs representation error such as 1.1 * 10 = 11.000000000000002
    return math.ceil(x - 1e-12 * max(1.0, abs(x)))


def _check_factor(m):
    m = float(m)
    if not (math.isfinite(m) and m > 1.0):
        raise InvalidFactorError(f"oversampling factor must satisfy m > 1, got {m!r}")
    return m


def _check_degree(n, minimum=1):
    if isinstance(n, bool) or int(n) != n or n < minimum:
        raise ValueError(f"degree must be an integer >= {minimum}, got {n!r}")
    return int(n)


def alpha(m: float) -> float:
    """Algebraic / full-period constant ``1 / cos(pi / (2m))``."""
    m = _check_factor(m)
    return 1.0 / math.cos(math.pi / (2.0 * m))


def beta(m: float) -> float:
    """Subperiodic constant ``m / (m - 1)``."""
    m = _check_factor(m)
    return m / (m - 1.0)


@dataclass(frozen=True)
class MeshConstants:
    alpha: float
    beta: float
    N1: int
    N2: int


def mesh_constants(n: int, m: float) -> MeshConstants:
    n = _check_degree(n, 0)
    m = _check_factor(m)
    return MeshConstants(alpha(m), beta(m), _ceil(m * n + 1), _ceil(2 * m * n + 1))


def node_degree(n: int, m: float) -> int:
    """Degree parameter ``ceil(m*n)`` shared by every univariate factor."""
    return _ceil(_check_factor(m) * _check_degree(n, 0))


def cardinality_bound(spec: SectionSpec, n: int, m: float) -> int:
    return signature(spec).cardinality_bound(n, m)


@dataclass(eq=False)
class Mesh:
    """Point set ``sigma(grid)`` with its metadata.

    ``source_index`` maps every retained point to its row-major position
    in the raw tensor grid (algebraic factors first, then angular).
    """

    spec: SectionSpec
    n: int
    m: float
    points: np.ndarray
    grid_shape: tuple
    c: float
    raw_count: int
    distinct_count: int
    family: Family = Family.LOBATTO
    deduped: bool = False
    source_index: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)

    @property
    def diameter(self) -> float:
        return _diameter(self.points)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "n": self.n,
            "m": self.m,
            "c": self.c,
            "family": self.family.value,
            "grid_shape": list(self.grid_shape),
            "raw_count": self.raw_count,
            "distinct_count": self.distinct_count,
            "deduped": self.deduped,
            "points": self.points.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Mesh":
        points = np.asarray(data["points"], dtype=float)
        return cls(
            spec=section_from_dict(data["spec"]),
            n=int(data["n"]),
            m=float(data["m"]),
            points=points.reshape(len(points), -1),
            grid_shape=tuple(int(k) for k in data["grid_shape"]),
            c=float(data["c"]),
            raw_count=int(data.get("raw_count", len(points))),
            distinct_count=int(data.get("distinct_count", len(points))),
            family=Family(data.get("family", "lobatto")),
            deduped=bool(data.get("deduped", False)),
        )


def _diameter(points) -> float:
    if len(points) == 0:
        return 0.0
    return float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))


def factor_nodes(spec: SectionSpec, n: int, m: float, family=Family.LOBATTO) -> list:
    """Univariate node arrays of the product grid, one per coordinate."""
    family = Family(family)
    if family not in (Family.LOBATTO, Family.ZEROS):
        raise ValueError(f"algebraic node family must be lobatto or zeros, got {family}")
    nu = node_degree(n, m)
    algebraic = chebyshev_lobatto if family is Family.LOBATTO else chebyshev_zeros
    out = [algebraic(nu, iv).nodes for iv in spec.algebraic_ranges]
    out += [subperiodic_angles(nu, iv).nodes for iv in spec.angular_ranges]
    return out


def tensor_grid(factors) -> np.ndarray:
    """Row-major tensor product of 1-D node arrays as an ``(N, k)`` array."""
    mesh = np.meshgrid(*factors, indexing="ij")
    return np.column_stack([g.ravel() for g in mesh])


def dedup_indices(points, rtol: float = DEDUP_RTOL) -> np.ndarray:
    """Indices of representatives after merging points closer than
    ``rtol * diameter``; each cluster keeps its lowest index."""
    points = np.asarray(points, dtype=float)
    N = len(points)
    if N <= 1:
        return np.arange(N)
    tol = rtol * max(_diameter(points), np.finfo(float).tiny)
    pairs = cKDTree(points).query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return np.arange(N)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(N, N))
    ncomp, labels = connected_components(graph, directed=False)
    first = np.full(ncomp, N)
    np.minimum.at(first, labels, np.arange(N))
    return np.sort(first)


def build_mesh(spec: SectionSpec, n: int, m: float, family=Family.LOBATTO,
               dedup: bool = False) -> Mesh:
    """Build the polynomial mesh of degree ``n`` with oversampling ``m``.

    Parameters
    ----------
    spec : SectionSpec
    n : int
        Polynomial degree, ``n >= 1``.
    m : float
        Oversampling factor, ``m > 1``; need not be an integer.
    family : {'lobatto', 'zeros'}
        Node family on algebraic factors.
    dedup : bool
        Merge coincident images of the (possibly non-injective) map.
    """
    n = _check_degree(n)
    m = _check_factor(m)
    family = Family(family)
    factors = factor_nodes(spec, n, m, family)
    grid = tensor_grid(factors)
    points = evaluate_map(spec, grid, check=False)
    raw = len(points)
    keep = dedup_indices(points)
    distinct = len(keep)
    index = np.arange(raw)
    if dedup:
        index = keep
        points = points[keep]
    return Mesh(
        spec=spec, n=n, m=m, points=points,
        grid_shape=tuple(len(f) for f in factors),
        c=signature(spec).constant(m),
        raw_count=raw, distinct_count=distinct,
        family=family, deduped=dedup, source_index=index,
    )


def write_json(mesh: Mesh, path) -> None:
    with open(path, "w") as fh:
        json.dump(mesh.to_dict(), fh)


def read_json(path) -> Mesh:
    with open(path) as fh:
        return Mesh.from_dict(json.load(fh))


def write_csv(points, path) -> None:
    """One point per line, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for p in np.atleast_2d(points):
            writer.writerow([f"{v:.17g}" for v in p])


def read_csv(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float, ndmin=2))
