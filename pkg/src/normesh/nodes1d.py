"""Univariate node families: Chebyshev-Lobatto points, Chebyshev zeros and
the subperiodic angular nodes obtained from the zeros by the map
``s -> 2*arcsin(sin(omega/2)*s)``.

All node lists are returned in ascending order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAngleError, InvalidIntervalError

TWO_PI = 2.0 * math.pi
PERIOD_TOL = 1e-12


class Family(str, enum.Enum):
    LOBATTO = "lobatto"
    ZEROS = "zeros"
    SUBPERIODIC = "subperiodic"


class AngularKind(str, enum.Enum):
    PERIODIC = "periodic"
    SUBPERIODIC = "subperiodic"


@dataclass(frozen=True)
class Interval:
    """Closed algebraic range ``[a, b]`` with ``a < b``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidIntervalError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not b - a > 0:
            raise InvalidIntervalError(f"interval requires a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    def affine(self, s):
        """Map ``s`` in [-1, 1] onto the interval."""
        return 0.5 * (self.b - self.a) * np.asarray(s, dtype=float) + 0.5 * (self.b + self.a)

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x >= self.a - tol) & (x <= self.b + tol)


@dataclass(frozen=True)
class AngularInterval:
    """Angular range ``[u, v]`` in radians.

    The range is periodic when ``v - u`` equals ``2*pi`` (within 1e-12) and
    subperiodic when it is strictly shorter. Longer ranges are rejected.
    """

    u: float
    v: float

    def __post_init__(self):
        u, v = float(self.u), float(self.v)
        if not (math.isfinite(u) and math.isfinite(v)):
            raise InvalidAngleError(f"angular endpoints must be finite, got [{u}, {v}]")
        width = v - u
        if not width > 0:
            raise InvalidAngleError(f"angular interval requires u < v, got [{u}, {v}]")
        if width > TWO_PI + PERIOD_TOL:
            raise InvalidAngleError(
                f"angular interval longer than 2*pi: v - u = {width!r}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def kind(self) -> AngularKind:
        if abs(self.v - self.u - TWO_PI) <= PERIOD_TOL:
            return AngularKind.PERIODIC
        return AngularKind.SUBPERIODIC

    @property
    def periodic(self) -> bool:
        return self.kind is AngularKind.PERIODIC

    @property
    def omega(self) -> float:
        """Semi-angle ``(v - u) / 2``."""
        if self.periodic:
            return math.pi
        return 0.5 * (self.v - self.u)

    @property
    def center(self) -> float:
        return 0.5 * (self.u + self.v)

    def contains(self, theta, tol: float = 0.0) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return (theta >= self.u - tol) & (theta <= self.v + tol)


@dataclass(frozen=True)
class NodeSet1D:
    nodes: np.ndarray
    family: Family
    nu: int

    def __len__(self):
        return len(self.nodes)


def _check_nu(nu, minimum):
    if isinstance(nu, bool) or int(nu) != nu or nu < minimum:
        raise ValueError(f"nu must be an integer >= {minimum}, got {nu!r}")
    return int(nu)


def _as_interval(iv) -> Interval:
    if isinstance(iv, Interval):
        return iv
    a, b = iv
    return Interval(a, b)


def _as_angular(aiv) -> AngularInterval:
    if isinstance(aiv, AngularInterval):
        return aiv
    u, v = aiv
    return AngularInterval(u, v)


def chebyshev_lobatto(nu: int, iv) -> NodeSet1D:
    """Chebyshev-Lobatto points ``cos(j*pi/nu)``, ``j = 0..nu``, on ``iv``.

    Parameters
    ----------
    nu : int
        Degree parameter, ``nu >= 1``; ``nu + 1`` nodes are returned.
    iv : Interval or (a, b)

    Returns
    -------
    NodeSet1D
        Ascending nodes including both endpoints.
    """
    nu = _check_nu(nu, 1)
    iv = _as_interval(iv)
    # sin form keeps the reference nodes exactly odd-symmetric
    j = np.arange(nu + 1)
    xi = np.sin(np.pi * (2 * j - nu) / (2 * nu))
    nodes = iv.affine(xi)
    nodes[0], nodes[-1] = iv.a, iv.b
    return NodeSet1D(nodes, Family.LOBATTO, nu)


def chebyshev_zeros(nu: int, iv) -> NodeSet1D:
    """Zeros of ``T_{nu+1}`` mapped onto ``iv`` (``nu + 1`` interior nodes)."""
    nu = _check_nu(nu, 0)
    iv = _as_interval(iv)
    j = np.arange(nu + 1)
    eta = np.sin(np.pi * (2 * j - nu) / (2 * (nu + 1)))
    return NodeSet1D(iv.affine(eta), Family.ZEROS, nu)


def psi_map(omega: float, s):
    """``2*arcsin(sin(omega/2)*s)``, mapping [-1, 1] onto [-omega, omega]."""
    omega = float(omega)
    if not (0.0 < omega <= math.pi + PERIOD_TOL):
        raise InvalidAngleError(f"omega must lie in (0, pi], got {omega!r}")
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) > 1.0):
        raise ValueError("psi_map is defined for |s| <= 1")
    out = 2.0 * np.arcsin(math.sin(min(omega, math.pi) / 2.0) * s)
    return float(out) if out.ndim == 0 else out


def subperiodic_angles(nu: int, aiv) -> NodeSet1D:
    """Angular nodes ``psi_omega(Z_{2nu}([-1, 1])) + (u + v)/2``.

    Returns ``2*nu + 1`` ascending angles strictly inside ``(u, v)``. On a
    full period the nodes are equispaced with gap ``2*pi/(2*nu + 1)``.
    """
    nu = _check_nu(nu, 1)
    aiv = _as_angular(aiv)
    if aiv.periodic:
        # psi_pi(Z_{2nu}) has the closed form 2*pi*k/(2nu+1); evaluated
        # directly to avoid arcsin cancellation near +-1
        k = np.arange(-nu, nu + 1)
        theta = aiv.center + TWO_PI * k / (2 * nu + 1)
    else:
        s = chebyshev_zeros(2 * nu, (-1.0, 1.0)).nodes
        theta = psi_map(aiv.omega, s) + aiv.center
    return NodeSet1D(np.asarray(theta, dtype=float), Family.SUBPERIODIC, nu)
