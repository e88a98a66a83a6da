"""Catalog of compact sets ``K = sigma(I x Theta)``.

Each section is the image of a box of algebraic coordinates ``t`` and
angular coordinates ``theta`` under a map whose components are affine in
every algebraic coordinate and trigonometric of degree one in every angular
coordinate. A section is described by a :class:`SectionSpec`; its
:class:`Signature` ``(d1, d2, d3)`` counts algebraic, periodic and
subperiodic factors and fixes the norming constant
``alpha(m)**(d1 + d2) * beta(m)**d3``.

Coordinates are always ordered algebraic first, then angular.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (DomainError, InvalidAngleError, ParameterError,
                     UnsupportedKindError)
from .nodes1d import AngularInterval, Interval

PI = math.pi
HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi

_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _pow(symbol: str, k: int, pretty: bool) -> str:
    if k == 0:
        return ""
    if k == 1:
        return symbol
    return symbol + (str(k).translate(_SUPERSCRIPT) if pretty else f"^{k}")


@dataclass(frozen=True)
class Signature:
    """Factor counts of a section and the derived mesh parameters."""

    d1: int
    d2: int
    d3: int
    ambient_dim: int

    def __post_init__(self):
        if min(self.d1, self.d2, self.d3) < 0 or self.d1 + self.d2 + self.d3 < 1:
            raise ValueError(f"invalid signature {self}")

    @property
    def alpha_power(self) -> int:
        return self.d1 + self.d2

    @property
    def beta_power(self) -> int:
        return self.d3

    @property
    def n_factors(self) -> int:
        return self.d1 + self.d2 + self.d3

    @property
    def constant_class(self) -> str:
        """Symbolic constant, e.g. ``'alpha^2*beta'``."""
        parts = [_pow("alpha", self.alpha_power, False), _pow("beta", self.beta_power, False)]
        return "*".join(p for p in parts if p)

    @property
    def pretty_class(self) -> str:
        return _pow("α", self.alpha_power, True) + _pow("β", self.beta_power, True)

    @property
    def bound_shape(self) -> str:
        parts = [_pow("N1", self.d1, False), _pow("N2", self.d2 + self.d3, False)]
        return "*".join(p for p in parts if p)

    @property
    def pretty_bound(self) -> str:
        parts = [_pow("N1", self.d1, True), _pow("N2", self.d2 + self.d3, True)]
        return "·".join(p for p in parts if p)

    def constant(self, m: float) -> float:
        from .mesh import alpha, beta
        return alpha(m) ** self.alpha_power * beta(m) ** self.beta_power

    def cardinality_bound(self, n: int, m: float) -> int:
        from .mesh import mesh_constants
        k = mesh_constants(n, m)
        return k.N1 ** self.d1 * k.N2 ** (self.d2 + self.d3)


@dataclass(frozen=True)
class Variety:
    """Algebraic hypersurface containing a section: degree and residual."""

    degree: int
    residual: Callable[[np.ndarray], np.ndarray]
    name: str


@dataclass(frozen=True)
class _Geometry:
    algebraic: tuple
    angular: tuple
    dim: int
    sigma: Callable[[np.ndarray], np.ndarray]
    slack: Optional[Callable[[np.ndarray], np.ndarray]] = None
    variety: Optional[Variety] = None


@dataclass(frozen=True, eq=False)
class SectionSpec:
    """A validated section: kind, normalized parameters, ranges and map.

    Build instances with :func:`make_section`; the map and membership
    tests are reached through :func:`evaluate_map`,
    :func:`membership_residual` and :func:`membership_defect`.
    """

    kind: str
    params: dict
    algebraic_ranges: tuple
    angular_ranges: tuple
    ambient_dim: int
    label: str
    _sigma: Callable = field(repr=False)
    _slack: Optional[Callable] = field(repr=False, default=None)
    variety: Optional[Variety] = field(repr=False, default=None)
    rotation: Optional[np.ndarray] = field(repr=False, default=None)
    translation: Optional[np.ndarray] = field(repr=False, default=None)

    @property
    def signature(self) -> Signature:
        return signature(self)

    @property
    def n_coords(self) -> int:
        return len(self.algebraic_ranges) + len(self.angular_ranges)

    @property
    def ranges(self) -> list:
        return list(self.algebraic_ranges) + list(self.angular_ranges)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": _jsonable(self.params),
            "ranges": {
                "algebraic": [[iv.a, iv.b] for iv in self.algebraic_ranges],
                "angular": [[iv.u, iv.v, iv.kind.value] for iv in self.angular_ranges],
            },
        }

    def __eq__(self, other):
        if not isinstance(other, SectionSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
        return int(value)
    return value


# ---------------------------------------------------------------------------
# helpers

def _angle_slack(phi, u, v):
    """Signed angular distance of ``phi`` to ``[u, v]`` modulo 2*pi."""
    w = v - u
    if w >= TWO_PI - 1e-12:
        return np.full(np.shape(phi), PI)
    d = np.mod(np.asarray(phi) - u, TWO_PI)
    return np.where(d <= w, np.minimum(d, w - d), -np.minimum(d - w, TWO_PI - d))


def _norm(X):
    return np.sqrt(np.sum(X * X, axis=1))


def _require(cond, message):
    if not cond:
        raise ParameterError(message)


def _angle(value, name):
    value = float(value)
    if not math.isfinite(value):
        raise InvalidAngleError(f"{name} must be finite, got {value!r}")
    return value


def _positive(value, name):
    value = float(value)
    _require(math.isfinite(value) and value > 0, f"{name} must be positive, got {value!r}")
    return value


def _subperiodic(u, v, what):
    try:
        iv = AngularInterval(u, v)
    except InvalidAngleError as exc:
        raise ParameterError(f"{what}: {exc}") from None
    _require(not iv.periodic, f"{what} must be shorter than 2*pi (subperiodic), got [{u}, {v}]")
    return iv


def _vec(value, dim, name):
    arr = np.asarray(value, dtype=float).ravel()
    _require(arr.shape == (dim,) and np.all(np.isfinite(arr)),
             f"{name} must be a finite {dim}-vector, got {value!r}")
    return arr


def _full(u=-PI):
    return AngularInterval(u, u + TWO_PI)


def _sphere_variety(r):
    return Variety(2, lambda X: np.abs(np.sum(X * X, axis=1) - r * r), "sphere")


def _torus_variety(R, r):
    def residual(X):
        rho = np.hypot(X[:, 0], X[:, 1])
        return np.abs((rho - R) ** 2 + X[:, 2] ** 2 - r * r)
    return Variety(4, residual, "torus")


def _circle_variety(r):
    return Variety(2, lambda X: np.abs(np.sum(X * X, axis=1) - r * r), "circle")


# ---------------------------------------------------------------------------
# registry

@dataclass(frozen=True)
class _KindInfo:
    name: str
    label: str
    builder: Callable[..., _Geometry]
    family: str


_KINDS: dict[str, _KindInfo] = {}
_ALIASES = {
    "torus_tile": "toroidal_rectangle",
    "geographic_rectangle": "spherical_rectangle",
    "entire_circle": "circle",
}


def _register(name, label, family):
    def deco(builder):
        _KINDS[name] = _KindInfo(name, label, builder, family)
        return builder
    return deco


def kinds(family: Optional[str] = None) -> list:
    """Registered section kinds, optionally filtered by family
    (``'curve'``, ``'planar'``, ``'surface'``, ``'solid'``, ``'line'``)."""
    return [k for k, info in _KINDS.items() if family is None or info.family == family]


def kind_label(kind: str) -> str:
    return _KINDS[_ALIASES.get(kind, kind)].label


def kind_family(kind: str) -> str:
    return _KINDS[_ALIASES.get(kind, kind)].family


# --- 1-D and curves ---------------------------------------------------------

@_register("interval", "interval", "line")
def _interval(a=-1.0, b=1.0):
    iv = Interval(a, b)
    return _Geometry(
        (iv,), (), 1,
        lambda C: C[:, :1].copy(),
        lambda X: np.minimum(X[:, 0] - iv.a, iv.b - X[:, 0]),
    )


@_register("circle", "entire circle", "curve")
def _circle(r=1.0, u=-PI):
    r = _positive(r, "r")
    u = _angle(u, "u")
    return _Geometry(
        (), (_full(u),), 2,
        lambda C: r * np.column_stack([np.cos(C[:, 0]), np.sin(C[:, 0])]),
        lambda X: np.full(len(X), np.inf),
        _circle_variety(r),
    )


@_register("circle_arc", "circle arc", "curve")
def _circle_arc(omega, r=1.0, center=0.0):
    r = _positive(r, "r")
    omega = _angle(omega, "omega")
    _require(0 < omega < PI, f"circle_arc requires 0 < omega < pi, got {omega}")
    center = _angle(center, "center")
    iv = _subperiodic(center - omega, center + omega, "arc range")
    return _Geometry(
        (), (iv,), 2,
        lambda C: r * np.column_stack([np.cos(C[:, 0]), np.sin(C[:, 0])]),
        lambda X: r * _angle_slack(np.arctan2(X[:, 1], X[:, 0]), iv.u, iv.v),
        _circle_variety(r),
    )


# --- planar -----------------------------------------------------------------

def _polar(C):
    t, th = C[:, 0], C[:, 1]
    return np.column_stack([t * np.cos(th), t * np.sin(th)])


@_register("disk", "entire disk", "planar")
def _disk(r=1.0):
    r = _positive(r, "r")
    return _Geometry((Interval(0.0, r),), (_full(),), 2, _polar,
                     lambda X: r - _norm(X))


@_register("disk_annulus", "disk annulus", "planar")
def _disk_annulus(r_in, r_out):
    r_in, r_out = _positive(r_in, "r_in"), _positive(r_out, "r_out")
    _require(r_in < r_out, f"disk_annulus requires r_in < r_out, got {r_in}, {r_out}")
    return _Geometry((Interval(r_in, r_out),), (_full(),), 2, _polar,
                     lambda X: np.minimum(r_out - _norm(X), _norm(X) - r_in))


@_register("circular_sector", "disk sector", "planar")
def _circular_sector(omega, r=1.0):
    omega = _angle(omega, "omega")
    _require(0 < omega < PI, f"circular_sector requires 0 < omega < pi, got {omega}")
    r = _positive(r, "r")

    def slack(X):
        rad = _norm(X)
        wedge = rad * _angle_slack(np.arctan2(X[:, 1], X[:, 0]), -omega, omega)
        return np.minimum(r - rad, wedge)
    return _Geometry((Interval(0.0, r),), (_subperiodic(-omega, omega, "sector range"),),
                     2, _polar, slack)


SEGMENT_REPRESENTATIONS = ("arc_segment", "arc_point", "arc_arc_half", "arc_arc_full", "chord")


@_register("circular_segment", "disk segment", "planar")
def _circular_segment(omega, r=1.0, representation="arc_segment"):
    """Segment ``{|x| <= r, y >= r*cos(omega)}`` symmetric about the y-axis.

    ``representation`` picks one of the blending descriptions: arc-segment,
    arc-point (generalized sector), arc-arc on the half range or on the
    full (non-injective) range, or the vertical-chord map ``(t sin, cos)``.
    """
    omega = _angle(omega, "omega")
    _require(0 < omega < PI, f"circular_segment requires 0 < omega < pi, got {omega}")
    r = _positive(r, "r")
    _require(representation in SEGMENT_REPRESENTATIONS,
             f"unknown segment representation {representation!r}; "
             f"expected one of {SEGMENT_REPRESENTATIONS}")
    h = math.cos(omega)
    lo, hi = HALF_PI - omega, HALF_PI + omega
    unit = Interval(0.0, 1.0)

    if representation == "arc_segment":
        ranges = ((unit,), (_subperiodic(lo, hi, "segment range"),))

        def sigma(C):
            t, th = C[:, 0], C[:, 1]
            return r * np.column_stack([np.cos(th), t * np.sin(th) + (1 - t) * h])
    elif representation == "arc_point":
        ranges = ((unit,), (_subperiodic(lo, hi, "segment range"),))

        def sigma(C):
            t, th = C[:, 0], C[:, 1]
            return r * np.column_stack([t * np.cos(th), t * np.sin(th) + (1 - t) * h])
    elif representation in ("arc_arc_half", "arc_arc_full"):
        top = HALF_PI if representation == "arc_arc_half" else hi
        ranges = ((unit,), (_subperiodic(lo, top, "segment range"),))

        def sigma(C):
            t, th = C[:, 0], C[:, 1]
            return r * np.column_stack([(2 * t - 1) * np.cos(th), np.sin(th)])
    else:
        ranges = ((Interval(-1.0, 1.0),), (_subperiodic(-omega, omega, "segment range"),))

        def sigma(C):
            t, th = C[:, 0], C[:, 1]
            return r * np.column_stack([t * np.sin(th), np.cos(th)])

    return _Geometry(ranges[0], ranges[1], 2, sigma,
                     lambda X: np.minimum(r - _norm(X), X[:, 1] - r * h))


@_register("circular_zone", "disk zone", "planar")
def _circular_zone(omega1, omega2, r=1.0):
    """Zone between the lines ``y = r sin(omega1)`` and ``y = r sin(omega2)``."""
    omega1, omega2 = _angle(omega1, "omega1"), _angle(omega2, "omega2")
    _require(-HALF_PI <= omega1 < omega2 <= HALF_PI,
             f"circular_zone requires -pi/2 <= omega1 < omega2 <= pi/2, got {omega1}, {omega2}")
    r = _positive(r, "r")

    def sigma(C):
        t, th = C[:, 0], C[:, 1]
        return r * np.column_stack([(2 * t - 1) * np.cos(th), np.sin(th)])

    def slack(X):
        y = X[:, 1]
        return np.minimum.reduce([r - _norm(X), y - r * math.sin(omega1), r * math.sin(omega2) - y])
    return _Geometry((Interval(0.0, 1.0),), (_subperiodic(omega1, omega2, "zone range"),),
                     2, sigma, slack)


@_register("circular_lens", "disk lens", "planar")
def _circular_lens(h, r=1.0):
    """Intersection of the disks of radius ``r`` centred at ``(-h, 0)`` and ``(h, 0)``."""
    r = _positive(r, "r")
    h = _positive(h, "h")
    _require(h < r, f"circular_lens requires 0 < h < r, got h={h}, r={r}")
    gamma = math.acos(h / r)

    def sigma(C):
        t, th = C[:, 0], C[:, 1]
        return np.column_stack([(2 * t - 1) * (r * np.cos(th) - h), r * np.sin(th)])

    def slack(X):
        left = r - np.hypot(X[:, 0] + h, X[:, 1])
        right = r - np.hypot(X[:, 0] - h, X[:, 1])
        return np.minimum(left, right)
    return _Geometry((Interval(0.0, 1.0),), (_subperiodic(-gamma, gamma, "lens range"),),
                     2, sigma, slack)


@_register("generic_blending", "arc blending", "planar")
def _generic_blending(A1, B1, C1, A2, B2, C2, omega1, omega2):
    """``t*P1(theta) + (1-t)*P2(theta)``, ``P_i = A_i cos + B_i sin + C_i``.

    No membership test is available for arbitrary arc data.
    """
    A1, B1, C1 = (_vec(v, 2, n) for v, n in ((A1, "A1"), (B1, "B1"), (C1, "C1")))
    A2, B2, C2 = (_vec(v, 2, n) for v, n in ((A2, "A2"), (B2, "B2"), (C2, "C2")))
    _require(np.any(A1) or np.any(B1), "A1 and B1 must not both vanish")
    _require(np.any(A2) or np.any(B2), "A2 and B2 must not both vanish")
    try:
        iv = AngularInterval(_angle(omega1, "omega1"), _angle(omega2, "omega2"))
    except InvalidAngleError as exc:
        raise ParameterError(f"blending range: {exc}") from None

    def sigma(C):
        t, th = C[:, :1], C[:, 1:2]
        c, s = np.cos(th), np.sin(th)
        P1 = A1 * c + B1 * s + C1
        P2 = A2 * c + B2 * s + C2
        return t * P1 + (1 - t) * P2
    return _Geometry((Interval(0.0, 1.0),), (iv,), 2, sigma)


def lune_circle(omega1: float, omega2: float) -> tuple:
    """Centre abscissa and radius of the outer circle bounding a planar lune."""
    return (math.cos(omega2) - math.sin(omega2) / math.tan(omega1),
            math.sin(omega2) / math.sin(omega1))


@_register("planar_lune", "planar lune", "planar")
def _planar_lune(omega1, omega2):
    """Crescent between the unit circle and a second circle through
    ``(cos(omega2), +-sin(omega2))``, described by the bilinear trigonometric
    map on ``[-omega1, omega1] x [0, omega2]``.

    The region is the second disk minus the unit disk. The map covers it
    exactly when ``0 < 2*omega2 <= omega1 < pi``, i.e. when the origin is
    not interior to the second disk; otherwise the sweeping arcs fold over.
    """
    omega1, omega2 = _angle(omega1, "omega1"), _angle(omega2, "omega2")
    _require(0 < omega2 and 2 * omega2 <= omega1 * (1 + 1e-14) and omega1 < PI,
             f"planar_lune requires 0 < 2*omega2 <= omega1 < pi, got {omega1}, {omega2}")
    s1, cot1 = math.sin(omega1), math.cos(omega1) / math.sin(omega1)
    c, rho = lune_circle(omega1, omega2)

    def sigma(C):
        t1, t2 = C[:, 0], C[:, 1]
        s2 = np.sin(t2)
        x = np.cos(t2) - cot1 * s2 + np.cos(t1) * s2 / s1
        y = np.sin(t1) * s2 / s1
        return np.column_stack([x, y])

    def slack(X):
        return np.minimum(rho - np.hypot(X[:, 0] - c, X[:, 1]), _norm(X) - 1.0)
    return _Geometry((), (_subperiodic(-omega1, omega1, "lune range 1"),
                          _subperiodic(0.0, omega2, "lune range 2")), 2, sigma, slack)


# --- surfaces ---------------------------------------------------------------

def _torus_map(R, r):
    def sigma(C):
        t1, t2 = C[:, 0], C[:, 1]
        rad = R + r * np.cos(t1)
        return np.column_stack([rad * np.cos(t2), rad * np.sin(t2), r * np.sin(t1)])
    return sigma


def _torus_radii(R, r):
    R = float(R)
    r = _positive(r, "r")
    _require(math.isfinite(R) and (R == 0 or R > r),
             f"torus radii require R > r > 0 (or R = 0 for a sphere), got R={R}, r={r}")
    return R, r


def _surface_variety(R, r):
    return _sphere_variety(r) if R == 0 else _torus_variety(R, r)


def _latitude_range(w1, w2):
    w1, w2 = _angle(w1, "omega1"), _angle(w2, "omega2")
    _require(-HALF_PI <= w1 < w2 <= HALF_PI,
             f"latitude range must satisfy -pi/2 <= omega1 < omega2 <= pi/2, got {w1}, {w2}")
    return AngularInterval(w1, w2)


def _longitude_range(w3, w4, name="longitude range"):
    w3, w4 = _angle(w3, "omega3"), _angle(w4, "omega4")
    _require(-PI - 1e-12 <= w3 < w4 <= PI + 1e-12,
             f"{name} must lie in [-pi, pi], got [{w3}, {w4}]")
    return _subperiodic(w3, w4, name)


def _lon_slack(X, iv):
    rho = np.hypot(X[:, 0], X[:, 1])
    return rho * _angle_slack(np.arctan2(X[:, 1], X[:, 0]), iv.u, iv.v)


@_register("sphere", "entire sphere", "surface")
def _sphere(r=1.0):
    r = _positive(r, "r")
    # double cover by two full periods
    return _Geometry((), (_full(), _full()), 3, _torus_map(0.0, r),
                     lambda X: np.full(len(X), np.inf), _sphere_variety(r))


@_register("torus", "entire torus", "surface")
def _torus(R=3.0, r=1.0):
    R, r = _torus_radii(R, r)
    return _Geometry((), (_full(), _full()), 3, _torus_map(R, r),
                     lambda X: np.full(len(X), np.inf), _surface_variety(R, r))


@_register("spherical_rectangle", "surface spherical rectangle", "surface")
def _spherical_rectangle(omega1, omega2, omega3, omega4, r=1.0):
    """Geographic rectangle: latitudes ``[omega1, omega2]``, longitudes ``[omega3, omega4]``."""
    r = _positive(r, "r")
    lat = _latitude_range(omega1, omega2)
    lon = _longitude_range(omega3, omega4)

    def slack(X):
        z = X[:, 2]
        return np.minimum.reduce([z - r * math.sin(lat.u), r * math.sin(lat.v) - z,
                                  _lon_slack(X, lon)])
    return _Geometry((), (lat, lon), 3, _torus_map(0.0, r), slack, _sphere_variety(r))


@_register("spherical_lune_surface", "surface spherical lune", "surface")
def _spherical_lune_surface(omega3, omega4, r=1.0):
    r = _positive(r, "r")
    lon = _longitude_range(omega3, omega4)
    return _Geometry((), (_subperiodic(-HALF_PI, HALF_PI, "latitude range"), lon), 3,
                     _torus_map(0.0, r), lambda X: _lon_slack(X, lon), _sphere_variety(r))


@_register("spherical_cap_surface", "surface spherical cap", "surface")
def _spherical_cap_surface(omega, r=1.0):
    """Polar cap ``z >= r cos(omega)``; latitude-like range ``[pi/2 - omega, pi/2 + omega]``."""
    r = _positive(r, "r")
    omega = _angle(omega, "omega")
    _require(0 < omega <= HALF_PI, f"spherical cap requires 0 < omega <= pi/2, got {omega}")
    return _Geometry((), (_subperiodic(HALF_PI - omega, HALF_PI + omega, "cap range"), _full()), 3,
                     _torus_map(0.0, r), lambda X: X[:, 2] - r * math.cos(omega),
                     _sphere_variety(r))


@_register("spherical_collar", "surface spherical collar", "surface")
def _spherical_collar(omega1, omega2, r=1.0):
    r = _positive(r, "r")
    lat = _latitude_range(omega1, omega2)
    _require(lat.v - lat.u < PI, "spherical collar must not be the entire sphere")

    def slack(X):
        z = X[:, 2]
        return np.minimum(z - r * math.sin(lat.u), r * math.sin(lat.v) - z)
    return _Geometry((), (lat, _full()), 3, _torus_map(0.0, r), slack, _sphere_variety(r))


def _tube_angle(X, R):
    return np.arctan2(X[:, 2], np.hypot(X[:, 0], X[:, 1]) - R)


@_register("toroidal_rectangle", "surface toroidal rectangle", "surface")
def _toroidal_rectangle(omega1, omega2, omega3, omega4, R=3.0, r=1.0):
    R, r = _torus_radii(R, r)
    t1 = _longitude_range(omega1, omega2, "poloidal range")
    t2 = _longitude_range(omega3, omega4, "toroidal range")

    def slack(X):
        return np.minimum(r * _angle_slack(_tube_angle(X, R), t1.u, t1.v), _lon_slack(X, t2))
    return _Geometry((), (t1, t2), 3, _torus_map(R, r), slack, _surface_variety(R, r))


@_register("toroidal_cap_surface", "surface toroidal cap", "surface")
def _toroidal_cap_surface(omega, R=3.0, r=1.0):
    R, r = _torus_radii(R, r)
    omega = _angle(omega, "omega")
    _require(0 < omega < PI, f"toroidal cap requires 0 < omega < pi, got {omega}")
    return _Geometry((), (_subperiodic(HALF_PI - omega, HALF_PI + omega, "cap range"), _full()), 3,
                     _torus_map(R, r), lambda X: X[:, 2] - r * math.cos(omega),
                     _surface_variety(R, r))


@_register("toroidal_collar", "surface toroidal collar", "surface")
def _toroidal_collar(omega1, omega2, R=3.0, r=1.0):
    R, r = _torus_radii(R, r)
    t1 = _longitude_range(omega1, omega2, "poloidal range")
    return _Geometry((), (t1, _full()), 3, _torus_map(R, r),
                     lambda X: r * _angle_slack(_tube_angle(X, R), t1.u, t1.v),
                     _surface_variety(R, r))


@_register("toroidal_slice_surface", "surface toroidal slice", "surface")
def _toroidal_slice_surface(omega3, omega4, R=3.0, r=1.0):
    R, r = _torus_radii(R, r)
    t2 = _longitude_range(omega3, omega4, "toroidal range")
    return _Geometry((), (_full(), t2), 3, _torus_map(R, r),
                     lambda X: _lon_slack(X, t2), _surface_variety(R, r))


# --- solids -----------------------------------------------------------------

def _rotate(profile: "SectionSpec", axis: str, phi: AngularInterval) -> _Geometry:
    """Rotate a planar section about its x- or y-axis in generalized
    cylindrical coordinates (the radial coordinate may be negative)."""
    _require(profile.ambient_dim == 2, f"rotation profile must be planar, got {profile.kind}")
    _require(axis in ("x", "y"), f"rotation axis must be 'x' or 'y', got {axis!r}")
    k = profile.n_coords
    swap = axis == "x"

    def sigma(C):
        P = _posed_sigma(profile, C[:, :k])
        rad, z = (P[:, 1], P[:, 0]) if swap else (P[:, 0], P[:, 1])
        f = C[:, k]
        return np.column_stack([rad * np.cos(f), rad * np.sin(f), z])

    slack = None
    if profile._slack is not None:
        def slack(X):
            rho = np.hypot(X[:, 0], X[:, 1])
            ang = np.arctan2(X[:, 1], X[:, 0])
            z = X[:, 2]
            best = np.full(len(X), -np.inf)
            for sgn, shift in ((1.0, 0.0), (-1.0, PI)):
                rr = sgn * rho
                Q = np.column_stack([z, rr]) if swap else np.column_stack([rr, z])
                s = _posed_slack(profile, Q)
                if not phi.periodic:
                    s = np.minimum(s, rho * _angle_slack(ang + shift, phi.u, phi.v))
                best = np.maximum(best, s)
            return best

    return _Geometry(profile.algebraic_ranges,
                     tuple(profile.angular_ranges) + (phi,), 3, sigma, slack)


def _phi_range(phi1, phi2, allow_periodic=True):
    try:
        iv = AngularInterval(_angle(phi1, "phi1"), _angle(phi2, "phi2"))
    except InvalidAngleError as exc:
        raise ParameterError(f"rotation range: {exc}") from None
    if not allow_periodic:
        _require(not iv.periodic, "rotation range must be shorter than 2*pi")
    return iv


def _translated(kind, dx, **params):
    return make_section(kind, translation=[dx, 0.0], **params)


@_register("solid_of_rotation", "solid of rotation", "solid")
def _solid_of_rotation(profile, axis="y", phi1=-PI, phi2=PI):
    """Rotate a planar section (given as ``{"kind", "params"}``) about an axis."""
    _require(isinstance(profile, dict) and "kind" in profile,
             "profile must be a mapping with a 'kind' entry")
    spec = make_section(profile["kind"], **dict(profile.get("params", {})))
    return _rotate(spec, axis, _phi_range(phi1, phi2))


@_register("ball", "entire ball", "solid")
def _ball(r=1.0):
    return _rotate(make_section("disk", r=r), "y", AngularInterval(0.0, TWO_PI))


@_register("solid_torus", "entire solid torus", "solid")
def _solid_torus(R=3.0, r=1.0):
    R, r = _torus_radii(R, r)
    _require(R > 0, "solid_torus requires R > r > 0")
    return _rotate(_translated("disk", R, r=r), "y", AngularInterval(0.0, TWO_PI))


@_register("spherical_shell", "spherical shell", "solid")
def _spherical_shell(r_in, r_out):
    return _rotate(make_section("disk_annulus", r_in=r_in, r_out=r_out), "y",
                   AngularInterval(0.0, TWO_PI))


@_register("solid_cap", "solid spherical cap", "solid")
def _solid_cap(omega, representation="arc_segment"):
    return _rotate(make_section("circular_segment", omega=omega, representation=representation),
                   "y", _full())


@_register("spherical_zone_solid", "solid spherical zone", "solid")
def _spherical_zone_solid(omega1, omega2):
    return _rotate(make_section("circular_zone", omega1=omega1, omega2=omega2), "y", _full())


@_register("spherical_slice", "spherical slice", "solid")
def _spherical_slice(phi1, phi2):
    half_disk = make_section("circular_sector", omega=HALF_PI)
    return _rotate(half_disk, "y", _phi_range(phi1, phi2, allow_periodic=False))


@_register("spherical_cone", "solid spherical cone", "solid")
def _spherical_cone(omega):
    return _rotate(make_section("circular_sector", omega=omega), "x", _full())


@_register("spherical_lens_solid", "solid spherical lens", "solid")
def _spherical_lens_solid(h):
    return _rotate(make_section("circular_lens", h=h), "x", _full())


@_register("toroidal_cap_solid", "solid toroidal cap", "solid")
def _toroidal_cap_solid(omega, R=3.0, r=1.0):
    R, r = _torus_radii(R, r)
    _require(R > 0, "toroidal_cap_solid requires R > r > 0")
    return _rotate(_translated("circular_segment", R, omega=omega, r=r), "y", _full())


@_register("toroidal_zone_solid", "solid toroidal zone", "solid")
def _toroidal_zone_solid(omega1, omega2, R=3.0, r=1.0):
    R, r = _torus_radii(R, r)
    _require(R > 0, "toroidal_zone_solid requires R > r > 0")
    return _rotate(_translated("circular_zone", R, omega1=omega1, omega2=omega2, r=r),
                   "y", _full())


@_register("toroidal_slice_solid", "solid toroidal slice", "solid")
def _toroidal_slice_solid(phi1, phi2, R=3.0, r=1.0):
    R, r = _torus_radii(R, r)
    _require(R > 0, "toroidal_slice_solid requires R > r > 0")
    return _rotate(_translated("disk", R, r=r), "y", _phi_range(phi1, phi2, allow_periodic=False))


@_register("solid_lune", "solid lune", "solid")
def _solid_lune(omega1, omega2, phi1=0.0, phi2=PI):
    """Rotation of a planar lune about the line through the two centres."""
    return _rotate(make_section("planar_lune", omega1=omega1, omega2=omega2), "x",
                   _phi_range(phi1, phi2))


@_register("spherical_square_pyramid", "spherical square pyramid", "solid")
def _spherical_square_pyramid(V, omega1, omega2, omega3, omega4):
    """Cone from apex ``V`` (inside the unit ball) over a geographic rectangle."""
    V = _vec(V, 3, "V")
    _require(float(np.dot(V, V)) < 1.0, f"pyramid apex must lie inside the unit ball, got {V}")
    lat = _latitude_range(omega1, omega2)
    lon = _longitude_range(omega3, omega4)
    base = _torus_map(0.0, 1.0)

    def sigma(C):
        t = C[:, :1]
        return t * base(C[:, 1:]) + (1 - t) * V

    def slack(X):
        e = X - V
        ee = np.sum(e * e, axis=1)
        ve = e @ V
        vv = float(V @ V)
        at_apex = ee <= 1e-28
        ee_safe = np.where(at_apex, 1.0, ee)
        s = (-ve + np.sqrt(ve * ve - ee_safe * (vv - 1.0))) / ee_safe
        P = V + s[:, None] * e
        z = P[:, 2]
        rect = np.minimum.reduce([z - math.sin(lat.u), math.sin(lat.v) - z, _lon_slack(P, lon)])
        out = np.minimum((s - 1.0) * np.sqrt(ee_safe), rect / s)
        return np.where(at_apex, 0.0, out)
    return _Geometry((Interval(0.0, 1.0),), (lat, lon), 3, sigma, slack)


# ---------------------------------------------------------------------------
# public operations

def make_section(kind: str, rotation=None, translation=None, **params) -> SectionSpec:
    """Validate parameters and build the :class:`SectionSpec` for ``kind``.

    ``rotation`` (an orthogonal ``d x d`` matrix) and ``translation`` place
    the canonical section in an arbitrary pose; they are applied after the
    map.

    Raises
    ------
    UnsupportedKindError
        Unknown kind.
    ParameterError
        A parameter violates its constraint; the message names it.
    """
    name = _ALIASES.get(kind, kind)
    if name not in _KINDS:
        raise UnsupportedKindError(f"unknown section kind {kind!r}")
    info = _KINDS[name]
    try:
        bound = inspect.signature(info.builder).bind(**params)
    except TypeError as exc:
        raise ParameterError(f"{name}: {exc}") from None
    bound.apply_defaults()
    normalized = dict(bound.arguments)
    geo = info.builder(**normalized)

    rot = trans = None
    if rotation is not None:
        rot = np.asarray(rotation, dtype=float).reshape(geo.dim, geo.dim)
        _require(np.allclose(rot @ rot.T, np.eye(geo.dim), atol=1e-12),
                 "rotation must be an orthogonal matrix")
        normalized["rotation"] = rot.tolist()
    if translation is not None:
        trans = _vec(translation, geo.dim, "translation")
        normalized["translation"] = trans.tolist()

    return SectionSpec(
        kind=name,
        params=_jsonable(normalized),
        algebraic_ranges=tuple(geo.algebraic),
        angular_ranges=tuple(geo.angular),
        ambient_dim=geo.dim,
        label=info.label,
        _sigma=geo.sigma,
        _slack=geo.slack,
        variety=geo.variety,
        rotation=rot,
        translation=trans,
    )


def section_from_dict(data: dict) -> SectionSpec:
    return make_section(data["kind"], **dict(data.get("params", {})))


def _to_pose(spec, X):
    if spec.rotation is not None:
        X = X @ spec.rotation.T
    if spec.translation is not None:
        X = X + spec.translation
    return X


def _from_pose(spec, X):
    if spec.translation is not None:
        X = X - spec.translation
    if spec.rotation is not None:
        X = X @ spec.rotation
    return X


def _posed_sigma(spec, C):
    return _to_pose(spec, spec._sigma(C))


def _posed_slack(spec, X):
    return spec._slack(_from_pose(spec, X))


def _as_points(x, dim):
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {np.shape(x)}")
    return X, single


def evaluate_map(spec: SectionSpec, coords, check: bool = True) -> np.ndarray:
    """Apply the section map to one coordinate tuple or an ``(N, k)`` array."""
    C, single = _as_points(coords, spec.n_coords)
    if check:
        for j, iv in enumerate(spec.ranges):
            lo, hi = (iv.a, iv.b) if isinstance(iv, Interval) else (iv.u, iv.v)
            tol = 1e-12 * (1.0 + max(abs(lo), abs(hi)))
            col = C[:, j]
            if np.any((col < lo - tol) | (col > hi + tol)) or not np.all(np.isfinite(col)):
                raise DomainError(f"coordinate {j} outside [{lo}, {hi}] for {spec.kind}")
    X = _posed_sigma(spec, C)
    return X[0] if single else X


def membership_residual(spec: SectionSpec, x):
    """Absolute value of the defining polynomial (sphere, torus or circle)."""
    if spec.variety is None:
        raise UnsupportedKindError(
            f"membership_residual needs a surface or curve kind, got {spec.kind}")
    X, single = _as_points(x, spec.ambient_dim)
    res = spec.variety.residual(_from_pose(spec, X))
    return float(res[0]) if single else res


def inequality_slack(spec: SectionSpec, x):
    """Smallest signed slack of the section's defining inequalities.

    Positive inside, negative outside, in length units. Returns ``None``
    when the kind has no membership test (``generic_blending``).
    """
    if spec._slack is None:
        return None
    X, single = _as_points(x, spec.ambient_dim)
    s = _posed_slack(spec, X)
    return float(s[0]) if single else s


def membership_defect(spec: SectionSpec, x):
    """``max(residual, -slack, 0)``: zero for points of the section."""
    X, single = _as_points(x, spec.ambient_dim)
    out = np.zeros(len(X))
    if spec.variety is not None:
        out = np.maximum(out, spec.variety.residual(_from_pose(spec, X)))
    slack = inequality_slack(spec, X)
    if slack is None and spec.variety is None:
        return None
    if slack is not None:
        out = np.maximum(out, -slack)
    return float(out[0]) if single else out


def signature(spec: SectionSpec) -> Signature:
    d2 = sum(1 for iv in spec.angular_ranges if iv.periodic)
    d3 = len(spec.angular_ranges) - d2
    return Signature(len(spec.algebraic_ranges), d2, d3, spec.ambient_dim)


def scale(spec: SectionSpec) -> float:
    """Characteristic length (max radius-like parameter) used in tolerances."""
    p = spec.params
    vals = [abs(float(p[k])) for k in ("r", "R", "r_out", "b", "a") if k in p]
    if spec.translation is not None:
        vals.append(float(np.linalg.norm(spec.translation)))
    prof = p.get("profile")
    if isinstance(prof, dict):
        vals.append(scale(section_from_dict(prof)))
    return max([1.0] + vals)


# default parameters used by the catalog table and sweeping tests
EXAMPLE_PARAMS: dict[str, dict] = {
    "interval": {},
    "circle": {},
    "circle_arc": {"omega": PI / 3},
    "disk": {},
    "disk_annulus": {"r_in": 0.5, "r_out": 1.0},
    "circular_sector": {"omega": PI / 3},
    "circular_segment": {"omega": PI / 3},
    "circular_zone": {"omega1": -PI / 6, "omega2": PI / 4},
    "circular_lens": {"h": 0.5},
    "generic_blending": {"A1": [1, 0], "B1": [0, 1], "C1": [0, 0],
                         "A2": [0, 0], "B2": [0, 0.5], "C2": [0, 0],
                         "omega1": PI / 6, "omega2": 5 * PI / 6},
    "planar_lune": {"omega1": 2 * PI / 3, "omega2": PI / 4},
    "sphere": {},
    "torus": {"R": 3.0, "r": 1.0},
    "spherical_rectangle": {"omega1": -PI / 6, "omega2": PI / 4, "omega3": -PI / 3, "omega4": PI / 2},
    "spherical_lune_surface": {"omega3": -PI / 4, "omega4": PI / 4},
    "spherical_cap_surface": {"omega": PI / 3},
    "spherical_collar": {"omega1": -PI / 6, "omega2": PI / 3},
    "toroidal_rectangle": {"omega1": -PI / 2, "omega2": PI / 3, "omega3": 0.0, "omega4": PI / 2},
    "toroidal_cap_surface": {"omega": PI / 3},
    "toroidal_collar": {"omega1": -PI / 4, "omega2": PI / 2},
    "toroidal_slice_surface": {"omega3": -PI / 4, "omega4": PI / 3},
    "ball": {},
    "solid_torus": {},
    "spherical_shell": {"r_in": 0.5, "r_out": 1.0},
    "solid_cap": {"omega": PI / 3},
    "spherical_zone_solid": {"omega1": -PI / 6, "omega2": PI / 4},
    "spherical_slice": {"phi1": 0.0, "phi2": PI / 2},
    "spherical_cone": {"omega": PI / 4},
    "spherical_lens_solid": {"h": 0.5},
    "toroidal_cap_solid": {"omega": PI / 3},
    "toroidal_zone_solid": {"omega1": -PI / 6, "omega2": PI / 4},
    "toroidal_slice_solid": {"phi1": 0.0, "phi2": PI / 2},
    "solid_of_rotation": {"profile": {"kind": "circular_sector", "params": {"omega": PI / 3}},
                          "axis": "x", "phi1": -PI, "phi2": PI},
    "solid_lune": {"omega1": 2 * PI / 3, "omega2": PI / 4},
    "spherical_square_pyramid": {"V": [0.1, 0.0, -0.2], "omega1": -PI / 6, "omega2": PI / 4,
                                 "omega3": -PI / 4, "omega4": PI / 3},
}


def example_section(kind: str) -> SectionSpec:
    """The kind built with its catalog example parameters."""
    name = _ALIASES.get(kind, kind)
    return make_section(name, **EXAMPLE_PARAMS[name])


def catalog_rows(kinds_: Optional[Sequence[str]] = None) -> list:
    """Rows ``(pretty_class, pretty_bound, labels)`` grouped like the usual
    constant/cardinality table, ordered by number of factors then by the
    power of beta."""
    groups: dict = {}
    for kind in kinds_ or kinds():
        if kind in ("interval", "generic_blending", "solid_of_rotation"):
            continue
        sig = example_section(kind).signature
        key = (sig.n_factors, sig.beta_power, sig.d1 == 0, sig.pretty_class, sig.pretty_bound)
        groups.setdefault(key, []).append(kind_label(kind))
    return [(k[3], k[4], labels) for k, labels in sorted(groups.items())]
