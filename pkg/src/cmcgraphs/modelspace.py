"""Space forms M^2(c) and the products M^2(c) x R, in flat embedding models.

Every base surface lives in a flat three- or two-dimensional space:

* ``c > 0``: sphere of radius ``1/sqrt(c)`` in Euclidean R^3,
* ``c = 0``: the plane R^2,
* ``c < 0``: the upper sheet ``x^2 + y^2 - z^2 = 1/c, z > 0`` in Minkowski
  space with signature (+, +, -).

Points of the product carry the height ``t`` as a trailing coordinate, so an
ambient point has four coordinates when ``c != 0`` and three when ``c == 0``.
Vectorised helpers act on the last axis of numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import AccuracyError, DomainError, InvalidInputError

EMBEDDING_TOL = 1e-12
DEFAULT_FD_STEP = 1e-3


@dataclass(frozen=True)
class SpaceForm:
    """Simply connected surface of constant curvature ``c``."""

    c: float

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise InvalidInputError(f"curvature must be finite, got {self.c!r}")

    @property
    def radius(self) -> float:
        return math.inf if self.c == 0 else 1.0 / math.sqrt(abs(self.c))

    @property
    def base_dim(self) -> int:
        return 2 if self.c == 0 else 3

    @property
    def model(self) -> str:
        if self.c > 0:
            return "sphere"
        if self.c < 0:
            return "hyperboloid"
        return "plane"

    @property
    def base_signature(self) -> np.ndarray:
        if self.c > 0:
            return np.array([1.0, 1.0, 1.0])
        if self.c < 0:
            return np.array([1.0, 1.0, -1.0])
        return np.array([1.0, 1.0])

    @property
    def signature(self) -> np.ndarray:
        """Diagonal of the flat metric of the product embedding (height last)."""
        return np.append(self.base_signature, 1.0)

    def inner(self, u, v):
        """Flat inner product of base vectors (last axis)."""
        return np.sum(np.asarray(u) * np.asarray(v) * self.base_signature, axis=-1)

    def ambient_inner(self, u, v):
        """Flat inner product of product-space vectors (last axis)."""
        return np.sum(np.asarray(u) * np.asarray(v) * self.signature, axis=-1)

    def constraint_residual(self, base) -> np.ndarray:
        """``|<X, X> - 1/c|`` for c != 0, zero for the plane."""
        base = np.asarray(base, dtype=float)
        if self.c == 0:
            return np.zeros(base.shape[:-1])
        return np.abs(self.inner(base, base) - 1.0 / self.c)

    def origin(self) -> np.ndarray:
        """North pole / hyperboloid vertex / plane origin."""
        if self.c == 0:
            return np.zeros(2)
        return np.array([0.0, 0.0, self.radius])

    def polar(self, r, u) -> np.ndarray:
        """Base point at geodesic distance ``r`` from :meth:`origin`, direction ``u``.

        Negative ``r`` is allowed and reflects through the origin.
        """
        r = np.asarray(r, dtype=float)
        u = np.asarray(u, dtype=float)
        if self.c == 0:
            return np.stack(np.broadcast_arrays(r * np.cos(u), r * np.sin(u)), axis=-1)
        R = self.radius
        s = r / R
        if self.c > 0:
            rad, ax = R * np.sin(s), R * np.cos(s)
        else:
            rad, ax = R * np.sinh(s), R * np.cosh(s)
        return np.stack(np.broadcast_arrays(rad * np.cos(u), rad * np.sin(u), ax), axis=-1)

    def from_halfplane(self, x, y) -> np.ndarray:
        """Isometry from the upper half-plane (metric R^2 (dx^2+dy^2)/y^2) to the hyperboloid.

        The geodesic ``x = 0`` maps into the plane ``X = 0`` and ``X = R x/y``
        equals ``R sinh(d/R)`` with ``d`` the distance to that geodesic.
        """
        if self.c >= 0:
            raise InvalidInputError("half-plane coordinates exist only for c < 0")
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0):
            raise DomainError("half-plane points need y > 0")
        R = self.radius
        rho2 = x * x + y * y
        return np.stack(
            np.broadcast_arrays(R * x / y, R * (rho2 - 1.0) / (2 * y), R * (rho2 + 1.0) / (2 * y)),
            axis=-1,
        )

    def point(self, *coords: float, t: float = 0.0) -> "AmbientPoint":
        """Build an :class:`AmbientPoint` from base coordinates and a height."""
        return AmbientPoint(tuple(float(x) for x in coords) + (float(t),), self)


@dataclass(frozen=True)
class AmbientPoint:
    """Point of M^2(c) x R in the flat embedding; the last coordinate is the height."""

    coords: tuple
    spaceform: SpaceForm

    def __post_init__(self):
        sf = self.spaceform
        coords = tuple(float(x) for x in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != sf.base_dim + 1:
            raise InvalidInputError(
                f"{sf.model} points need {sf.base_dim + 1} coordinates, got {len(coords)}"
            )
        if sf.c != 0:
            base = np.array(coords[:-1])
            scale = max(1.0, float(np.dot(base, base)) * abs(sf.c))
            res = float(sf.constraint_residual(base)) * abs(sf.c)
            if res > EMBEDDING_TOL * scale:
                raise InvalidInputError(f"point off the {sf.model}: residual {res:.3e}")
            if sf.c < 0 and coords[2] <= 0:
                raise InvalidInputError("hyperboloid points need z > 0")

    @property
    def base(self) -> np.ndarray:
        return np.array(self.coords[:-1])

    @property
    def height(self) -> float:
        return self.coords[-1]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)


PointLike = Union[AmbientPoint, Sequence[float], np.ndarray]
CurveSampler = Callable[[float], PointLike]


def _base_of(sf: SpaceForm, p: PointLike) -> np.ndarray:
    if isinstance(p, AmbientPoint):
        if p.spaceform != sf:
            raise InvalidInputError(f"point lives on {p.spaceform}, expected {sf}")
        return p.base
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1] == sf.base_dim + 1:
        return arr[..., :-1]
    if arr.shape[-1] == sf.base_dim:
        return arr
    raise InvalidInputError(f"cannot read a {sf.model} point from shape {arr.shape}")


def geodesic_distance(sf: SpaceForm, p: PointLike, q: PointLike) -> float:
    """Intrinsic distance between the base components of ``p`` and ``q``."""
    a, b = _base_of(sf, p), _base_of(sf, q)
    if sf.c == 0:
        return float(np.linalg.norm(a - b))
    R = sf.radius
    if sf.c > 0:
        # atan2 keeps full accuracy for nearly equal and nearly antipodal points
        return float(R * math.atan2(np.linalg.norm(np.cross(a, b)), float(np.dot(a, b))))
    chord2 = max(float(sf.inner(a - b, a - b)), 0.0)
    return float(2.0 * R * math.asinh(math.sqrt(chord2) / (2.0 * R)))


def left_normal(sf: SpaceForm, base, tangent) -> np.ndarray:
    """Unit normal obtained by rotating ``tangent`` a quarter turn inside M.

    Orientation: at the origin a tangent along +x yields +y, for all three
    models. Vectorised over leading axes.
    """
    base = np.asarray(base, dtype=float)
    tangent = np.asarray(tangent, dtype=float)
    if sf.c == 0:
        n = np.stack([-tangent[..., 1], tangent[..., 0]], axis=-1)
    else:
        n = np.cross(base / sf.radius, tangent)
        if sf.c < 0:
            n = n * sf.base_signature
    norm = np.sqrt(np.abs(sf.inner(n, n)))
    return n / norm[..., None]


def _samples(sf: SpaceForm, gamma: CurveSampler, s: float, h: float) -> np.ndarray:
    return np.array([_base_of(sf, gamma(s + k * h)) for k in (-2, -1, 0, 1, 2)])


def geodesic_curvature_fd(
    sf: SpaceForm, gamma: CurveSampler, s: float, h: float, conormal: int = 1
) -> float:
    """Single central-difference estimate of the geodesic curvature at ``gamma(s)``.

    The covariant acceleration is the flat second derivative with its
    component along the position normal of the embedded model removed; the
    result is projected on ``conormal * left_normal``.
    """
    pts = _samples(sf, gamma, s, h)
    x0 = pts[2]
    d1 = (pts[3] - pts[1]) / (2 * h)
    d2 = (pts[3] - 2 * x0 + pts[1]) / (h * h)
    if sf.c != 0:
        d2 = d2 - sf.inner(d2, x0) * sf.c * x0
    speed2 = float(sf.inner(d1, d1))
    if speed2 <= 0:
        raise AccuracyError("curve is not regular at the requested parameter")
    n = conormal * left_normal(sf, x0, d1)
    return float(sf.inner(d2, n)) / speed2


def curve_geodesic_curvature(
    sf: SpaceForm,
    gamma: CurveSampler,
    s: float,
    step: float = DEFAULT_FD_STEP,
    conormal: int = 1,
    rtol: float = 1e-4,
) -> float:
    """Geodesic curvature of a base curve, signed by ``conormal * left_normal``.

    Estimates at ``step`` and ``step/2`` are combined by Richardson
    extrapolation; if they disagree by more than ``rtol * (1 + |kappa|)``
    the step is deemed too coarse and :class:`AccuracyError` is raised.
    """
    if step <= 0:
        raise DomainError("step must be positive")
    if conormal not in (1, -1):
        raise InvalidInputError("conormal flag must be +1 or -1")
    k1 = geodesic_curvature_fd(sf, gamma, s, step, conormal)
    k2 = geodesic_curvature_fd(sf, gamma, s, step / 2, conormal)
    if abs(k1 - k2) > rtol * (1.0 + abs(k2)):
        raise AccuracyError(
            f"step {step:g} does not resolve the curvature: {k1!r} vs {k2!r}"
        )
    return (4.0 * k2 - k1) / 3.0


def orient_flag(sf: SpaceForm, gamma: CurveSampler, s: float, direction, h: float = 1e-5) -> int:
    """Return +1 or -1 so that ``flag * left_normal`` points along ``direction``."""
    pts = _samples(sf, gamma, s, h)
    n = left_normal(sf, pts[2], (pts[3] - pts[1]) / (2 * h))
    return 1 if float(sf.inner(n, np.asarray(direction, dtype=float))) >= 0 else -1
