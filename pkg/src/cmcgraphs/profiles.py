"""Generating curves of the invariant CMC surfaces of M^2(c) x R.

Families
--------
=================  =========  ===========================================
tag                base       construction
=================  =========  ===========================================
RotSphereH2xR      H^2        Hsiang sphere, closed form in the radius r
RotSphereS2xR      S^2        rotational sphere, c0 = -1, height by quadrature
RotTorusS2xR       S^2        rotational torus, c0 = 0, closed form
RotGeneralS2xR     S^2        rotational, arbitrary c0 (aux), quadrature
HypCylinderH2xR    H^2        hyperbolic-translation cylinder, E = 0
HypGeneralH2xR     H^2        hyperbolic-translation surface, energy E (aux)
ParabolicH2xR      H^2        parabolic-translation surface
EuclSphere         R^2        round sphere of radius 1/H
EuclCylinder       R^2        horizontal cylinder of radius 1/(2H)
=================  =========  ===========================================

Rotational profiles use the signed geodesic radius ``r`` as parameter.  The
translation-invariant families in H^2 x R are described in the upper
half-plane and mapped to the hyperboloid when sampled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from . import estimates
from .errors import DomainError, InvalidInputError, NoSolutionError
from .estimates import EstimateParams
from .modelspace import AmbientPoint, SpaceForm
from .numerics import OdeSystem, bisect_root, golden_section_max, quad_singular

HEIGHT_QUAD_TOL = 1e-13
ROOT_XTOL = 1e-12


class Family(str, Enum):
    ROT_SPHERE_H2 = "RotSphereH2xR"
    ROT_SPHERE_S2 = "RotSphereS2xR"
    ROT_TORUS_S2 = "RotTorusS2xR"
    ROT_GENERAL_S2 = "RotGeneralS2xR"
    HYP_CYLINDER = "HypCylinderH2xR"
    HYP_GENERAL = "HypGeneralH2xR"
    PARABOLIC = "ParabolicH2xR"
    EUCL_SPHERE = "EuclSphere"
    EUCL_CYLINDER = "EuclCylinder"

    @property
    def curvature(self) -> float:
        if self in _H2_FAMILIES:
            return -1.0
        if self in (Family.ROT_SPHERE_S2, Family.ROT_TORUS_S2, Family.ROT_GENERAL_S2):
            return 1.0
        return 0.0


_H2_FAMILIES = frozenset(
    {Family.ROT_SPHERE_H2, Family.HYP_CYLINDER, Family.HYP_GENERAL, Family.PARABOLIC}
)
SPHERES = frozenset({Family.ROT_SPHERE_H2, Family.ROT_SPHERE_S2, Family.EUCL_SPHERE})
HALF_HEIGHT = frozenset({Family.ROT_TORUS_S2, Family.HYP_CYLINDER, Family.EUCL_CYLINDER})


@dataclass(frozen=True)
class ProfileFamily:
    tag: Family
    H: float
    aux: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tag", Family(self.tag))
        if not (math.isfinite(self.H) and math.isfinite(self.aux)):
            raise InvalidInputError("H and aux must be finite")
        if self.H <= 0:
            raise InvalidInputError(f"mean curvature must be positive, got H={self.H}")
        if self.tag in _H2_FAMILIES and self.H <= 0.5:
            raise InvalidInputError(f"families in H^2 x R need H > 1/2, got H={self.H}")

    @property
    def c(self) -> float:
        return self.tag.curvature

    @property
    def spaceform(self) -> SpaceForm:
        return SpaceForm(self.c)


@dataclass(frozen=True)
class ProfileCurve:
    """Generating curve of an invariant surface.

    ``height_fn`` and ``base_fn`` are vectorised over the profile parameter.
    ``orbit_fn(param, orbit)`` returns base points of M (embedding
    coordinates) and ``arclength_fn`` the intrinsic base coordinate used for
    plotting (signed geodesic radius, signed distance to the axis geodesic,
    or distance along a vertical geodesic).

    ``sqrt_ends`` flags endpoints where the tangent turns vertical and the
    height behaves like a square root of the parameter; :meth:`chart` then
    provides a parameter in which the curve is smooth up to the boundary.
    """

    family: ProfileFamily
    domain: Tuple[float, float]
    height_fn: Callable
    base_fn: Callable
    is_bigraph: bool
    orbit_fn: Callable
    arclength_fn: Callable
    boundary_params: Tuple[float, ...] = ()
    top_param: Optional[float] = None
    axis_param: Optional[float] = None
    sqrt_ends: Tuple[bool, bool] = (False, False)
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def spaceform(self) -> SpaceForm:
        return self.family.spaceform

    @property
    def H(self) -> float:
        return self.family.H

    def check_param(self, param):
        a, b = self.domain
        arr = np.asarray(param, dtype=float)
        slack = 1e-12 * max(1.0, abs(a), abs(b))
        if np.any(arr < a - slack) or np.any(arr > b + slack):
            raise DomainError(f"parameter outside the profile domain [{a!r}, {b!r}]")
        return np.clip(arr, a, b)

    # -- regular chart -----------------------------------------------------
    @property
    def chart_domain(self) -> Tuple[float, float]:
        lo_sqrt, hi_sqrt = self.sqrt_ends
        if lo_sqrt and hi_sqrt:
            return (-0.5 * math.pi, 0.5 * math.pi)
        if lo_sqrt or hi_sqrt:
            return (0.0, 0.5 * math.pi)
        return self.domain

    def chart(self, theta):
        """Profile parameter as a function of the regular chart parameter."""
        a, b = self.domain
        theta = np.asarray(theta, dtype=float)
        lo_sqrt, hi_sqrt = self.sqrt_ends
        if lo_sqrt and hi_sqrt:
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            return mid + half * np.sin(theta)
        if hi_sqrt:
            return a + (b - a) * np.sin(theta)
        if lo_sqrt:
            return b - (b - a) * np.sin(theta)
        return theta

    def chart_inverse(self, param) -> float:
        a, b = self.domain
        lo_sqrt, hi_sqrt = self.sqrt_ends
        if lo_sqrt and hi_sqrt:
            x = (param - 0.5 * (a + b)) / (0.5 * (b - a))
        elif hi_sqrt:
            x = (param - a) / (b - a)
        elif lo_sqrt:
            x = (b - param) / (b - a)
        else:
            return float(param)
        return float(np.arcsin(np.clip(x, -1.0, 1.0)))

    # -- sampling ----------------------------------------------------------
    def points(self, param, orbit) -> np.ndarray:
        """Vectorised ambient coordinates ``(base..., height)``."""
        param = np.asarray(param, dtype=float)
        orbit = np.asarray(orbit, dtype=float)
        param, orbit = np.broadcast_arrays(param, orbit)
        base = self.orbit_fn(param, orbit)
        h = np.asarray(self.height_fn(param), dtype=float)
        return np.concatenate([base, h[..., None]], axis=-1)

    def surface(self, regular: bool = False) -> "Surface":
        if regular:
            return Surface(self.spaceform, lambda th, u: self.points(self.chart(th), u))
        return Surface(self.spaceform, self.points)


@dataclass(frozen=True)
class Surface:
    """A two-parameter map into M^2(c) x R, vectorised over its arguments."""

    spaceform: SpaceForm
    fn: Callable

    def __call__(self, p, u) -> np.ndarray:
        return self.fn(p, u)

    @classmethod
    def from_pointwise(cls, spaceform: SpaceForm, fn: Callable) -> "Surface":
        """Wrap a scalar ``(p, u) -> AmbientPoint`` map."""

        def vec(p, u):
            p, u = np.broadcast_arrays(np.asarray(p, float), np.asarray(u, float))
            out = [np.asarray(getattr(x, "coords", x), float) for x in map(fn, p.ravel(), u.ravel())]
            return np.array(out).reshape(p.shape + (-1,))

        return cls(spaceform, vec)


class _Cached:
    """Vectorised memoisation of an expensive scalar function of the profile parameter."""

    def __init__(self, fn):
        self.fn = fn
        self.cache = {}

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        flat = arr.ravel()
        out = np.empty(flat.shape)
        for i, v in enumerate(flat):
            key = float(v)
            val = self.cache.get(key)
            if val is None:
                val = self.cache[key] = float(self.fn(key))
            out[i] = val
        return out.reshape(arr.shape) if arr.ndim else float(out[0])


# ---------------------------------------------------------------------------
# rotational surfaces in S^2 x R: sigma(r) = arccos(w(r)), w = 2H(c0 + cos r)/sin r
# ---------------------------------------------------------------------------


def _w(H: float, c0: float, s):
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        # (c0 + cos s)/sin s = (c0 + 1)/sin s - tan(s/2); the first term vanishes for spheres
        first = 0.0 if c0 == -1.0 else (c0 + 1.0) / np.sin(s)
        return 2.0 * H * (first - np.tan(0.5 * s))


def _w_increment(H: float, c0: float, e: float, delta):
    """``w(e + delta) - w(e)`` without cancellation for small ``delta``."""
    delta = np.asarray(delta, dtype=float)
    num = 2.0 * c0 * np.cos(e + 0.5 * delta) * np.sin(0.5 * delta) + np.sin(delta)
    return -2.0 * H * num / (np.sin(e + delta) * math.sin(e))


def admissible_interval(H: float, c0: float, seed: Optional[float] = None, samples: int = 20001):
    """Maximal interval in [-pi, pi] on which ``|w| <= 1``, endpoints by bisection.

    Without ``seed`` the longest interval is returned, preferring r > 0 on ties.
    """
    s = np.linspace(-math.pi, math.pi, samples)[1:-1]
    with np.errstate(invalid="ignore"):
        inside = np.abs(_w(H, c0, s)) < 1.0
    inside &= np.isfinite(_w(H, c0, s))
    if not np.any(inside):
        raise NoSolutionError(f"no interval with |2H(c0 + cos r)/sin r| <= 1 for H={H}, c0={c0}")
    edges = np.flatnonzero(np.diff(inside.astype(int)))
    starts = [0] if inside[0] else []
    starts += [i + 1 for i in edges if not inside[i]]
    ends = [i for i in edges if inside[i]] + ([len(s) - 1] if inside[-1] else [])
    runs = list(zip(starts, ends))
    if seed is not None:
        runs = [r for r in runs if s[r[0]] <= seed <= s[r[1]]]
        if not runs:
            raise NoSolutionError(f"seed {seed} not inside an admissible interval")
    run = max(runs, key=lambda r: (r[1] - r[0], s[r[0]] > 0))
    phi = lambda x: 1.0 - abs(float(_w(H, c0, x)))
    i0, i1 = run
    a = s[i0] if i0 == 0 else bisect_root(phi, s[i0 - 1], s[i0], ROOT_XTOL)
    b = s[i1] if i1 == len(s) - 1 else bisect_root(phi, s[i1], s[i1 + 1], ROOT_XTOL)
    return a, b


def _eq4_integrand(H, c0, a, b, lo, hi):
    """``w / sqrt(1 - w^2)`` on ``[lo, hi]`` inside the admissible interval ``[a, b]``."""
    wa, wb = float(np.sign(_w(H, c0, a))), float(np.sign(_w(H, c0, b)))
    near_band = 0.25 * (b - a)

    def f(s, da, db):
        to_a = (lo - a) + da
        to_b = (b - hi) + db
        w = _w(H, c0, s)
        one_minus = (1.0 - w) * (1.0 + w)
        use_a = (to_a <= to_b) & (to_a < near_band)
        use_b = (to_b < to_a) & (to_b < near_band)
        if np.any(use_a):
            dw = _w_increment(H, c0, a, to_a[use_a])
            w[use_a] = wa + dw
            one_minus[use_a] = -dw * (2 * wa + dw)
        if np.any(use_b):
            dw = _w_increment(H, c0, b, -to_b[use_b])
            w[use_b] = wb + dw
            one_minus[use_b] = -dw * (2 * wb + dw)
        return w / np.sqrt(one_minus)

    return f


def eq4_height(H: float, c0: float, a: float, b: float, lo: float, hi: float, tol=HEIGHT_QUAD_TOL):
    """``int_lo^hi w/sqrt(1 - w^2) ds`` for ``a <= lo <= hi <= b``."""
    if hi <= lo:
        return 0.0
    return quad_singular(_eq4_integrand(H, c0, a, b, lo, hi), lo, hi, tol=tol, with_distances=True)


def _rotational(family, domain, height_fn, **kw) -> ProfileCurve:
    sf = family.spaceform
    return ProfileCurve(
        family=family,
        domain=domain,
        height_fn=height_fn,
        base_fn=lambda r: np.asarray(r, dtype=float),
        orbit_fn=sf.polar,
        arclength_fn=lambda r: np.asarray(r, dtype=float),
        **kw,
    )


def _s2_quadrature_profile(family: ProfileFamily, c0: float, bigraph: bool) -> ProfileCurve:
    H = family.H
    seed = 0.0 if c0 == -1.0 else None
    a, b = admissible_interval(H, c0, seed=seed)
    if c0 == -1.0:
        # w is odd in r here; symmetric ends keep h(r) = h(-r) exact
        b = 0.5 * (b - a)
        a = -b
    top = None
    if abs(c0) <= 1.0:
        for cand in (math.acos(-c0), -math.acos(-c0)):
            if a <= cand <= b:
                top = cand
                break

    if bigraph:
        # symmetric profile: integrate from the nearer boundary so that h(a) = h(b) = 0 exactly
        def height(r):
            if r <= top:
                return eq4_height(H, c0, a, b, a, r)
            return -eq4_height(H, c0, a, b, r, b)
    else:

        def height(r):
            return eq4_height(H, c0, a, b, a, r)

    return _rotational(
        family,
        (a, b),
        _Cached(height),
        is_bigraph=bigraph,
        boundary_params=(a, b) if bigraph else (),
        top_param=top,
        axis_param=0.0 if a < 0 < b else None,
        sqrt_ends=(True, True),
        meta={"c0": c0},
    )


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def _hsiang(family):
    H = family.H
    om = math.sqrt(4 * H * H - 1)
    b = 2 * math.asinh(1 / om)

    def height(r):
        r = np.asarray(r, dtype=float)
        # 1 - om^2 sinh^2(r/2) = om^2 sinh((b + r)/2) sinh((b - r)/2), exact zero at r = b
        inner = om * om * np.sinh(0.5 * (b + r)) * np.sinh(0.5 * (b - r)) / (4 * H * H)
        return 4 * H / om * np.arcsin(np.sqrt(np.clip(inner, 0.0, 1.0)))

    return _rotational(
        family, (0.0, b), height, is_bigraph=True, boundary_params=(b,),
        top_param=0.0, axis_param=0.0, sqrt_ends=(False, True),
    )


def _torus(family):
    H = family.H
    k = math.sqrt(1 + 4 * H * H)
    d = math.atan(1 / (2 * H))

    def height(r):
        r = np.asarray(r, dtype=float)
        return 2 * H / k * np.arccosh(np.maximum(k / (2 * H) * np.sin(r), 1.0))

    a, b = 0.5 * math.pi - d, 0.5 * math.pi + d
    return _rotational(
        family, (a, b), height, is_bigraph=True, boundary_params=(a, b),
        top_param=0.5 * math.pi, sqrt_ends=(True, True), meta={"c0": 0.0},
    )


def _halfplane_orbits(sf: SpaceForm, x_fn, y_fn, kind: str):
    """Orbit maps of the hyperbolic (x e^u, e^u) or parabolic (x + u, y) translation groups."""
    if kind == "hyperbolic":
        return lambda p, u: sf.from_halfplane(x_fn(p) * np.exp(u), np.exp(u) * np.ones_like(p))
    return lambda p, u: sf.from_halfplane(u + 0.0 * p, y_fn(p))


def _hyp_cylinder(family):
    H = family.H
    om = math.sqrt(4 * H * H - 1)
    sf = family.spaceform

    def x_of(r):
        return np.sin(r) / om

    def height(r):
        r = np.asarray(r, dtype=float)
        return 2 * H / om * np.arctan(np.cos(r) / np.sqrt(om * om + np.sin(r) ** 2))

    return ProfileCurve(
        family=family,
        domain=(-0.5 * math.pi, 0.5 * math.pi),
        height_fn=height,
        base_fn=x_of,
        is_bigraph=True,
        orbit_fn=_halfplane_orbits(sf, x_of, None, "hyperbolic"),
        arclength_fn=lambda r: np.arcsinh(x_of(np.asarray(r, float))),
        boundary_params=(-0.5 * math.pi, 0.5 * math.pi),
        top_param=0.0,
    )


def hyperbolic_x(H: float, E: float, t):
    """x(t) of a hyperbolic-translation profile with energy E, phase chosen so x'(0) > 0."""
    om2 = 4 * H * H - 1
    return -2 * H * E / om2 + math.sqrt(om2 + E * E) / om2 * np.sin(np.asarray(t, float) * math.sqrt(om2))


def hyperbolic_cos_alpha(H: float, E: float, x):
    """cos(alpha) solved from the energy ``E = -2Hx - sqrt(1 + x^2) cos(alpha)``."""
    x = np.asarray(x, dtype=float)
    # |cos alpha| = 1 at the turning points of x; clip the roundoff there
    return np.clip(-(E + 2 * H * x) / np.sqrt(1 + x * x), -1.0, 1.0)


def _hyp_general(family):
    H, E = family.H, family.aux
    om = math.sqrt(4 * H * H - 1)
    T = 0.5 * math.pi / om
    sf = family.spaceform
    x_of = lambda t: hyperbolic_x(H, E, t)

    def height(t):
        f = lambda s: hyperbolic_cos_alpha(H, E, x_of(s))
        return quad_singular(f, -T, t, tol=HEIGHT_QUAD_TOL)

    bigraph = E == 0.0
    return ProfileCurve(
        family=family,
        domain=(-T, T),
        height_fn=_Cached(height),
        base_fn=x_of,
        is_bigraph=bigraph,
        orbit_fn=_halfplane_orbits(sf, x_of, None, "hyperbolic"),
        arclength_fn=lambda t: np.arcsinh(x_of(np.asarray(t, float))),
        boundary_params=(-T, T) if bigraph else (),
        top_param=0.0 if bigraph else None,
        meta={"E": E},
    )


def parabolic_alpha(H: float, t):
    """Continuous branch of ``2 atan((2H+1)/sqrt(4H^2-1) tan(t sqrt(4H^2-1)/2))``."""
    om = math.sqrt(4 * H * H - 1)
    K = (2 * H + 1) / om
    phi = np.asarray(t, dtype=float) * om
    return phi + 2 * np.arctan((K - 1) * np.sin(phi) / ((K + 1) + (1 - K) * np.cos(phi)))


def parabolic_closed_form(H: float, t):
    """(y, h, alpha) solving y' = y sin(alpha), h' = cos(alpha), alpha' = -2H - cos(alpha).

    alpha(0) = 0, y(0) = 1/(2H - 1), h(0) = 0.
    """
    om = math.sqrt(4 * H * H - 1)
    t = np.asarray(t, dtype=float)
    ap = parabolic_alpha(H, t)
    y = 1.0 / (2 * H - np.cos(om * t))
    h = ap - 2 * H * t
    return y, h, -ap


def _parabolic(family):
    H = family.H
    om = math.sqrt(4 * H * H - 1)
    sf = family.spaceform
    T = 2 * math.pi / om
    y_of = lambda t: parabolic_closed_form(H, t)[0]
    return ProfileCurve(
        family=family,
        domain=(-T, T),
        height_fn=lambda t: parabolic_closed_form(H, t)[1],
        base_fn=y_of,
        is_bigraph=False,
        orbit_fn=_halfplane_orbits(sf, None, y_of, "parabolic"),
        arclength_fn=lambda t: np.log(y_of(np.asarray(t, float))),
        meta={"c0": 0.0, "c1": 1.0, "c2": 0.0},
    )


def _eucl_sphere(family):
    R = 1.0 / family.H

    def height(r):
        r = np.asarray(r, dtype=float)
        return np.sqrt(np.maximum((R - r) * (R + r), 0.0))

    return _rotational(
        family, (0.0, R), height, is_bigraph=True, boundary_params=(R,),
        top_param=0.0, axis_param=0.0, sqrt_ends=(False, True),
    )


def _eucl_cylinder(family):
    R = 0.5 / family.H

    def height(x):
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.maximum((R - x) * (R + x), 0.0))

    def orbit(x, u):
        return np.stack(np.broadcast_arrays(np.asarray(x, float), np.asarray(u, float)), axis=-1)

    return ProfileCurve(
        family=family,
        domain=(-R, R),
        height_fn=height,
        base_fn=lambda x: np.asarray(x, dtype=float),
        is_bigraph=True,
        orbit_fn=orbit,
        arclength_fn=lambda x: np.asarray(x, dtype=float),
        boundary_params=(-R, R),
        top_param=0.0,
        sqrt_ends=(True, True),
    )


def make_profile(family: ProfileFamily) -> ProfileCurve:
    """Generating curve of the requested invariant family."""
    tag = family.tag
    if tag is Family.ROT_SPHERE_H2:
        return _hsiang(family)
    if tag is Family.ROT_SPHERE_S2:
        return _s2_quadrature_profile(family, -1.0, bigraph=True)
    if tag is Family.ROT_TORUS_S2:
        return _torus(family)
    if tag is Family.ROT_GENERAL_S2:
        return _s2_quadrature_profile(family, family.aux, bigraph=False)
    if tag is Family.HYP_CYLINDER:
        return _hyp_cylinder(family)
    if tag is Family.HYP_GENERAL:
        return _hyp_general(family)
    if tag is Family.PARABOLIC:
        return _parabolic(family)
    if tag is Family.EUCL_SPHERE:
        return _eucl_sphere(family)
    if tag is Family.EUCL_CYLINDER:
        return _eucl_cylinder(family)
    raise InvalidInputError(f"unknown family {tag!r}")


def profile(tag, H: float, aux: float = 0.0) -> ProfileCurve:
    """Shorthand for ``make_profile(ProfileFamily(tag, H, aux))``."""
    return make_profile(ProfileFamily(Family(tag), H, aux))


def sample_surface(p: ProfileCurve, param: float, orbit: float) -> AmbientPoint:
    """Point of the invariant surface: the orbit isometry applied to the profile point."""
    param = float(p.check_param(param))
    coords = p.points(param, float(orbit))
    return AmbientPoint(tuple(coords), p.spaceform)


# ---------------------------------------------------------------------------
# heights and boundary curvature
# ---------------------------------------------------------------------------


def _require_bigraph(p: ProfileCurve):
    if not p.is_bigraph:
        raise InvalidInputError(f"{p.family.tag.value} is not a bigraph")


def max_height(p: ProfileCurve) -> float:
    """Closed-form maximum height: alpha(c, H, 0) for spheres, half of it otherwise."""
    _require_bigraph(p)
    a = estimates.alpha_max(EstimateParams(p.family.c, p.H, 0.0))
    if p.family.tag in SPHERES:
        return a
    return 0.5 * a


def numerical_max_height(p: ProfileCurve, tol: float = 1e-10):
    """Maximum of ``height_fn`` located by golden-section search; returns (param, height)."""
    a, b = p.domain
    if p.top_param is not None:
        width = 0.25 * (b - a)
        lo, hi = max(a, p.top_param - width), min(b, p.top_param + width)
    else:
        lo, hi = a, b
    return golden_section_max(lambda x: float(p.height_fn(x)), lo, hi, tol=tol)


def boundary_kappa(p: ProfileCurve) -> float:
    """Closed-form geodesic curvature of the boundary w.r.t. the outer conormal."""
    _require_bigraph(p)
    H, c = p.H, p.family.c
    tag = p.family.tag
    if tag in SPHERES:
        return estimates.kappa_lower_general(EstimateParams(c, H, 0.0))
    if tag in HALF_HEIGHT or tag is Family.HYP_GENERAL:
        return estimates.kappa_lower_height(EstimateParams(c, H, 0.0, 0.5))
    raise InvalidInputError(f"no boundary curvature for {tag.value}")


def boundary_kappa_numeric(p: ProfileCurve, param: float, step: float = 1e-3) -> float:
    """Boundary curvature measured by finite differences on the orbit curve at ``param``."""
    from .modelspace import curve_geodesic_curvature, orient_flag

    _require_bigraph(p)
    sf = p.spaceform
    a, b = p.domain
    out_sign = 1.0 if abs(param - b) <= abs(param - a) else -1.0
    gamma = lambda u: p.orbit_fn(np.float64(param), np.float64(u))
    # one-sided secant: the base speed may vanish at the boundary parameter
    inner_param = param - out_sign * 1e-4 * (b - a)
    outward = p.orbit_fn(np.float64(param), np.float64(0.0)) - p.orbit_fn(
        np.float64(inner_param), np.float64(0.0))
    flag = orient_flag(sf, gamma, 0.0, outward)
    return curve_geodesic_curvature(sf, gamma, 0.0, step=step, conormal=flag)


def torus_height_argmax(tol: float = 1e-8, bracket=(0.05, 2.0)):
    """Mean curvature maximising the torus height in S^2 x R, and that height."""
    f = lambda H: max_height(profile(Family.ROT_TORUS_S2, H))
    return golden_section_max(f, bracket[0], bracket[1], tol=tol)


def parabolic_critical_times(H: float, k: int = 0):
    """Consecutive zeros t_k, t_{k+1} of y' (where sin(t sqrt(4H^2-1)) = 0)."""
    om = math.sqrt(4 * H * H - 1)
    return k * math.pi / om, (k + 1) * math.pi / om


def parabolic_obstruction(H: float, k: int = 0) -> float:
    """``|h(t_{k+1}) - h(t_k)|`` between consecutive vertical-tangent points of the parabolic profile."""
    if not H > 0.5:
        raise InvalidInputError("parabolic profiles need H > 1/2")
    t0, t1 = parabolic_critical_times(H, k)
    _, h0, _ = parabolic_closed_form(H, t0)
    _, h1, _ = parabolic_closed_form(H, t1)
    return float(abs(h1 - h0))


# ---------------------------------------------------------------------------
# ODE systems
# ---------------------------------------------------------------------------


def rotational_s2_system(H: float) -> OdeSystem:
    """State (h, sigma) in the radius r: h' = cot sigma, sigma' = (2H + cot r cos sigma)/sin sigma."""

    def rhs(r, y):
        h, sig = y
        return np.array([math.cos(sig) / math.sin(sig),
                         (2 * H + math.cos(r) / math.sin(r) * math.cos(sig)) / math.sin(sig)])

    return OdeSystem(2, rhs)


def hyperbolic_energy(H: float, state) -> float:
    x, _, alpha = state
    return -2 * H * x - math.sqrt(1 + x * x) * math.cos(alpha)


def hyperbolic_system(H: float) -> OdeSystem:
    """State (x, h, alpha) for surfaces invariant under hyperbolic translations."""

    def rhs(t, y):
        x, _, alpha = y
        s = math.sqrt(1 + x * x)
        return np.array([s * math.sin(alpha), math.cos(alpha), 2 * H + x * math.cos(alpha) / s])

    return OdeSystem(3, rhs, lambda y: hyperbolic_energy(H, y))


def parabolic_system(H: float) -> OdeSystem:
    """State (y, h, alpha) for surfaces invariant under parabolic translations."""

    def rhs(t, s):
        y, _, alpha = s
        return np.array([y * math.sin(alpha), math.cos(alpha), -2 * H - math.cos(alpha)])

    return OdeSystem(3, rhs)
