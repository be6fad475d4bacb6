"""Finite-difference geometry of surfaces in M^2(c) x R.

Surfaces are vectorised maps ``(p, u) -> coords`` into the flat embedding of
:mod:`cmcgraphs.modelspace` (see :class:`cmcgraphs.profiles.Surface`).  All
derivatives use five-point stencils, i.e. the Richardson extrapolation of the
three-point stencils at steps ``h`` and ``2h``; the three-point mean
curvature is kept as a consistency check.

The unit normal ``N`` is oriented so that the mean curvature is positive, the
angle function is ``nu = <N, d/dt>`` and

    q = 4H^2 (H^2 - det A) + c^2/4 (1 - nu^2)^2
        - c (|grad nu|^2 - (2H^2 - det A)(1 - nu^2))

vanishes identically on rotational spheres.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AccuracyError, SingularParametrizationError
from .modelspace import DEFAULT_FD_STEP, SpaceForm

DEGENERATE_TOL = 1e-14
RICHARDSON_RTOL = 1e-3
# q involves second derivatives multiplied by O(H^3) factors; a coarser step
# keeps its roundoff below 1e-9 while truncation stays at the same level
Q_STEP = 2e-3
ORBIT_Q_STEPS = (1.6e-2, 8e-3, 4e-3, Q_STEP)
# fraction of the profile domain around a rotation axis handled in normal coordinates
AXIS_BAND = 0.1


@dataclass
class FormSample:
    """Pointwise geometric data; every field is an array over the sample points."""

    position: np.ndarray
    normal: np.ndarray
    first: tuple  # (E, F, G)
    second: tuple  # (e, f, g)
    mean_curvature: np.ndarray
    det_shape: np.ndarray
    nu: np.ndarray
    grad_nu_sq: np.ndarray
    q: np.ndarray


def _normal(sf: SpaceForm, X, Xp, Xu):
    """Unit normal of the surface inside M x R (unoriented)."""
    if sf.c == 0:
        n = np.cross(Xp, Xu)
        return n / np.linalg.norm(n, axis=-1)[..., None]
    sig = sf.signature
    pos = np.concatenate([X[..., :-1], np.zeros(X.shape[:-1] + (1,))], axis=-1)
    M = np.stack([Xp * sig, Xu * sig, pos * sig], axis=-2)
    cols = []
    for i in range(4):
        minor = np.delete(M, i, axis=-1)
        cols.append((-1) ** i * np.linalg.det(minor))
    n = np.stack(cols, axis=-1)
    norm2 = sf.ambient_inner(n, n)
    return n / np.sqrt(np.abs(norm2))[..., None]


class _Stencil:
    """Evaluates a surface once on all offsets needed around a set of points."""

    def __init__(self, surface, p, u, h, offsets):
        self.offsets = sorted(set(offsets))
        self.index = {o: k for k, o in enumerate(self.offsets)}
        di = np.array([o[0] for o in self.offsets], dtype=float)
        dj = np.array([o[1] for o in self.offsets], dtype=float)
        P = p[:, None] + h * di[None, :]
        U = u[:, None] + h * dj[None, :]
        self.values = np.asarray(surface(P, U), dtype=float)
        self.h = h

    def __getitem__(self, o):
        return self.values[:, self.index[o]]


def _first_derivs(S, i, j):
    h = S.h
    Xp = (S[(i - 2, j)] - 8 * S[(i - 1, j)] + 8 * S[(i + 1, j)] - S[(i + 2, j)]) / (12 * h)
    Xu = (S[(i, j - 2)] - 8 * S[(i, j - 1)] + 8 * S[(i, j + 1)] - S[(i, j + 2)]) / (12 * h)
    return Xp, Xu


def _first_offsets(i, j):
    return [(i + k, j) for k in (-2, -1, 1, 2)] + [(i, j + k) for k in (-2, -1, 1, 2)]


_NU_POINTS = [(k, 0) for k in (-2, -1, 1, 2)] + [(0, k) for k in (-2, -1, 1, 2)]


def _forms(sf, S, p_count):
    h = S.h
    X = S[(0, 0)]
    Xp, Xu = _first_derivs(S, 0, 0)
    Xpp = (-S[(2, 0)] + 16 * S[(1, 0)] - 30 * X + 16 * S[(-1, 0)] - S[(-2, 0)]) / (12 * h * h)
    Xuu = (-S[(0, 2)] + 16 * S[(0, 1)] - 30 * X + 16 * S[(0, -1)] - S[(0, -2)]) / (12 * h * h)

    def corner(k):
        return (S[(k, k)] - S[(k, -k)] - S[(-k, k)] + S[(-k, -k)]) / (4 * (k * h) ** 2)

    Xpu = (4 * corner(1) - corner(2)) / 3.0
    ip = sf.ambient_inner
    E, F, G = ip(Xp, Xp), ip(Xp, Xu), ip(Xu, Xu)
    W = E * G - F * F
    if np.any(W < DEGENERATE_TOL):
        raise SingularParametrizationError(f"EG - F^2 = {float(np.min(W)):.3e} below {DEGENERATE_TOL}")
    N = _normal(sf, X, Xp, Xu)
    e, f, g = ip(Xpp, N), ip(Xpu, N), ip(Xuu, N)
    Hm = (e * G - 2 * f * F + g * E) / (2 * W)

    # three-point estimate as a Richardson consistency check
    Xp3 = (S[(1, 0)] - S[(-1, 0)]) / (2 * h)
    Xu3 = (S[(0, 1)] - S[(0, -1)]) / (2 * h)
    Xpp3 = (S[(1, 0)] - 2 * X + S[(-1, 0)]) / (h * h)
    Xuu3 = (S[(0, 1)] - 2 * X + S[(0, -1)]) / (h * h)
    E3, F3, G3 = ip(Xp3, Xp3), ip(Xp3, Xu3), ip(Xu3, Xu3)
    H3 = (ip(Xpp3, N) * G3 - 2 * ip(corner(1), N) * F3 + ip(Xuu3, N) * E3) / (2 * (E3 * G3 - F3 * F3))
    gap = np.abs(np.abs(H3) - np.abs(Hm))
    if np.any(gap > RICHARDSON_RTOL * (1 + np.abs(Hm))):
        raise AccuracyError(f"finite-difference step {h:g} does not resolve the surface "
                            f"(three-point vs five-point mean curvature differ by {float(np.max(gap)):.3e})")

    sign = np.where(Hm < 0, -1.0, 1.0)
    N = N * sign[:, None]
    e, f, g, Hm = e * sign, f * sign, g * sign, Hm * sign
    K_ext = (e * g - f * f) / W
    return X, N, (E, F, G), (e, f, g), Hm, K_ext, W


def fundamental_forms_at(surface, p, u, step: float = DEFAULT_FD_STEP) -> FormSample:
    """Fundamental forms, mean curvature, angle function and q at ``(p, u)`` (vectorised)."""
    sf = surface.spaceform
    p = np.atleast_1d(np.asarray(p, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    p, u = np.broadcast_arrays(p, u)
    p, u = p.ravel(), u.ravel()
    offsets = [(0, 0)] + [(a, b) for a in (-2, -1, 1, 2) for b in (-2, -1, 0, 1, 2) if abs(a) == abs(b) or b == 0]
    offsets += [(0, b) for b in (-2, -1, 1, 2)]
    for q in _NU_POINTS:
        offsets += _first_offsets(*q)
    S = _Stencil(surface, p, u, step, offsets)
    X, N, first, second, Hm, detA, W = _forms(sf, S, len(p))
    E, F, G = first

    nus = {}
    for q in _NU_POINTS:
        Xp, Xu = _first_derivs(S, *q)
        Nq = _normal(sf, S[q], Xp, Xu)
        # keep the orientation continuous with the centre
        s = np.where(sf.ambient_inner(Nq, N) < 0, -1.0, 1.0)
        nus[q] = Nq[:, -1] * s
    nu_p = (nus[(-2, 0)] - 8 * nus[(-1, 0)] + 8 * nus[(1, 0)] - nus[(2, 0)]) / (12 * step)
    nu_u = (nus[(0, -2)] - 8 * nus[(0, -1)] + 8 * nus[(0, 1)] - nus[(0, 2)]) / (12 * step)
    grad2 = (nu_p ** 2 * G - 2 * nu_p * nu_u * F + nu_u ** 2 * E) / W
    nu = N[:, -1]
    c = sf.c
    one_m = 1 - nu * nu
    q = 4 * Hm ** 2 * (Hm ** 2 - detA) + 0.25 * c * c * one_m ** 2 - c * (grad2 - (2 * Hm ** 2 - detA) * one_m)
    return FormSample(X, N, first, second, Hm, detA, nu, grad2, q)


def _lattice(profile, grid: int, orbit_range=(0.0, 2 * math.pi)):
    lo, hi = profile.chart_domain
    th = lo + (np.arange(grid) + 0.5) * (hi - lo) / grid
    u = orbit_range[0] + (np.arange(grid) + 0.5) * (orbit_range[1] - orbit_range[0]) / grid
    T, U = np.meshgrid(th, u, indexing="ij")
    return T.ravel(), U.ravel()


def _orbit_range(profile):
    from .profiles import Family

    if profile.family.tag in (Family.HYP_CYLINDER, Family.HYP_GENERAL, Family.PARABOLIC,
                              Family.EUCL_CYLINDER):
        return (-1.0, 1.0)
    return (0.0, 2 * math.pi)


def profile_forms(profile, th, u, step: float = DEFAULT_FD_STEP) -> FormSample:
    """Forms at regular-chart points; points near a rotation axis use :func:`axis_chart`.

    Geodesic polar coordinates degenerate on the axis (G ~ r^2), which
    inflates the stencil error there.
    """
    th, u = np.broadcast_arrays(np.atleast_1d(np.asarray(th, float)), np.atleast_1d(np.asarray(u, float)))
    th, u = th.ravel(), u.ravel()
    sample = fundamental_forms_at(profile.surface(regular=True), th, u, step)
    if profile.axis_param is None:
        return sample
    a, b = profile.domain
    r = profile.chart(th) - profile.axis_param
    near = np.abs(r) < AXIS_BAND * (b - a)
    if np.any(near):
        ax = fundamental_forms_at(axis_chart(profile), r[near] * np.cos(u[near]), r[near] * np.sin(u[near]), step)
        for name in ("mean_curvature", "det_shape", "nu", "grad_nu_sq", "q"):
            getattr(sample, name)[near] = getattr(ax, name)
    return sample


def mean_curvature_residual(profile, grid: int = 64, step: float = DEFAULT_FD_STEP) -> float:
    """``max |H_fd - H|`` over a ``grid x grid`` interior lattice of the regular chart."""
    th, u = _lattice(profile, grid, _orbit_range(profile))
    sample = profile_forms(profile, th, u, step)
    return float(np.max(np.abs(sample.mean_curvature - profile.H)))


def q_variation(profile, param: float, orbits=8, step: Optional[float] = None) -> float:
    """Spread of q along the orbit through the profile point ``param``.

    The orbit maps are linear isometries of the flat embedding, so the
    truncation error of the stencils is itself constant along an orbit and
    only roundoff (which shrinks as the step grows) shows up in the spread.
    Without ``step`` the coarsest step of :data:`ORBIT_Q_STEPS` passing the
    three-point/five-point consistency check is used.
    """
    lo, hi = _orbit_range(profile)
    u = np.linspace(lo, hi, orbits, endpoint=False)
    th = np.full_like(u, profile.chart_inverse(param))
    surf = profile.surface(regular=True)
    steps = ORBIT_Q_STEPS if step is None else (step,)
    for k, h in enumerate(steps):
        try:
            q = fundamental_forms_at(surf, th, u, h).q
            break
        except AccuracyError:
            if k == len(steps) - 1:
                raise
    return float(np.max(q) - np.min(q))


def q_values(profile, grid: int = 16, step: float = Q_STEP) -> np.ndarray:
    th, u = _lattice(profile, grid, _orbit_range(profile))
    return profile_forms(profile, th, u, step).q


def angle_at_boundary(profile, end: str = "upper", step: float = DEFAULT_FD_STEP) -> float:
    """Angle function at a boundary component, from one-sided stencils in the regular chart."""
    lo, hi = profile.chart_domain
    th_b = hi if end == "upper" else lo
    inward = -1.0 if end == "upper" else 1.0
    surf = profile.surface(regular=True)
    sf = surf.spaceform
    k = np.arange(5, dtype=float)
    th = th_b + inward * step * k
    pts = np.asarray(surf(th, np.zeros(5)), dtype=float)
    # fourth-order one-sided derivative (sign follows the stencil direction)
    Xt = inward * (-25 * pts[0] + 48 * pts[1] - 36 * pts[2] + 16 * pts[3] - 3 * pts[4]) / (12 * step)
    upts = np.asarray(surf(np.full(4, th_b), step * np.array([-2.0, -1.0, 1.0, 2.0])), dtype=float)
    Xu = (upts[0] - 8 * upts[1] + 8 * upts[2] - upts[3]) / (12 * step)
    N = _normal(sf, pts[0][None], Xt[None], Xu[None])[0]
    ref = fundamental_forms_at(surf, th_b + inward * 0.05 * (hi - lo), 0.0, step).normal[0]
    if sf.ambient_inner(N, ref) < 0:
        N = -N
    return float(N[-1])


def angle_at_top(profile, step: float = DEFAULT_FD_STEP) -> float:
    """Angle function at the highest point of a bigraph."""
    if profile.axis_param is not None and profile.top_param == profile.axis_param:
        surf = axis_chart(profile)
        return float(fundamental_forms_at(surf, 0.0, 0.0, step).nu[0])
    th = profile.chart_inverse(profile.top_param)
    return float(fundamental_forms_at(profile.surface(regular=True), th, 0.0, step).nu[0])


def axis_chart(profile):
    """Normal-coordinate chart ``(a, b) -> polar(|(a, b)|, atan2(b, a))`` around the rotation axis."""
    from .profiles import Surface

    sf = profile.spaceform

    def fn(a, b):
        a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
        r = np.hypot(a, b)
        base = sf.polar(r, np.arctan2(b, a))
        return np.concatenate([base, np.asarray(profile.height_fn(r), float)[..., None]], axis=-1)

    return Surface(sf, fn)


def _metric_grid(surface, p, u, delta, step):
    """E, F, G on the 5x5 grid of spacing ``delta`` around ``(p, u)``."""
    ks = np.arange(-2, 3, dtype=float)
    P, U = np.meshgrid(p + delta * ks, u + delta * ks, indexing="ij")
    P, U = P.ravel(), U.ravel()
    offs = [(0, 0)] + _first_offsets(0, 0)
    S = _Stencil(surface, P, U, step, offs)
    Xp, Xu = _first_derivs(S, 0, 0)
    ip = surface.spaceform.ambient_inner
    return tuple(v.reshape(5, 5) for v in (ip(Xp, Xp), ip(Xp, Xu), ip(Xu, Xu)))


def brioschi_curvature(surface, p: float, u: float, delta: float = 1e-2,
                       step: float = DEFAULT_FD_STEP) -> float:
    """Intrinsic Gaussian curvature from the first fundamental form alone."""
    E, F, G = _metric_grid(surface, p, u, delta, step)

    def dp(A):
        return (A[0, 2] - 8 * A[1, 2] + 8 * A[3, 2] - A[4, 2]) / (12 * delta)

    def du(A):
        return (A[2, 0] - 8 * A[2, 1] + 8 * A[2, 3] - A[2, 4]) / (12 * delta)

    def dpp(A):
        return (-A[0, 2] + 16 * A[1, 2] - 30 * A[2, 2] + 16 * A[3, 2] - A[4, 2]) / (12 * delta ** 2)

    def duu(A):
        return (-A[2, 0] + 16 * A[2, 1] - 30 * A[2, 2] + 16 * A[2, 3] - A[2, 4]) / (12 * delta ** 2)

    def dpu(A):
        c1 = (A[3, 3] - A[3, 1] - A[1, 3] + A[1, 1]) / (4 * delta ** 2)
        c2 = (A[4, 4] - A[4, 0] - A[0, 4] + A[0, 0]) / (16 * delta ** 2)
        return (4 * c1 - c2) / 3.0

    e0, f0, g0 = E[2, 2], F[2, 2], G[2, 2]
    m1 = np.array([
        [-0.5 * duu(E) + dpu(F) - 0.5 * dpp(G), 0.5 * dp(E), dp(F) - 0.5 * du(E)],
        [du(F) - 0.5 * dp(G), e0, f0],
        [0.5 * du(G), f0, g0],
    ])
    m2 = np.array([
        [0.0, 0.5 * du(E), 0.5 * dp(G)],
        [0.5 * du(E), e0, f0],
        [0.5 * dp(G), f0, g0],
    ])
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / (e0 * g0 - f0 * f0) ** 2)


def gauss_equation_gap(surface, p: float, u: float, step: float = DEFAULT_FD_STEP) -> float:
    """``|K_int - (det A + c nu_perp^2)|`` where the extrinsic side uses the Gauss equation.

    For M^2(c) x R the sectional curvature of a tangent plane with unit
    normal N is ``c <N, d/dt>^2``, so ``K = det A + c nu^2``.
    """
    sample = fundamental_forms_at(surface, p, u, step)
    K_ext = float(sample.det_shape[0] + surface.spaceform.c * sample.nu[0] ** 2)
    return abs(brioschi_curvature(surface, p, u, step=step) - K_ext)


def _chart_speed(surf, th, h=1e-4):
    th = np.asarray(th, dtype=float)
    d = (np.asarray(surf(th + h, 0 * th)) - np.asarray(surf(th - h, 0 * th))) / (2 * h)
    d2 = (np.asarray(surf(th + 2 * h, 0 * th)) - np.asarray(surf(th - 2 * h, 0 * th))) / (4 * h)
    d = (4 * d - d2) / 3.0
    return d, np.sqrt(np.abs(surf.spaceform.ambient_inner(d, d)))


def profile_arclength(profile, lo: Optional[float] = None, hi: Optional[float] = None, n: int = 64) -> float:
    """Length in M x R of the generating curve between two regular-chart parameters."""
    clo, chi = profile.chart_domain
    lo = clo if lo is None else lo
    hi = chi if hi is None else hi
    x, w = np.polynomial.legendre.leggauss(n)
    th = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    _, speed = _chart_speed(profile.surface(regular=True), th)
    return float(0.5 * (hi - lo) * np.dot(w, speed))


def meridian_length(profile, n: int = 64) -> float:
    """Length of the meridian from the highest point down to the (upper) boundary."""
    return profile_arclength(profile, profile.chart_inverse(profile.top_param), None, n)


def profile_slope(profile, theta) -> np.ndarray:
    """``dh/ds`` along the generating curve, ``s`` the arclength in M x R."""
    d, speed = _chart_speed(profile.surface(regular=True), theta)
    return d[..., -1] / speed
