"""Closed-form height, boundary-curvature, angle and distance estimates.

All evaluators take an :class:`EstimateParams` with arbitrary base curvature
``c`` subject to ``4H^2 + c > 0``.  The three-branch formulas (``c < 0``,
``c = 0``, ``c > 0``) are written around one primitive, the antiderivative

    g(t) = int_0^t 4H / (4H^2 + c (1 - s^2)) ds,

so that the maximum height is exactly ``g(1) + g(nu0)`` and the angle bound
``zeta`` is the square of ``g`` inverted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InvalidInputError
from .numerics import quad_singular

QUAD_TOL = 1e-11


@dataclass(frozen=True)
class EstimateParams:
    """Base curvature ``c``, mean curvature ``H``, boundary angle ``nu0`` and height fraction ``m``."""

    c: float
    H: float
    nu0: float = 0.0
    m: Optional[float] = None

    def __post_init__(self):
        for name in ("c", "H", "nu0"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} must be finite")
        if self.H <= 0:
            raise InvalidInputError(f"mean curvature must be positive, got H={self.H}")
        if 4 * self.H ** 2 + self.c <= 0:
            raise InvalidInputError(
                f"need 4H^2 + c > 0, got 4*{self.H}^2 + {self.c} = {4 * self.H ** 2 + self.c}"
            )
        if not -1.0 < self.nu0 <= 0.0:
            raise InvalidInputError(f"boundary angle must satisfy -1 < nu0 <= 0, got {self.nu0}")
        if self.m is not None and not 0.0 < self.m <= 0.5:
            raise InvalidInputError(f"height fraction must satisfy 0 < m <= 1/2, got {self.m}")


def _g_constants(p: EstimateParams):
    """Prefactor and inner slope of g: g(t) = pref * F(slope * t), F in {atan, atanh, id}."""
    c, H = p.c, p.H
    if c == 0:
        return 1.0 / H, 1.0
    s = 4 * H * H + c
    return 4 * H / math.sqrt(abs(c) * s), math.sqrt(abs(c)) / math.sqrt(s)


def g_value(p: EstimateParams, t):
    """Odd, strictly increasing antiderivative of ``4H / (4H^2 + c(1 - t^2))`` with g(0) = 0."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1):
        raise DomainError("g is defined on [-1, 1]")
    pref, k = _g_constants(p)
    if p.c > 0:
        out = pref * np.arctanh(t_arr * k)
    elif p.c < 0:
        out = pref * np.arctan(t_arr * k)
    else:
        out = t_arr * pref
    return float(out) if np.ndim(out) == 0 else out


def g_derivative(p: EstimateParams, t):
    t = np.asarray(t, dtype=float)
    return 4 * p.H / (4 * p.H ** 2 + p.c * (1 - t * t))


def g_inverse(p: EstimateParams, y):
    """Inverse of :func:`g_value` on ``[g(-1), g(1)]``."""
    y = np.asarray(y, dtype=float)
    pref, k = _g_constants(p)
    if p.c > 0:
        out = np.tanh(y / pref) / k
    elif p.c < 0:
        out = np.tan(y / pref) / k
    else:
        out = y / pref
    return float(out) if np.ndim(out) == 0 else out


def alpha_max(p: EstimateParams) -> float:
    """Largest height an H-graph with boundary angle ``nu0`` can reach.

    c < 0:  4H/sqrt(-c(4H^2+c)) (atan(sqrt(-c)/sqrt(4H^2+c)) + atan(nu0 sqrt(-c)/sqrt(4H^2+c)))
    c = 0:  (1 + nu0)/H
    c > 0:  the same with atanh and sqrt(c(4H^2+c)).
    """
    c, H, nu0 = p.c, p.H, p.nu0
    if c == 0:
        return 1.0 * (1.0 / H) + nu0 * (1.0 / H)
    pref, k = _g_constants(p)
    f = np.arctanh if c > 0 else np.arctan
    return float(pref * f(1.0 * k) + pref * f(nu0 * k))


def kappa_lower_general(p: EstimateParams) -> float:
    """Lower bound ``(-4H^2 + c(1 - nu0^2)) / (4H sqrt(1 - nu0^2))`` for the boundary curvature."""
    one_minus = 1.0 - p.nu0 * p.nu0
    return (-p.H + p.c * one_minus / (4.0 * p.H)) / math.sqrt(one_minus)


def kappa_lower_height(p: EstimateParams) -> float:
    """Improved bound under ``|h| <= m alpha``: ``((4-8m)H^2 + c(1-nu0^2)) / (4mH sqrt(1-nu0^2))``."""
    if p.m is None:
        raise InvalidInputError("the height-restricted bound needs m")
    m = p.m
    one_minus = 1.0 - p.nu0 * p.nu0
    return ((1.0 - 2.0 * m) * p.H / m + p.c * one_minus / (4.0 * m * p.H)) / math.sqrt(one_minus)


def convexity_height_caps(p: EstimateParams) -> dict:
    """Height caps that force a convex boundary (kappa_g >= 0).

    For ``c >= 0`` the cap is ``alpha/2``.  For ``c < 0`` two coefficients are
    reported: ``(4H^2 + c(1-nu0)^2) / (8H^2)`` as printed with the convexity
    statement, and ``(4H^2 + c(1-nu0^2)) / (8H^2)`` which is the value of m
    that zeroes :func:`kappa_lower_height`.
    """
    a = alpha_max(p)
    if p.c >= 0:
        return {"branch": "i", "cap": 0.5 * a, "cap_printed": 0.5 * a}
    H2 = p.H ** 2
    coef_theorem = (4 * H2 + p.c * (1 - p.nu0 ** 2)) / (8 * H2)
    coef_printed = (4 * H2 + p.c * (1 - p.nu0) ** 2) / (8 * H2)
    return {"branch": "ii", "cap": coef_theorem * a, "cap_printed": coef_printed * a}


def _check_height(p: EstimateParams, s):
    a = alpha_max(p)
    s_arr = np.asarray(s, dtype=float)
    slack = 1e-14 * max(1.0, a)
    if np.any(s_arr < -slack) or np.any(s_arr > a + slack):
        raise DomainError(f"height must lie in [0, {a!r}]")
    return a


def zeta(p: EstimateParams, s):
    """Lower bound for ``nu^2`` at height ``s``: the square of ``g^{-1}(s - g(nu0))``."""
    _check_height(p, s)
    t = np.minimum(g_inverse(p, np.asarray(s, dtype=float) - g_value(p, p.nu0)), 1.0)
    out = t * t
    return float(out) if np.ndim(out) == 0 else out


def distance_lower_bound(p: EstimateParams, h: float, tol: float = QUAD_TOL) -> float:
    """``int_0^h ds / sqrt(1 - zeta(s, nu0))``, a lower bound for the distance to the boundary.

    The integrand has an inverse-square-root singularity at ``h = alpha``; the
    factorisation ``1 - zeta = (1 - t)(1 + t)`` is evaluated from the distance
    to the top so that tanh-sinh nodes crowding the endpoint stay accurate.
    """
    a = _check_height(p, h)
    h = min(max(float(h), 0.0), a)
    if h == 0:
        return 0.0
    g0 = g_value(p, p.nu0)
    pref, k = _g_constants(p)

    def one_minus_t(db_top):
        # 1 - g^{-1}(alpha - d) with g^{-1}(alpha) = 1, written without cancellation
        if p.c > 0:
            x = 1.0 / pref
            # tanh(A) - tanh(A - u) = sinh(u) / (cosh(A) cosh(A - u))
            A = math.atanh(k)
            return np.sinh(db_top * x) / (np.cosh(A) * np.cosh(A - db_top * x)) / k
        if p.c < 0:
            x = 1.0 / pref
            A = math.atan(k)
            return np.sin(db_top * x) / (np.cos(A) * np.cos(A - db_top * x)) / k
        return db_top / pref

    def integrand(s, da, db):
        t = g_inverse(p, s - g0)
        d_top = a - h + db
        near = d_top < 0.25 * a
        omt = np.where(near, one_minus_t(np.where(near, d_top, 0.0)), 1.0 - t)
        return 1.0 / np.sqrt(omt * (1.0 + np.minimum(t, 1.0)))

    return quad_singular(integrand, 0.0, h, tol=tol, with_distances=True)
