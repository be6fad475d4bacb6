"""Numerical engines: adaptive Runge-Kutta integration, tanh-sinh quadrature,
golden-section search and bisection.

Everything here is generic; the geometric systems are assembled in
:mod:`cmcgraphs.profiles`.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import AccuracyError, DomainError, NoSolutionError, StepSizeUnderflowError

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_QUAD_TOL = 1e-11

# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)
# ---------------------------------------------------------------------------

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# fifth-order minus embedded fourth-order weights (last entry multiplies the FSAL stage)
_E = np.array([-71 / 57600, 0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# quartic continuous extension (Shampine), coefficients of theta, theta^2, theta^3, theta^4
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_BETA1 = 0.7 / 5  # PI controller exponents (Gustafsson)
_BETA2 = 0.4 / 5


@dataclass(frozen=True)
class OdeSystem:
    """``y' = rhs(t, y)`` with an optional conserved quantity."""

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    invariant_fn: Optional[Callable[[np.ndarray], float]] = None


@dataclass
class OdeSolution:
    """Accepted steps of an integration together with their dense interpolants."""

    nodes: np.ndarray
    states: np.ndarray
    max_invariant_drift: float
    error_estimates: np.ndarray
    _stages: List[np.ndarray] = field(default_factory=list, repr=False)

    def __call__(self, t):
        return self.dense_eval(t)

    def dense_eval(self, t) -> np.ndarray:
        """State at ``t`` from the quartic interpolant of the enclosing step."""
        nodes = self.nodes
        forward = nodes[-1] >= nodes[0]
        lo, hi = (nodes[0], nodes[-1]) if forward else (nodes[-1], nodes[0])
        slack = 1e-12 * max(1.0, abs(hi - lo))
        if not lo - slack <= t <= hi + slack:
            raise DomainError(f"t={t!r} outside the integrated span [{lo!r}, {hi!r}]")
        key = nodes if forward else -nodes
        tk = t if forward else -t
        i = min(max(bisect.bisect_right(key, tk) - 1, 0), len(nodes) - 2)
        h = nodes[i + 1] - nodes[i]
        theta = (t - nodes[i]) / h
        Q = self._stages[i].T @ _P
        return self.states[i] + h * (Q @ np.array([theta, theta ** 2, theta ** 3, theta ** 4]))


def _rk_step(rhs, t, y, f0, h):
    K = np.empty((7, y.size))
    K[0] = f0
    for s in range(1, 6):
        dy = h * (np.dot(_A[s], K[:s]))
        K[s] = rhs(t + _C[s] * h, y + dy)
    y_new = y + h * (_B @ K[:6])
    K[6] = rhs(t + h, y_new)
    err = h * (_E @ K)
    return y_new, err, K


def integrate_ivp(
    sys: OdeSystem,
    y0,
    span: Tuple[float, float],
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    first_step: Optional[float] = None,
    max_steps: int = 200_000,
) -> OdeSolution:
    """Integrate ``sys`` over ``span`` (either direction) with Dormand-Prince 5(4).

    Steps are accepted when the scaled RMS error estimate is at most one;
    the next step size comes from a proportional-integral controller.
    """
    if rtol <= 0 or atol <= 0:
        raise DomainError("tolerances must be positive")
    t0, t1 = float(span[0]), float(span[1])
    y = np.array(y0, dtype=float).reshape(-1)
    if y.size != sys.dimension:
        raise DomainError(f"initial state has {y.size} components, system has {sys.dimension}")
    length = abs(t1 - t0)
    direction = 1.0 if t1 >= t0 else -1.0
    rhs = lambda t, s: np.asarray(sys.rhs(t, s), dtype=float)

    nodes, states, stages, errs = [t0], [y.copy()], [], []
    inv0 = sys.invariant_fn(y) if sys.invariant_fn else None
    drift = 0.0
    if length == 0:
        return OdeSolution(np.array(nodes), np.array(states), drift, np.zeros(0), [])

    f0 = rhs(t0, y)
    if first_step is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean((y / scale) ** 2))
        d1 = np.sqrt(np.mean((f0 / scale) ** 2))
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h = min(h, length)
    else:
        h = min(abs(first_step), length)
    h_min = 1e-14 * length
    t = t0
    err_prev = 1e-4
    for _ in range(max_steps):
        remaining = abs(t1 - t)
        if remaining <= 1e-15 * max(1.0, abs(t1)):
            break
        h = min(h, remaining)
        if h < h_min:
            raise StepSizeUnderflowError(
                f"step size underflow at t={t!r} (h={h:.3e}); singular or stiff system", t
            )
        step = direction * h
        y_new, err_vec, K = _rk_step(rhs, t, y, f0, step)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if not np.all(np.isfinite(y_new)) or not math.isfinite(err):
            h *= _MIN_FACTOR
            continue
        if err <= 1.0:
            t_new = t1 if h == remaining else t + step
            nodes.append(t_new)
            states.append(y_new)
            stages.append(K)
            errs.append(float(np.max(np.abs(err_vec))))
            if inv0 is not None:
                drift = max(drift, abs(sys.invariant_fn(y_new) - inv0))
            if err == 0:
                factor = _MAX_FACTOR
            else:
                factor = _SAFETY * err ** (-_BETA1) * err_prev ** _BETA2
            h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
            t, y, f0 = t_new, y_new, K[6]
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-0.2))
    else:
        raise AccuracyError(f"maximum number of steps ({max_steps}) exceeded at t={t!r}")
    return OdeSolution(np.array(nodes), np.array(states), drift, np.array(errs), stages)


# ---------------------------------------------------------------------------
# tanh-sinh quadrature
# ---------------------------------------------------------------------------

_T_MAX = 6.1  # e^{-2 (pi/2) sinh t} stays above the double underflow threshold
_MAX_LEVELS = 12


def _ts_nodes(ts: np.ndarray):
    """For t >= 0: tanh-sinh abscissa ``u``, ``1 - u`` and the weight ``du/dt``."""
    v = 0.5 * math.pi * np.sinh(ts)
    e = np.exp(-2.0 * v)
    one_minus_u = 2.0 * e / (1.0 + e)
    w = 0.5 * math.pi * np.cosh(ts) * 4.0 * e / (1.0 + e) ** 2
    return one_minus_u, w


def quad_singular(
    f: Callable,
    a: float,
    b: float,
    tol: float = DEFAULT_QUAD_TOL,
    with_distances: bool = False,
    max_levels: int = _MAX_LEVELS,
    levels_out: Optional[list] = None,
) -> float:
    """Integrate ``f`` over ``[a, b]`` with the tanh-sinh (double-exponential) rule.

    ``f`` is called with numpy arrays of abscissae. With ``with_distances``
    it is called as ``f(x, x - a, b - x)`` where both distances are computed
    without cancellation, which is what keeps integrable endpoint
    singularities accurate to full precision.  Endpoints are never evaluated.
    The step is halved until two consecutive levels agree within ``tol``.
    """
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    if a > b:
        if with_distances:
            g = lambda x, da, db: f(x, db, da)
        else:
            g = f
        return -quad_singular(g, b, a, tol, with_distances, max_levels, levels_out)
    half = 0.5 * (b - a)

    def level_sum(ts):
        ts = ts[ts <= _T_MAX]
        omu, w = _ts_nodes(ts)
        near = half * omu  # distance to the nearer endpoint
        far = (b - a) - near
        side = ts > 0  # t = 0 is the midpoint, counted once on the right
        total = 0.0
        for x, da, db, ww in (
            (b - near, far, near, w),
            (a + near[side], near[side], far[side], w[side]),
        ):
            keep = (ww > 0) & (da > 0) & (db > 0)
            if not with_distances:
                keep &= (x > a) & (x < b)
            if not np.any(keep):
                continue
            xs = x[keep]
            vals = f(xs, da[keep], db[keep]) if with_distances else f(xs)
            vals = np.broadcast_to(np.asarray(vals, dtype=float), xs.shape)
            total += float(np.sum(ww[keep] * vals))
        return total * half

    h = 1.0
    ts = np.arange(0.0, _T_MAX + h / 2, h)
    raw = level_sum(ts)
    estimate = raw * h
    history = [estimate]
    for level in range(1, max_levels + 1):
        h *= 0.5
        new_ts = np.arange(h, _T_MAX + h / 2, 2 * h)
        raw += level_sum(new_ts)
        new_estimate = raw * h
        history.append(new_estimate)
        if not math.isfinite(new_estimate):
            raise AccuracyError("tanh-sinh quadrature produced a non-finite value")
        diff = abs(new_estimate - estimate)
        estimate = new_estimate
        if level >= 2 and diff <= max(tol, 64 * np.finfo(float).eps * abs(estimate)):
            if levels_out is not None:
                levels_out.extend(history)
            return estimate
    if levels_out is not None:
        levels_out.extend(history)
    raise AccuracyError(
        f"tanh-sinh quadrature did not converge after {max_levels} levels: "
        f"last estimates {history[-2]!r}, {history[-1]!r}"
    )


# ---------------------------------------------------------------------------
# scalar search
# ---------------------------------------------------------------------------

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-8):
    """Maximise a unimodal ``f`` on ``[a, b]``; returns ``(argmax, max)``."""
    a, b = min(a, b), max(a, b)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def bisect_root(f: Callable[[float], float], a: float, b: float, xtol: float = 1e-12) -> float:
    """Root of ``f`` in a sign-changing bracket ``[a, b]``, to bracket width ``xtol``."""
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise NoSolutionError(f"no sign change on [{a!r}, {b!r}]")
    while abs(b - a) > xtol:
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)
