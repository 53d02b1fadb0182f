"""Dormand-Prince 5(4) integrator with dense output and event location.

A small, self-contained explicit solver for smooth non-stiff systems. It is
used for the Euler-angle flow and the body-frame Euler equations, where the
events of interest are zero crossings of a scalar function of the state
(first return of the angular momentum, a fixed precession angle reached).
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from toprot.errors import NumericalError

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th- and 4th-order weights, including the FSAL stage
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension of order 4 (Hairer, Norsett & Wanner), columns are powers of theta
_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@dataclass
class Event:
    """Zero crossing of ``func(t, y)`` to detect during integration.

    ``direction`` is +1 for upward crossings only, -1 for downward, 0 for
    both. A terminal event stops the integration at the crossing. Crossings
    closer than ``skip_below`` to the initial time are ignored, which keeps a
    state starting exactly on the event surface from triggering at t0.
    """

    func: Callable[[float, np.ndarray], float]
    direction: int = 0
    terminal: bool = False
    skip_below: float = 0.0


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray
    t_events: list = field(default_factory=list)
    y_events: list = field(default_factory=list)
    n_steps: int = 0
    n_rejected: int = 0
    terminated: bool = False


def _stages(f, t, y, h, k0):
    k = np.empty((7, y.size))
    k[0] = k0
    for i in range(1, 6):
        k[i] = f(t + _C[i] * h, y + h * (_A[i] @ k[:i]))
    y_new = y + h * (_B @ k[:6])
    k[6] = f(t + h, y_new)
    return y_new, k


def _dense(y, h, k, theta):
    powers = np.array([theta, theta**2, theta**3, theta**4])
    return y + h * ((_P @ powers) @ k)


def _initial_step(f, t0, y0, f0, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = f(t0 + h0, y0 + h0 * f0)
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def dopri5(
    f,
    t_span,
    y0,
    rtol=1e-10,
    atol=1e-10,
    events=(),
    max_steps=1_000_000,
    step_callback: Optional[Callable[[float, np.ndarray], None]] = None,
):
    """Integrate ``y' = f(t, y)`` over ``t_span`` with error control.

    The local error estimate of every accepted step satisfies
    ``|err_i| <= atol + rtol * max(|y_i|, |y_new_i|)`` componentwise.
    ``step_callback`` is called after each accepted step and may raise to
    abort the integration.
    """
    t0, t_end = map(float, t_span)
    if t_end <= t0:
        raise ValueError("t_span must be increasing")
    y = np.asarray(y0, dtype=float).copy()
    t = t0
    f0 = np.asarray(f(t, y), dtype=float)
    h = _initial_step(f, t, y, f0, rtol, atol)
    ts, ys = [t], [y.copy()]
    sol = Solution(t=np.empty(0), y=np.empty(0))
    g_old = [ev.func(t, y) for ev in events]

    while t < t_end:
        if sol.n_steps >= max_steps:
            raise NumericalError(f"dopri5 exceeded {max_steps} steps at t={t}")
        h = min(h, t_end - t)
        if h <= 1e-14 * max(1.0, abs(t)):
            raise NumericalError(f"dopri5 step size underflow at t={t}")
        y_new, k = _stages(f, t, y, h, f0)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.max(np.abs(h * (_E @ k)) / scale)
        if err > 1.0:
            sol.n_rejected += 1
            h *= max(_MIN_FACTOR, _SAFETY * err**-0.2)
            continue

        t_new = t + h
        if t_end - t_new < 1e-13 * max(1.0, abs(t_end)):
            t_new = t_end
        sol.n_steps += 1

        hit = None
        for idx, ev in enumerate(events):
            g_new = ev.func(t_new, y_new)
            g0 = g_old[idx]
            g_old[idx] = g_new
            crossed = (g0 < 0.0 <= g_new and ev.direction >= 0) or (
                g0 > 0.0 >= g_new and ev.direction <= 0
            )
            if not crossed:
                continue
            hh, yy, kk, tt = h, y, k, t

            def g_of(theta):
                return ev.func(tt + theta * hh, _dense(yy, hh, kk, theta))

            theta = brentq(g_of, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            t_ev = t + theta * h
            if t_ev - t0 <= ev.skip_below:
                continue
            y_ev = _dense(y, h, k, theta)
            sol.t_events.append((idx, t_ev))
            sol.y_events.append((idx, y_ev))
            if ev.terminal and (hit is None or t_ev < hit[0]):
                hit = (t_ev, y_ev)

        if hit is not None:
            ts.append(hit[0])
            ys.append(hit[1])
            sol.terminated = True
            if step_callback is not None:
                step_callback(hit[0], hit[1])
            break

        t, y, f0 = t_new, y_new, k[6]
        ts.append(t)
        ys.append(y.copy())
        if step_callback is not None:
            step_callback(t, y)
        factor = _MAX_FACTOR if err == 0.0 else min(_MAX_FACTOR, _SAFETY * err**-0.2)
        h *= max(_MIN_FACTOR, factor)

    sol.t = np.array(ts)
    sol.y = np.array(ys)
    return sol
