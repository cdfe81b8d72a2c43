"""Deterministic ODE integration on tori.

Classical fixed-step RK4 and embedded Dormand-Prince RK45 with standard
step control (safety 0.9, factor clamp [0.2, 5]).  Angles are wrapped to
[0, 2*pi) after every accepted step, so vector fields must be 2*pi-periodic
in each coordinate.  Termination is by time, by proximity to a target point
(with one bisection refinement of the crossing step), or by divergence.

When the field is a :class:`~d2osc.phase_model.PhaseField` and the compiled
kernel built from ``_speedups.pyx`` is importable, the stepping loop runs in
C; the pure-Python loop below is the fallback and the reference semantics.
Both paths implement the identical algorithm.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .phase_model import PhaseField

try:
    from . import _speedups
except ImportError:  # extension not built; pure-Python fallback
    _speedups = None

TWO_PI = 2.0 * math.pi

DIVERGENCE_LIMIT = 1e12
MIN_STEP = 1e-13
BISECT_ITERS = 60


class Method(enum.Enum):
    RK4_FIXED = "rk4"
    RK45_ADAPTIVE = "rk45"


class Termination(enum.Enum):
    TIME_EXHAUSTED = 0
    EVENT_HIT = 1
    DIVERGED = 2


@dataclass(frozen=True)
class IntegratorOptions:
    method: Method = Method.RK45_ADAPTIVE
    dt: float = 1e-3              # RK4 step / RK45 initial step
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    t_max: float = 1e4
    max_dt: float = math.inf
    record_stride: int = 1
    use_compiled: bool = True

    def __post_init__(self) -> None:
        if self.dt <= 0 or self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("dt and tolerances must be positive")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    termination: Termination
    event_index: Optional[int] = None

    @property
    def end_time(self) -> float:
        return float(self.times[-1])

    @property
    def end_state(self) -> np.ndarray:
        return self.states[-1]


def wrap_state(y: np.ndarray) -> np.ndarray:
    return np.mod(y, TWO_PI)


def torus_distance(x: Sequence[float], y: Sequence[float]) -> float:
    """Euclidean distance with each coordinate difference wrapped to
    (-pi, pi]."""
    d = np.mod(np.asarray(x, dtype=float) - np.asarray(y, dtype=float) + math.pi,
               TWO_PI) - math.pi
    return float(np.sqrt(np.sum(d * d)))


# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
          187 / 2100, 1 / 40)


class _Diverged(Exception):
    pass


def _eval_field(field: Callable, y: np.ndarray) -> np.ndarray:
    k = np.asarray(field(y), dtype=float)
    if not np.all(np.isfinite(k)) or np.max(np.abs(k)) > DIVERGENCE_LIMIT:
        raise _Diverged
    return k


def _rk4_step(field: Callable, y: np.ndarray, h: float) -> np.ndarray:
    k1 = _eval_field(field, y)
    k2 = _eval_field(field, y + 0.5 * h * k1)
    k3 = _eval_field(field, y + 0.5 * h * k2)
    k4 = _eval_field(field, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _dp_step(field: Callable, y: np.ndarray, h: float):
    """One Dormand-Prince step: returns (y5, error_estimate)."""
    k = [_eval_field(field, y)]
    for i in range(1, 7):
        yi = y.copy()
        for j, aij in enumerate(_DP_A[i]):
            if aij != 0.0:
                yi = yi + (h * aij) * k[j]
        k.append(_eval_field(field, yi))
    y5 = y.copy()
    err = np.zeros_like(y)
    for i in range(7):
        if _DP_B5[i] != 0.0:
            y5 = y5 + (h * _DP_B5[i]) * k[i]
        diff = _DP_B5[i] - _DP_B4[i]
        if diff != 0.0:
            err = err + (h * diff) * k[i]
    return y5, err


def _err_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray,
              rel_tol: float, abs_tol: float) -> float:
    scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _single_step(field: Callable, y: np.ndarray, h: float,
                 method: Method) -> np.ndarray:
    if method is Method.RK4_FIXED:
        return _rk4_step(field, y, h)
    y5, _ = _dp_step(field, y, h)
    return y5


def _integrate_python(field: Callable, start: np.ndarray,
                      opts: IntegratorOptions,
                      targets: Optional[np.ndarray],
                      radius: float) -> Trajectory:
    y = wrap_state(np.asarray(start, dtype=float))
    t = 0.0
    times = [t]
    states = [y.copy()]
    accepted = 0

    def nearest(state: np.ndarray) -> tuple[int, float]:
        dists = [torus_distance(state, tgt) for tgt in targets]
        i = int(np.argmin(dists))
        return i, dists[i]

    if targets is not None and len(targets):
        i, d = nearest(y)
        if d < radius:
            return Trajectory(np.array(times), np.array(states),
                              Termination.EVENT_HIT, i)

    h = min(opts.dt, opts.max_dt, opts.t_max)
    try:
        while t < opts.t_max:
            if opts.t_max - t <= 1e-14 * max(1.0, opts.t_max):
                break
            h = min(h, opts.max_dt, opts.t_max - t)
            if opts.method is Method.RK4_FIXED:
                y_new = _rk4_step(field, y, h)
                accepted_step, h_used = True, h
            else:
                y5, err = _dp_step(field, y, h)
                e = _err_norm(err, y, y5, opts.rel_tol, opts.abs_tol)
                if not math.isfinite(e):
                    raise _Diverged
                accepted_step = e <= 1.0 or h <= MIN_STEP
                h_used = h
                factor = 5.0 if e == 0.0 else min(5.0, max(0.2, 0.9 * e ** -0.2))
                h = h * factor
                y_new = y5
            if not accepted_step:
                continue
            if not np.all(np.isfinite(y_new)):
                raise _Diverged

            t_new = t + h_used
            hit = None
            if targets is not None and len(targets):
                i, d = nearest(wrap_state(y_new))
                if d < radius:
                    # refine the crossing inside [t, t + h_used] by stepping
                    # partial steps from the pre-event state
                    lo, hi = 0.0, 1.0
                    for _ in range(BISECT_ITERS):
                        if hi - lo < 1e-15:
                            break
                        mid = 0.5 * (lo + hi)
                        y_mid = _single_step(field, y, mid * h_used, opts.method)
                        _, d_mid = nearest(wrap_state(y_mid))
                        if d_mid < radius:
                            hi = mid
                        else:
                            lo = mid
                    y_new = _single_step(field, y, hi * h_used, opts.method)
                    t_new = t + hi * h_used
                    hit, _ = nearest(wrap_state(y_new))

            y = wrap_state(y_new)
            t = t_new
            accepted += 1
            if hit is not None or accepted % opts.record_stride == 0 \
                    or t >= opts.t_max:
                times.append(t)
                states.append(y.copy())
            if hit is not None:
                return Trajectory(np.array(times), np.array(states),
                                  Termination.EVENT_HIT, hit)
    except _Diverged:
        if times[-1] != t:
            times.append(t)
            states.append(y.copy())
        return Trajectory(np.array(times), np.array(states),
                          Termination.DIVERGED, None)

    if times[-1] != t:
        times.append(t)
        states.append(y.copy())
    return Trajectory(np.array(times), np.array(states),
                      Termination.TIME_EXHAUSTED, None)


def _integrate_compiled(field: PhaseField, start: np.ndarray,
                        opts: IntegratorOptions,
                        targets: Optional[np.ndarray],
                        radius: float) -> Trajectory:
    p = field.params
    tgt = np.zeros((0, 2)) if targets is None else \
        np.ascontiguousarray(targets, dtype=float)
    times, states, term, event = _speedups.integrate_phase(
        p.a, p.b, p.eps, p.q,
        float(start[0]), float(start[1]),
        0 if opts.method is Method.RK4_FIXED else 1,
        opts.dt, opts.rel_tol, opts.abs_tol,
        opts.t_max, opts.max_dt, opts.record_stride,
        tgt, radius, BISECT_ITERS)
    return Trajectory(times, states, Termination(term),
                      event if event >= 0 else None)


def compiled_available() -> bool:
    return _speedups is not None


def _dispatch(field, start, opts, targets, radius) -> Trajectory:
    start = np.asarray(start, dtype=float)
    if (opts.use_compiled and _speedups is not None
            and isinstance(field, PhaseField) and start.shape == (2,)):
        return _integrate_compiled(field, start, opts, targets, radius)
    return _integrate_python(field, start, opts, targets, radius)


def integrate(field: Callable, start, opts: IntegratorOptions = IntegratorOptions()
              ) -> Trajectory:
    """Integrate until t_max (or divergence)."""
    return _dispatch(field, start, opts, None, 0.0)


def integrate_until_near(field: Callable, start, targets, radius: float,
                         opts: IntegratorOptions = IntegratorOptions()
                         ) -> Trajectory:
    """Integrate until the state comes within ``radius`` (strictly, in
    modular Euclidean distance) of one of the target points.

    The proximity test runs on accepted step endpoints only, followed by a
    bisection refinement of the crossing step; a ball small enough to be
    jumped over within one step is therefore not detected.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    tgt = np.asarray([np.asarray(t, dtype=float) for t in targets])
    return _dispatch(field, start, opts, tgt, radius)
