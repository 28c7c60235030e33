"""Closed-loop simulation of a fractional plant under fractional PID control.

One shared sample grid drives setpoint filtering, the discrete control
law and the plant recurrence.  The loop is closed algebraically within
each sample, so the controller acts on the current measurement with no
computational delay; an optional flag inserts a one-sample delay instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .controller import (ControllerState, FoPidController, control_terms,
                         filter_setpoint, push_error)
from .plant import FractionalPlant, TimeGrid, difference_weights

__all__ = [
    "LoopConfig",
    "SimulationTrace",
    "PerformanceMetrics",
    "LoopDivergedError",
    "simulate_closed_loop",
    "compute_metrics",
]


class LoopDivergedError(RuntimeError):
    """The loop response left the divergence bound; carries the partial trace."""

    def __init__(self, message: str, trace: "SimulationTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class LoopConfig:
    """Everything needed to run one closed-loop experiment.

    setpoint/setpoint_time describe a step of the given amplitude at the
    given time; setpoint_samples, when provided, overrides them with an
    explicit per-sample sequence.  memory_length bounds the controller
    history window.
    """

    plant: FractionalPlant
    controller: FoPidController
    grid: TimeGrid
    memory_length: float = math.inf
    setpoint: float = 1.0
    setpoint_time: float = 0.0
    setpoint_samples: np.ndarray | None = None
    filter_coeff: float = 0.5
    divergence_bound: float = 1e6
    delayed_input: bool = False

    def __post_init__(self):
        if not math.isfinite(self.setpoint):
            raise ValueError("setpoint must be finite")
        if self.setpoint_time < 0:
            raise ValueError("setpoint_time must be non-negative")
        if not self.divergence_bound > 0:
            raise ValueError("divergence_bound must be positive")
        if self.setpoint_samples is not None:
            samples = np.asarray(self.setpoint_samples, dtype=float)
            if samples.shape != (self.grid.n_steps + 1,):
                raise ValueError("setpoint_samples must match the grid length")
            samples.setflags(write=False)
            object.__setattr__(self, "setpoint_samples", samples)


@dataclass(frozen=True)
class SimulationTrace:
    """Aligned per-sample records of one loop run.

    t, w, w_star, e, u, y: time, raw setpoint, filtered setpoint, error,
    control output and plant output, all the same length.
    """

    t: np.ndarray
    w: np.ndarray
    w_star: np.ndarray
    e: np.ndarray
    u: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        arrays = {}
        n = None
        for name in ("t", "w", "w_star", "e", "u", "y"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if n is None:
                n = len(arr)
            elif len(arr) != n:
                raise ValueError("trace columns must have equal length")
            arr.setflags(write=False)
            arrays[name] = arr
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class PerformanceMetrics:
    """Step-response quality summary.

    static_deviation : percent gap between final setpoint and settled
        output; measured against the output magnitude itself (flagged by
        absolute_deviation) when the setpoint ends at zero.
    control_time : time from the setpoint step until the output last
        leaves the settle band around its final value.
    overshoot : percent peak excursion above the settled output.
    """

    static_deviation: float
    control_time: float
    overshoot: float
    absolute_deviation: bool = False

    def __post_init__(self):
        if self.control_time < 0:
            raise ValueError("control_time must be non-negative")
        if self.overshoot < 0:
            raise ValueError("overshoot must be non-negative")


def simulate_closed_loop(config: LoopConfig) -> SimulationTrace:
    """Run the loop over the configured grid and return the full trace.

    y(0) = 0 by the zero-history convention.  Later samples solve the
    plant recurrence and control law together, so u(k) acts on y(k)
    within the same sample.  Raises LoopDivergedError with the partial
    trace when |y| exceeds the divergence bound or turns non-finite.
    """
    grid = config.grid
    t = grid.times()
    n = len(t)
    if config.setpoint_samples is not None:
        w = np.asarray(config.setpoint_samples, dtype=float)
    else:
        on = t >= config.setpoint_time - 0.5 * grid.step
        w = np.where(on, config.setpoint, 0.0)
    weights = difference_weights(config.plant, grid.step, n - 1)
    state = ControllerState(grid.step, config.memory_length, config.filter_coeff)
    w_star = np.zeros(n)
    e = np.zeros(n)
    u = np.zeros(n)
    y = np.zeros(n)
    for k in range(n):
        w_star[k] = filter_setpoint(state, w[k])
        kappa, history = control_terms(config.controller, state)
        if k == 0:
            y_k = 0.0
        else:
            s = float(np.dot(weights[1:k + 1], y[k - 1::-1]))
            if config.delayed_input:
                y_k = (u[k - 1] - s) / weights[0]
            else:
                y_k = (kappa * w_star[k] + history - s) / (weights[0] + kappa)
        y[k] = y_k
        e[k] = w_star[k] - y_k
        u[k] = kappa * e[k] + history
        push_error(state, e[k])
        if not abs(y_k) <= config.divergence_bound:
            partial = SimulationTrace(t[:k + 1].copy(), w[:k + 1].copy(),
                                      w_star[:k + 1], e[:k + 1],
                                      u[:k + 1], y[:k + 1])
            raise LoopDivergedError(
                f"loop diverged at t={t[k]:g}: |y|={abs(y_k):g} exceeds "
                f"bound {config.divergence_bound:g}", partial)
    return SimulationTrace(t, w, w_star, e, u, y)


def compute_metrics(trace: SimulationTrace,
                    settle_band: float = 2.0) -> PerformanceMetrics:
    """Summarize a step-response trace.

    The settled output is the mean of the last 5 percent of samples.
    Static deviation is relative to the final setpoint, or reported as
    absolute (times 100) when that setpoint is zero.  Control time runs
    from the setpoint step to the first sample after the output last
    lies outside the settle band (percent of the settled output).
    """
    if len(trace) == 0:
        raise ValueError("trace is empty")
    if not settle_band > 0:
        raise ValueError("settle_band must be positive")
    t, w, y = trace.t, trace.w, trace.y
    w_final = w[-1]
    tail = max(1, round(0.05 * len(y)))
    y_final = float(np.mean(y[-tail:]))
    if w_final != 0.0:
        deviation = 100.0 * abs(w_final - y_final) / abs(w_final)
        absolute = False
    else:
        deviation = 100.0 * abs(y_final)
        absolute = True
    changes = np.nonzero(w != w[0])[0]
    t_step = t[changes[0]] if len(changes) else t[0]
    after = t >= t_step
    peak = float(np.max(y[after])) - y_final
    if y_final != 0.0:
        overshoot = 100.0 * max(peak, 0.0) / abs(y_final)
    else:
        overshoot = 0.0 if peak <= 0.0 else math.inf
    band = settle_band / 100.0 * abs(y_final)
    outside = (np.abs(y - y_final) > band) & after
    hits = np.nonzero(outside)[0]
    if len(hits) == 0:
        control_time = 0.0
    else:
        last = hits[-1]
        settled_at = t[last + 1] if last + 1 < len(t) else t[-1]
        control_time = max(float(settled_at - t_step), 0.0)
    return PerformanceMetrics(deviation, control_time, overshoot, absolute)
