"""Discrete fractional-order PID control in position form.

The control law is u = K*e + Ti*D^(-lambda) e + Td*D^(delta) e with both
differintegrals realized by short-memory backward differences on the
error history.  Classical PID falls out at lambda = delta = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fraccalc import CoefficientTable, binomial_coeffs

__all__ = [
    "FoPidController",
    "ControllerState",
    "filter_setpoint",
    "control_terms",
    "control_step",
    "push_error",
    "reset",
]


@dataclass(frozen=True)
class FoPidController:
    """Immutable controller parameters.

    gain : proportional gain K.
    ti, lam : integral gain and integration order lambda >= 0.
    td, delta : derivative gain and differentiation order delta >= 0.

    A zero ti or td disables that channel entirely, whatever its order.
    """

    gain: float
    ti: float = 0.0
    lam: float = 0.0
    td: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")


class ControllerState:
    """Mutable per-loop controller memory.

    Holds the filtered setpoint, the retained error history (most recent
    last, trimmed to the memory window), and coefficient tables cached per
    differintegration order so weights are never recomputed sample by
    sample.
    """

    def __init__(self, sample_period: float, memory_length: float = math.inf,
                 filter_coeff: float = 0.5):
        if not sample_period > 0:
            raise ValueError("sample_period must be positive")
        if not memory_length > 0:
            raise ValueError("memory_length must be positive")
        if not 0 < filter_coeff <= 1:
            raise ValueError("filter_coeff must lie in (0, 1]")
        self.sample_period = float(sample_period)
        self.memory_length = float(memory_length)
        self.filter_coeff = float(filter_coeff)
        self.filtered_setpoint = 0.0
        self._buf = np.zeros(64)
        self._n = 0
        self._k = 0
        self._tables: dict[float, CoefficientTable] = {}

    @property
    def error_history(self) -> np.ndarray:
        """Retained error samples, oldest first."""
        return self._buf[:self._n].copy()

    @property
    def step_count(self) -> int:
        """Errors pushed since the last reset."""
        return self._k

    def _max_keep(self) -> int | None:
        if math.isinf(self.memory_length):
            return None
        return _window_steps(self.memory_length, self.sample_period) + 1

    def _window(self) -> int:
        # past samples entering the differintegral sums at the next step
        if math.isinf(self.memory_length):
            return self._k
        return min(self._k, _window_steps(self.memory_length, self.sample_period))

    def _coeffs(self, order: float, count: int) -> np.ndarray:
        table = self._tables.get(order)
        if table is None:
            table = binomial_coeffs(order, max(count, 63))
        elif len(table) < count + 1:
            table = table.extended(max(count, 2 * (len(table) - 1)))
        self._tables[order] = table
        return table.values

    def _push(self, e: float) -> None:
        if self._n == len(self._buf):
            grown = np.zeros(2 * len(self._buf))
            grown[:self._n] = self._buf[:self._n]
            self._buf = grown
        self._buf[self._n] = e
        self._n += 1
        self._k += 1
        keep = self._max_keep()
        if keep is not None and self._n > keep:
            drop = self._n - keep
            self._buf[:keep] = self._buf[drop:self._n]
            self._n = keep


def _window_steps(memory_length: float, step: float) -> int:
    return int(math.floor(memory_length / step + 1e-9))


def filter_setpoint(state: ControllerState, setpoint: float) -> float:
    """Advance the first-order setpoint filter by one sample and return it."""
    state.filtered_setpoint += state.filter_coeff * (setpoint - state.filtered_setpoint)
    return state.filtered_setpoint


def control_terms(controller: FoPidController,
                  state: ControllerState) -> tuple[float, float]:
    """Split the control law around the incoming error sample.

    Returns (kappa, history) such that the next output is
    u = kappa * e_new + history, where history collects the integral and
    derivative contributions of errors already pushed.  Lets a caller
    solve loop equations with no computational delay.
    """
    T = state.sample_period
    N = state._window()
    recent = state._buf[:state._n][::-1]
    kappa = controller.gain
    history = 0.0
    if controller.ti != 0.0:
        q = state._coeffs(-controller.lam, N)
        g = controller.ti * T ** controller.lam
        kappa += g
        if N:
            history += g * float(np.dot(q[1:N + 1], recent[:N]))
    if controller.td != 0.0:
        d = state._coeffs(controller.delta, N)
        g = controller.td * T ** (-controller.delta)
        kappa += g
        if N:
            history += g * float(np.dot(d[1:N + 1], recent[:N]))
    return kappa, history


def push_error(state: ControllerState, error: float) -> None:
    """Append one error sample to the history, trimming to the memory window."""
    state._push(float(error))


def control_step(controller: FoPidController, state: ControllerState,
                 measured: float, setpoint: float) -> float:
    """Advance the controller one sample and return the control output.

    Filters the setpoint, forms the error against the measurement, pushes
    it into the history and evaluates the full control law.
    """
    w_star = filter_setpoint(state, setpoint)
    kappa, history = control_terms(controller, state)
    e = w_star - measured
    push_error(state, e)
    return kappa * e + history


def reset(state: ControllerState) -> ControllerState:
    """Clear the setpoint filter and error history; coefficient caches stay."""
    state.filtered_setpoint = 0.0
    state._n = 0
    state._k = 0
    return state
