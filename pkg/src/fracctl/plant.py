"""Fractional-order plant models and their step-response solvers.

A plant is the n-term operator sum_i a_i * D^(beta_i) y = u with
0 <= beta_0 < beta_1 < ... < beta_n.  Discrete simulation runs the
Grunwald-Letnikov recurrence; two- and three-term plants also have a
Mittag-Leffler series solution for the unit step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fraccalc import ConvergenceError, binomial_coeffs, ml_derivative

__all__ = [
    "PlantValidationError",
    "FractionalPlant",
    "TimeGrid",
    "validate_plant",
    "difference_weights",
    "simulate_plant",
    "analytic_solution",
]


class PlantValidationError(ValueError):
    """A coefficient/order description does not define a usable plant."""


@dataclass(frozen=True, eq=False)
class FractionalPlant:
    """Immutable n-term plant description.

    coeffs : a_0..a_n, highest-order coefficient nonzero.
    orders : beta_0..beta_n, non-negative and strictly increasing.
    """

    coeffs: np.ndarray
    orders: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        orders = np.atleast_1d(np.asarray(self.orders, dtype=float))
        if coeffs.ndim != 1 or orders.ndim != 1:
            raise PlantValidationError("coeffs and orders must be one-dimensional")
        if len(coeffs) != len(orders):
            raise PlantValidationError(
                f"coeffs and orders must have equal length, "
                f"got {len(coeffs)} and {len(orders)}"
            )
        if len(coeffs) == 0:
            raise PlantValidationError("plant needs at least one term")
        if not np.all(np.isfinite(coeffs)) or not np.all(np.isfinite(orders)):
            raise PlantValidationError("coeffs and orders must be finite")
        if orders[0] < 0:
            raise PlantValidationError("orders must be non-negative")
        if np.any(np.diff(orders) <= 0):
            raise PlantValidationError("orders must be strictly increasing")
        if coeffs[-1] == 0:
            raise PlantValidationError("highest-order coefficient must be nonzero")
        coeffs.setflags(write=False)
        orders.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "orders", orders)

    @property
    def term_count(self) -> int:
        return len(self.coeffs)


def validate_plant(coeffs, orders) -> FractionalPlant:
    """Build a plant, raising PlantValidationError on a bad description."""
    return FractionalPlant(coeffs, orders)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sample grid t_k = k * step for k = 0..n_steps."""

    step: float
    horizon: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.horizon >= self.step:
            raise ValueError("horizon must cover at least one step")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.step))

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.step


def _weights(coeffs, orders, step: float, count: int) -> np.ndarray:
    """Combined difference weights c_j = sum_i a_i * step**(-beta_i) * b_j^(i)."""
    total = np.zeros(count + 1)
    for a, b in zip(coeffs, orders):
        total += (a * step ** (-b)) * binomial_coeffs(b, count).values
    return total


def difference_weights(plant: FractionalPlant, step: float, count: int) -> np.ndarray:
    """Weights c_0..c_count of the plant's one-step recurrence at the given step.

    The recurrence solved per sample is c_0 * y_k = u_k - sum_{j>=1} c_j * y_{k-j}.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if count < 0:
        raise ValueError("count must be non-negative")
    return _weights(plant.coeffs, plant.orders, step, count)


def _recurrence(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    y = np.zeros(len(u))
    inv = 1.0 / weights[0]
    for k in range(1, len(u)):
        y[k] = (u[k] - np.dot(weights[1:k + 1], y[k - 1::-1])) * inv
    return y


def _step_response_raw(coeffs, orders, step: float, count: int,
                       amplitude: float = 1.0) -> np.ndarray:
    # no validation: the identification penalty path probes disordered orders
    w = _weights(coeffs, orders, step, count)
    u = np.full(count + 1, float(amplitude))
    return _recurrence(w, u)


def simulate_plant(plant: FractionalPlant, input, grid: TimeGrid) -> np.ndarray:
    """Simulate the forced response on the grid with zero initial history.

    ``input`` must provide one sample per grid point.  y(0) = 0 by the
    zero-history convention; later samples come from the one-step
    recurrence.
    """
    u = np.asarray(input, dtype=float)
    n = grid.n_steps + 1
    if u.shape != (n,):
        raise ValueError(f"input must have {n} samples to match the grid")
    weights = difference_weights(plant, grid.step, grid.n_steps)
    return _recurrence(weights, u)


def analytic_solution(plant: FractionalPlant, t: float, truncation: int = 50,
                      rtol: float = 1e-10) -> float:
    """Unit-step response of a two- or three-term plant by series evaluation.

    Sums Mittag-Leffler derivative terms until two consecutive terms fall
    below rtol relative to the running total, up to ``truncation`` outer
    terms.  Raises ConvergenceError when t lies outside the numerically
    convergent region and ValueError for unsupported term counts.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    n = plant.term_count
    if n not in (2, 3):
        raise ValueError(
            f"unsupported term count {n}: the series solution covers "
            "two- and three-term plants only"
        )
    if t == 0:
        return 0.0
    a = plant.coeffs
    b = plant.orders
    if n == 2:
        lam = b[1] - b[0]
        val = t ** b[1] * ml_derivative(lam, b[1] + 1.0, -(a[0] / a[1]) * t ** lam,
                                        0, tol=1e-13)
        return float(val / a[1])
    lam = b[2] - b[1]
    arg = -(a[1] / a[2]) * t ** lam
    rho = a[0] / a[2]
    coef = 1.0
    total = 0.0
    small = 0
    for m in range(truncation + 1):
        if m:
            coef *= -rho / m
        mu = b[2] + (b[1] - b[0]) * m
        term = coef * t ** (lam * m + mu) * ml_derivative(lam, mu + 1.0, arg,
                                                          m, tol=1e-13)
        total += term
        if abs(term) <= rtol * abs(total):
            small += 1
            if small >= 2:
                return float(total / a[2])
        else:
            small = 0
    raise ConvergenceError(
        f"step-response series did not converge within {truncation} terms at t={t:g}",
        terms=truncation + 1,
    )
