"""Numerical fractional calculus primitives.

Discrete Grunwald-Letnikov differintegration of uniformly sampled signals,
the fractional binomial weights it is built on, and series evaluation of
the two-parameter Mittag-Leffler function and its derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_SERIES_TERMS",
    "ConvergenceError",
    "DifferintegralSpec",
    "CoefficientTable",
    "binomial_coeffs",
    "gl_differint",
    "gamma",
    "mittag_leffler",
    "ml_derivative",
]

#: Hard cap on series terms before evaluation gives up.
MAX_SERIES_TERMS = 10_000


class ConvergenceError(ArithmeticError):
    """A series evaluation failed to reach the requested tolerance.

    Carries the number of terms consumed in ``terms``.
    """

    def __init__(self, message: str, terms: int = 0):
        super().__init__(message)
        self.terms = terms


@dataclass(frozen=True)
class DifferintegralSpec:
    """Parameters of a discrete differintegral evaluation.

    order : differentiation order; negative values integrate.
    step : sample spacing in seconds, positive.
    memory_length : history window in seconds; ``math.inf`` keeps the
        entire past.
    """

    order: float
    step: float
    memory_length: float = math.inf

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.memory_length > 0:
            raise ValueError("memory_length must be positive")


@dataclass(frozen=True)
class CoefficientTable:
    """Binomial weights b_0..b_n of one differintegration order.

    Satisfies b_0 = 1 and b_j = (1 - (1 + order)/j) * b_{j-1}.
    """

    order: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def extended(self, count: int) -> "CoefficientTable":
        """Return a table holding b_0..b_count, reusing the current entries.

        Existing weights are never recomputed; the recurrence continues
        from the stored tail.
        """
        if count + 1 <= len(self.values):
            return self
        grown = np.empty(count + 1)
        old = len(self.values)
        grown[:old] = self.values
        b = grown[old - 1]
        for j in range(old, count + 1):
            b *= 1.0 - (1.0 + self.order) / j
            grown[j] = b
        return CoefficientTable(self.order, grown)


def binomial_coeffs(order: float, count: int) -> CoefficientTable:
    """Weights of the backward fractional difference of the given order.

    Returns the table b_0..b_count built by the one-term recurrence
    b_j = (1 - (1 + order)/j) * b_{j-1} starting from b_0 = 1.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    values = np.empty(count + 1)
    values[0] = 1.0
    if count:
        j = np.arange(1, count + 1, dtype=float)
        np.cumprod(1.0 - (1.0 + order) / j, out=values[1:])
    return CoefficientTable(order, values)


def _window_steps(memory_length: float, step: float) -> int:
    # floor with a small slack so representable ratios land on the intended bin
    return int(math.floor(memory_length / step + 1e-9))


def gl_differint(signal, spec: DifferintegralSpec) -> np.ndarray:
    """Differintegrate a uniformly sampled signal.

    The signal starts at t = 0 with zero history before it.  Sample k of
    the output is step**(-order) * sum_{j=0..N(k)} b_j * signal[k-j] with
    N(k) = min(k, floor(memory_length / step)).
    """
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise ValueError("signal must be one-dimensional")
    n = len(x)
    if n == 0:
        return np.empty(0)
    window = n - 1
    if math.isfinite(spec.memory_length):
        window = min(window, _window_steps(spec.memory_length, spec.step))
    b = binomial_coeffs(spec.order, window).values
    return spec.step ** (-spec.order) * np.convolve(x, b)[:n]


def gamma(x: float) -> float:
    """Euler gamma function for real arguments off the pole set."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise ValueError(f"gamma pole at non-positive integer x={x:g}")
    return math.gamma(x)


def _gamma_or_inf(x: float) -> float:
    # overflow of the denominator just zeroes the term
    try:
        return math.gamma(x)
    except OverflowError:
        return math.inf


def _check_series_args(alpha: float, beta: float, tol: float) -> None:
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not beta > 0:
        raise ValueError("beta must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")


def _ml_series(alpha: float, beta: float, z, n: int, tol: float):
    """Shared series kernel: sum_j (j+n)!/j! * z**j / Gamma(alpha*(j+n) + beta)."""
    total = z * 0.0
    z_pow = 1.0 + total
    ratio = float(math.factorial(n))
    peak = 0.0
    small = 0
    terms = MAX_SERIES_TERMS
    for j in range(MAX_SERIES_TERMS):
        if j:
            ratio *= (j + n) / j
            z_pow = z_pow * z
        term = ratio * z_pow / _gamma_or_inf(alpha * (j + n) + beta)
        total = total + term
        mag = abs(term)
        peak = max(peak, mag)
        if mag <= tol * abs(total):
            small += 1
            if small >= 2:
                terms = j + 1
                break
        else:
            small = 0
    else:
        raise ConvergenceError(
            f"series did not converge within {MAX_SERIES_TERMS} terms",
            terms=MAX_SERIES_TERMS,
        )
    eps = np.finfo(float).eps
    if peak * eps > tol * max(abs(total), np.finfo(float).tiny):
        raise ConvergenceError(
            "series lost the requested precision to cancellation; "
            "the argument is outside the numerically usable region",
            terms=terms,
        )
    return total


def mittag_leffler(alpha: float, beta: float, z, tol: float = 1e-12):
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z).

    Evaluates sum_k z**k / Gamma(alpha*k + beta) until two consecutive
    terms fall below tol relative to the running sum.  Real arguments
    give real results, complex arguments complex ones.  Raises
    ConvergenceError when the series cannot deliver the tolerance.
    """
    _check_series_args(alpha, beta, tol)
    return _ml_series(alpha, beta, z, 0, tol)


def ml_derivative(alpha: float, beta: float, z, n: int = 0, tol: float = 1e-12):
    """n-th derivative of the Mittag-Leffler function at z.

    Evaluates sum_j (j+n)!/j! * z**j / Gamma(alpha*(j+n) + beta) with the
    factorial ratio carried incrementally.  n = 0 reduces to
    mittag_leffler.
    """
    _check_series_args(alpha, beta, tol)
    if n < 0 or n != int(n):
        raise ValueError("n must be a non-negative integer")
    return _ml_series(alpha, beta, z, int(n), tol)
