"""Fitting plant coefficients and orders to measured step-response data.

The fit minimizes the mean squared gap between measured samples and the
simulated step response of a candidate plant.  A bounded Nelder-Mead
search runs in box-scaled coordinates; order-constraint violations are
discouraged by a quadratic penalty so the simplex can slide back into
the feasible set.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, minimize

from .plant import FractionalPlant, _step_response_raw

__all__ = [
    "MeasuredResponse",
    "IdentProblem",
    "IdentResult",
    "objective_q",
    "identify",
]

log = logging.getLogger(__name__)

#: Simulated outputs beyond this magnitude count as divergent.
_DIVERGENCE_SENTINEL = 1e9


@dataclass(frozen=True)
class MeasuredResponse:
    """Uniformly sampled step-response measurement.

    times must start at zero (the excitation onset) and be uniformly
    spaced; amplitude is the height of the step input that produced the
    data.
    """

    times: np.ndarray
    values: np.ndarray
    amplitude: float = 1.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or values.ndim != 1:
            raise ValueError("times and values must be one-dimensional")
        if len(times) != len(values):
            raise ValueError("times and values must have equal length")
        if len(times) < 2:
            raise ValueError("need at least two samples")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(values)):
            raise ValueError("times and values must be finite")
        steps = np.diff(times)
        if steps[0] <= 0 or np.max(np.abs(steps - steps[0])) > 1e-6 * steps[0]:
            raise ValueError("times must be uniformly increasing")
        if abs(times[0]) > 1e-9 * steps[0]:
            raise ValueError("times must start at zero")
        if self.amplitude == 0 or not math.isfinite(self.amplitude):
            raise ValueError("amplitude must be nonzero and finite")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    def __len__(self) -> int:
        return len(self.times)


def _raw_quality(coeffs, orders, data: MeasuredResponse) -> float:
    with np.errstate(all="ignore"):
        simulated = _step_response_raw(coeffs, orders, data.step,
                                       len(data) - 1, data.amplitude)
    if not np.all(np.isfinite(simulated)) or np.max(np.abs(simulated)) > _DIVERGENCE_SENTINEL:
        return math.inf
    return float(np.mean((data.values - simulated) ** 2))


def objective_q(candidate: FractionalPlant, data: MeasuredResponse) -> float:
    """Mean squared deviation between data and the candidate's step response.

    Returns inf when the candidate's simulation diverges, so a search
    treats such plants as arbitrarily bad rather than failing.
    """
    return _raw_quality(candidate.coeffs, candidate.orders, data)


@dataclass(frozen=True)
class IdentProblem:
    """Search-space description for a fit.

    The parameter vector is [a_0..a_n, beta_0..beta_n].  free_mask marks
    the entries the search may move; the rest stay at initial_guess.
    bounds' rows are (lower, upper) per parameter and only constrain free
    entries.
    """

    term_count: int
    free_mask: np.ndarray
    bounds: np.ndarray
    initial_guess: np.ndarray

    def __post_init__(self):
        m = 2 * self.term_count
        if self.term_count < 1:
            raise ValueError("term_count must be at least 1")
        mask = np.asarray(self.free_mask, dtype=bool)
        bounds = np.asarray(self.bounds, dtype=float)
        guess = np.asarray(self.initial_guess, dtype=float)
        if mask.shape != (m,):
            raise ValueError(f"free_mask must have {m} entries")
        if bounds.shape != (m, 2):
            raise ValueError(f"bounds must have shape ({m}, 2)")
        if guess.shape != (m,):
            raise ValueError(f"initial_guess must have {m} entries")
        if not mask.any():
            raise ValueError("at least one parameter must be free")
        lo, hi = bounds[mask, 0], bounds[mask, 1]
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("bounds of free parameters must be finite")
        if np.any(lo >= hi):
            raise ValueError("bounds of free parameters must satisfy lower < upper")
        if np.any(guess[mask] < lo) or np.any(guess[mask] > hi):
            raise ValueError("initial_guess must lie within the bounds")
        # the guess must itself be a valid plant
        FractionalPlant(guess[:self.term_count], guess[self.term_count:])
        for arr in (mask, bounds, guess):
            arr.setflags(write=False)
        object.__setattr__(self, "free_mask", mask)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "initial_guess", guess)

    @property
    def names(self) -> tuple[str, ...]:
        n = self.term_count
        return tuple([f"a{i}" for i in range(n)] + [f"beta{i}" for i in range(n)])

    @classmethod
    def from_plant(cls, plant: FractionalPlant, free, bounds) -> "IdentProblem":
        """Build a problem around a guess plant.

        free lists parameter names ("a0".."an", "beta0".."betan"); bounds
        maps each free name to its (lower, upper) interval.
        """
        n = plant.term_count
        guess = np.concatenate([plant.coeffs, plant.orders])
        names = [f"a{i}" for i in range(n)] + [f"beta{i}" for i in range(n)]
        index = {name: i for i, name in enumerate(names)}
        mask = np.zeros(2 * n, dtype=bool)
        box = np.column_stack([guess, guess]).astype(float)
        for name in free:
            if name not in index:
                raise ValueError(f"unknown parameter name {name!r}")
            if name not in bounds:
                raise ValueError(f"missing bounds for free parameter {name!r}")
            lo, hi = bounds[name]
            mask[index[name]] = True
            box[index[name]] = (lo, hi)
        return cls(n, mask, box, guess)


@dataclass(frozen=True)
class IdentResult:
    """Best plant found, its quality and search diagnostics.

    history records the best quality value after each objective
    evaluation; converged is False when the search stopped on the
    evaluation budget instead of simplex collapse.
    """

    plant: FractionalPlant
    q: float
    evaluations: int
    converged: bool
    history: np.ndarray


def identify(data: MeasuredResponse, problem: IdentProblem,
             budget: int = 2000, xatol: float = 1e-6) -> IdentResult:
    """Fit the free parameters to the measured response.

    Runs Nelder-Mead in [0, 1]-scaled box coordinates until the simplex
    spread falls below xatol or the evaluation budget runs out.  The
    returned plant is the best strictly-feasible candidate encountered,
    so its orders always satisfy the ordering constraint.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    n = problem.term_count
    mask = problem.free_mask
    lo = problem.bounds[mask, 0]
    span = problem.bounds[mask, 1] - lo
    template = problem.initial_guess.copy()

    evaluations = 0
    history: list[float] = []
    best_q = math.inf
    best_params = template.copy()

    def penalized(scaled: np.ndarray) -> float:
        nonlocal evaluations, best_q, best_params
        full = template.copy()
        full[mask] = lo + np.clip(scaled, 0.0, 1.0) * span
        coeffs, orders = full[:n], full[n:]
        violation = float(np.sum(np.maximum(0.0, -np.diff(orders, prepend=0.0))))
        q = _raw_quality(coeffs, orders, data)
        value = q if violation == 0.0 else q + 1e6 * violation ** 2
        feasible = (np.all(np.diff(orders) > 0) and orders[0] >= 0
                    and coeffs[-1] != 0)
        if feasible and q < best_q:
            best_q = q
            best_params = full.copy()
        evaluations += 1
        history.append(best_q)
        return value

    m = int(mask.sum())
    x0 = (problem.initial_guess[mask] - lo) / span
    result = minimize(penalized, x0, method="Nelder-Mead",
                      bounds=Bounds(np.zeros(m), np.ones(m)),
                      options={"maxfev": budget, "maxiter": 10 ** 9,
                               "xatol": xatol, "fatol": math.inf})
    converged = result.status == 0
    log.debug("identification finished: q=%.3e evaluations=%d converged=%s",
              best_q, evaluations, converged)
    fitted = FractionalPlant(best_params[:n], best_params[n:])
    return IdentResult(fitted, best_q, evaluations, converged,
                       np.asarray(history))
