"""Controller synthesis by dominant root placement.

Given stability and damping measures, the target roots of the closed
loop's characteristic function are fixed and the two free controller
parameters of the chosen mode are solved by a damped-free 2x2 Newton
iteration on the complex residual.  Complex powers use the principal
branch throughout.  A grid-seeded root search over a region of the
principal sheet backs the dominance and stability checks.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .controller import FoPidController
from .plant import FractionalPlant

__all__ = [
    "SynthesisConvergenceError",
    "NonPhysicalSolutionError",
    "DominantPoleSpec",
    "SynthesisMode",
    "SynthesisResult",
    "StabilityReport",
    "poles_from_measures",
    "min_gain",
    "char_residual",
    "solve_controller_params",
    "find_dominant_roots",
    "verify_stability",
]


class SynthesisConvergenceError(RuntimeError):
    """The Newton iteration did not reach the residual tolerance.

    Carries the last iterate in ``last_params`` and its residual
    magnitude in ``residual``.
    """

    def __init__(self, message: str, last_params=None, residual=math.nan):
        super().__init__(message)
        self.last_params = last_params
        self.residual = residual


class NonPhysicalSolutionError(RuntimeError):
    """The iteration converged to parameters outside the physical range."""

    def __init__(self, message: str, params=None):
        super().__init__(message)
        self.params = params


@dataclass(frozen=True)
class DominantPoleSpec:
    """Target dominant root pair from stability and damping measures.

    stability_measure : distance of the pair from the imaginary axis.
    damping_measure : ratio of that distance to the imaginary part.
    """

    stability_measure: float
    damping_measure: float

    def __post_init__(self):
        if not self.stability_measure > 0:
            raise ValueError("stability_measure must be positive for a stable target")
        if not self.damping_measure > 0:
            raise ValueError("damping_measure must be positive")

    @property
    def poles(self) -> tuple[complex, complex]:
        p = complex(-self.stability_measure,
                    self.stability_measure / self.damping_measure)
        return p, p.conjugate()


def poles_from_measures(stability_measure: float,
                        damping_measure: float) -> DominantPoleSpec:
    """Build the dominant root specification -S_t +/- i*S_t/T_l."""
    return DominantPoleSpec(stability_measure, damping_measure)


def min_gain(deviation_limit: float, a0: float) -> float:
    """Smallest proportional gain holding the static deviation at the limit.

    A proportional loop settles at a0/(a0 + K) of the setpoint, so
    keeping the percent deviation at ``deviation_limit`` needs
    K = 100/deviation_limit - a0.  Clamped at zero.
    """
    if not deviation_limit > 0:
        raise ValueError("deviation_limit must be positive")
    return max(100.0 / deviation_limit - a0, 0.0)


class SynthesisMode(enum.Enum):
    """Which controller parameter pair the solver adjusts."""

    PD_DELTA = "pd_delta"
    PI_LAMBDA = "pi_lambda"
    PID_FIXED_LAMBDA = "pid_fixed_lambda"


@dataclass(frozen=True)
class SynthesisResult:
    """Solved controller plus convergence and dominance diagnostics.

    residuals holds the characteristic residual magnitudes at the target
    root and its conjugate; rightmost_root is the rightmost root found in
    the verification region (None when the region holds no roots).
    """

    controller: FoPidController
    residuals: tuple[float, float]
    iterations: int
    dominance_verified: bool
    rightmost_root: complex | None


class StabilityReport(NamedTuple):
    """Outcome of a root search over a region touching the imaginary axis."""

    stable: bool
    rightmost_root: complex | None


def _char_value(plant: FractionalPlant, controller: FoPidController, p):
    """Closed-loop characteristic function at complex p, elementwise."""
    p = np.asarray(p, dtype=complex)
    total = np.zeros_like(p)
    for a, b in zip(plant.coeffs, plant.orders):
        total = total + a * p ** b
    total = total + controller.gain
    if controller.ti != 0.0:
        total = total + controller.ti * p ** (-controller.lam)
    if controller.td != 0.0:
        total = total + controller.td * p ** controller.delta
    return total


def _char_slope(plant: FractionalPlant, controller: FoPidController, p):
    """Derivative of the characteristic function with respect to p."""
    p = np.asarray(p, dtype=complex)
    total = np.zeros_like(p)
    for a, b in zip(plant.coeffs, plant.orders):
        if b != 0.0:
            total = total + a * b * p ** (b - 1.0)
    if controller.ti != 0.0 and controller.lam != 0.0:
        total = total - controller.ti * controller.lam * p ** (-controller.lam - 1.0)
    if controller.td != 0.0 and controller.delta != 0.0:
        total = total + controller.td * controller.delta * p ** (controller.delta - 1.0)
    return total


def char_residual(plant: FractionalPlant, controller: FoPidController,
                  p: complex) -> complex:
    """Characteristic function value at p; zero exactly at a closed-loop root."""
    p = complex(p)
    if p == 0 and controller.ti != 0.0 and controller.lam > 0:
        raise ValueError("characteristic function has a pole at p=0 "
                         "when integral action is present")
    return complex(_char_value(plant, controller, p))


def _integer_envelope(plant: FractionalPlant, p: complex) -> complex:
    # nearest integer-order surrogate, used only to seed the iteration
    total = 0.0 + 0.0j
    for a, b in zip(plant.coeffs, plant.orders):
        total += a * p ** round(b)
    return total


def solve_controller_params(plant: FractionalPlant, gain: float,
                            pole_spec: DominantPoleSpec,
                            mode: SynthesisMode = SynthesisMode.PD_DELTA,
                            tol: float = 1e-10, max_iter: int = 100, *,
                            fixed_ti: float = 0.0, fixed_lam: float = 0.0,
                            region: tuple | None = None,
                            grid_density: int = 40) -> SynthesisResult:
    """Place the dominant roots by solving for two controller parameters.

    The residual at the target root is driven to |F| <= tol by Newton
    steps on the parameter pair of the chosen mode; the conjugate root is
    satisfied automatically by conjugate symmetry.  Converged parameters
    outside the physical range (gain factor <= 0 or order outside (0, 2))
    raise NonPhysicalSolutionError; a stalled iteration raises
    SynthesisConvergenceError.  Dominance is then verified by a root
    search over ``region`` (default: 20 target-widths into the left
    half-plane).
    """
    p = pole_spec.poles[0]
    log_p = cmath.log(p)
    if mode is SynthesisMode.PI_LAMBDA:
        def build(x):
            return FoPidController(gain, ti=x[0], lam=x[1])

        def jacobian(ctrl, x):
            d_gain = p ** (-x[1])
            d_order = -x[0] * d_gain * log_p
            return d_gain, d_order

        seed = -(_integer_envelope(plant, p) + gain) * p
        x = np.array([max(seed.real, 1e-3), 1.0])
        names = ("ti", "lam")
    else:
        if mode is SynthesisMode.PID_FIXED_LAMBDA:
            base_ti, base_lam = fixed_ti, fixed_lam
        else:
            base_ti, base_lam = 0.0, 0.0

        def build(x):
            return FoPidController(gain, ti=base_ti, lam=base_lam,
                                   td=x[0], delta=x[1])

        def jacobian(ctrl, x):
            d_gain = p ** x[1]
            d_order = x[0] * d_gain * log_p
            return d_gain, d_order

        seed = -(_integer_envelope(plant, p) + gain)
        if base_ti != 0.0:
            seed -= base_ti * p ** (-base_lam)
        seed /= p
        x = np.array([max(seed.real, 1e-3), 1.0])
        names = ("td", "delta")

    iterations = 0
    residual = math.inf
    for i in range(max_iter):
        ctrl = build(x)
        value = char_residual(plant, ctrl, p)
        residual = abs(value)
        iterations = i
        if residual <= tol:
            break
        d_gain, d_order = jacobian(ctrl, x)
        jac = np.array([[d_gain.real, d_order.real],
                        [d_gain.imag, d_order.imag]])
        try:
            step = np.linalg.solve(jac, [-value.real, -value.imag])
        except np.linalg.LinAlgError:
            raise SynthesisConvergenceError(
                "singular Jacobian during parameter iteration",
                last_params=dict(zip(names, x)), residual=residual) from None
        x = x + step
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e8:
            raise SynthesisConvergenceError(
                "parameter iteration diverged",
                last_params=dict(zip(names, x)), residual=residual)
    else:
        raise SynthesisConvergenceError(
            f"no convergence within {max_iter} iterations "
            f"(residual {residual:.3g})",
            last_params=dict(zip(names, x)), residual=residual)

    if x[0] <= 0 or not 0 < x[1] < 2:
        raise NonPhysicalSolutionError(
            f"converged to non-physical parameters {names[0]}={x[0]:.6g}, "
            f"{names[1]}={x[1]:.6g}; expected {names[0]} > 0 and "
            f"{names[1]} in (0, 2)", params=dict(zip(names, x)))

    residuals = (abs(char_residual(plant, ctrl, p)),
                 abs(char_residual(plant, ctrl, p.conjugate())))
    if region is None:
        s, d = pole_spec.stability_measure, pole_spec.damping_measure
        region = (-20.0 * s, 0.0, 0.0, 20.0 * s / d)
    roots = find_dominant_roots(plant, ctrl, region, grid_density)
    dominance = bool(roots) and abs(roots[0] - p) <= 1e-6 * (1.0 + abs(p))
    rightmost = roots[0] if roots else None
    return SynthesisResult(ctrl, residuals, iterations, dominance, rightmost)


def find_dominant_roots(plant: FractionalPlant, controller: FoPidController,
                        region: tuple, grid_density: int = 40) -> list[complex]:
    """Roots of the characteristic function inside a rectangular region.

    ``region`` is (re_min, re_max, im_min, im_max) on the principal
    sheet.  A grid of grid_density x grid_density seeds is polished by
    Newton iteration; converged points are deduplicated, reflected to
    conjugates and sorted by decreasing real part.  Every returned root
    has residual magnitude below 1e-8.
    """
    re_min, re_max, im_min, im_max = (float(v) for v in region)
    if not (re_min < re_max and im_min < im_max):
        raise ValueError("region must have positive extent")
    if grid_density < 2:
        raise ValueError("grid_density must be at least 2")
    im_lo = max(im_min, 0.0)
    if im_lo >= im_max:
        raise ValueError("region must reach the upper half-plane")
    re_seeds = np.linspace(re_min, re_max, grid_density)
    im_seeds = np.linspace(im_lo, im_max, grid_density)
    seeds = (re_seeds[:, None] + 1j * im_seeds[None, :]).ravel()
    points = seeds[np.abs(seeds) > 1e-9]
    scale = 1.0 + max(abs(re_min), abs(re_max), abs(im_max))
    with np.errstate(all="ignore"):
        for _ in range(60):
            value = _char_value(plant, controller, points)
            slope = _char_slope(plant, controller, points)
            step = value / slope
            step[~np.isfinite(step)] = 0.0
            points = points - step
            points[np.abs(points) > 1e6 * scale] = np.nan
        final = np.abs(_char_value(plant, controller, points))
    good = np.isfinite(points) & np.isfinite(final) & (final < 1e-9)
    margin = 1e-9 * scale
    inside = (good
              & (points.real >= re_min - margin)
              & (points.real <= re_max + margin)
              & (points.imag >= im_lo - margin)
              & (points.imag <= im_max + margin))
    candidates = points[inside]
    roots: list[complex] = []
    for cand in sorted(candidates, key=lambda z: (z.real, z.imag)):
        if abs(cand.imag) < 1e-8:
            cand = complex(cand.real, 0.0)
        if all(abs(cand - r) > 1e-6 for r in roots):
            roots.append(complex(cand))
    full = []
    for r in roots:
        full.append(r)
        if r.imag > 0:
            full.append(r.conjugate())
    full.sort(key=lambda z: (-z.real, -z.imag))
    return full


def verify_stability(plant: FractionalPlant, controller: FoPidController,
                     region: tuple | None = None,
                     grid_density: int = 40) -> StabilityReport:
    """Search a region spanning the imaginary axis for unstable roots.

    Stable means no root with non-negative real part was found inside the
    region (default (-50, 5, 0, 50)).  The verdict only covers the
    searched region.
    """
    if region is None:
        region = (-50.0, 5.0, 0.0, 50.0)
    if region[1] < 0:
        raise ValueError("region must extend to the imaginary axis")
    roots = find_dominant_roots(plant, controller, region, grid_density)
    rightmost = roots[0] if roots else None
    stable = all(r.real < 0 for r in roots)
    return StabilityReport(stable, rightmost)
