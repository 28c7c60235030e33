"""
Dominant-root placement for a PD^delta controller.

Places the dominant closed-loop root pair at -S_t +/- j S_t/T_l for two
plants sharing the same specification: the three-term fractional plant and
its integer-order approximation.  The integer case should come back with
delta very close to 1 (a plain PD design), the fractional case does not.
"""

from fracctl import (FractionalPlant, min_gain, poles_from_measures,
                     solve_controller_params, verify_stability)

PLANTS = {
    "fractional": FractionalPlant([1.0, 0.5, 0.8], [0.0, 0.9, 2.2]),
    "integer": FractionalPlant([1.0, 0.2313, 0.7414], [0.0, 1.0, 2.0]),
}


def main():
    stability, damping = 2.0, 0.4
    deviation_pct = 100.0 / 21.5
    spec = poles_from_measures(stability, damping)
    print(f"target dominant poles: {spec.poles[0]:.3f}, {spec.poles[1]:.3f}")

    for name, plant in PLANTS.items():
        gain = min_gain(deviation_pct, plant.coeffs[0])
        result = solve_controller_params(plant, gain, spec)
        ctrl = result.controller
        report = verify_stability(plant, ctrl)
        print(f"\n{name} plant, K = {gain:g} "
              f"(static deviation {deviation_pct:.3f}%)")
        print(f"  Td = {ctrl.td:.6f}  delta = {ctrl.delta:.6f}"
              f"  ({result.iterations} Newton steps,"
              f" residual {result.residuals[-1]:.1e})")
        print(f"  dominance verified: {result.dominance_verified}")
        print(f"  stable: {report.stable},"
              f" rightmost root {report.rightmost_root:.4f}")


if __name__ == "__main__":
    main()
