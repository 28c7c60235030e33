"""
Plant identification from a noisy step response.

Generates a measured-looking record by simulating the fractional plant and
adding Gaussian noise, then recovers the four unknown parameters (both
gains and both orders above the static term) with the bounded simplex
search.  Also writes the record to demos/output/measured.csv so the same
fit can be reproduced through the command-line front end.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from fracctl import (FractionalPlant, IdentProblem, MeasuredResponse,
                     TimeGrid, identify, simulate_plant)

OUT = pathlib.Path(__file__).parent / "output"

TRUE_PLANT = FractionalPlant([1.0, 0.5, 0.8], [0.0, 0.9, 2.2])


def main():
    grid = TimeGrid(0.05, 10.0)
    t = grid.times()
    clean = simulate_plant(TRUE_PLANT, np.ones(grid.n_steps + 1), grid)
    rng = np.random.default_rng(7)
    measured = clean + rng.normal(0.0, 0.005, clean.shape)
    measured[0] = 0.0

    OUT.mkdir(exist_ok=True)
    np.savetxt(OUT / "measured.csv", np.column_stack([t, measured]),
               delimiter=",", header="t,y", comments="", fmt="%.12g")

    guess = FractionalPlant([1.0, 0.65, 0.6], [0.0, 0.8, 2.0])
    problem = IdentProblem.from_plant(
        guess, ["a1", "a2", "beta1", "beta2"],
        {"a1": (0.1, 2.0), "a2": (0.1, 2.0),
         "beta1": (0.3, 1.6), "beta2": (1.7, 2.8)})
    result = identify(MeasuredResponse(t, measured), problem)

    print(f"Q = {result.q:.3e} after {result.evaluations} evaluations,"
          f" converged: {result.converged}")
    print(f"{'param':7s} {'true':>8s} {'fitted':>10s} {'rel err':>9s}")
    free_names = [n for n, f in zip(problem.names, problem.free_mask) if f]
    truth = [0.5, 0.8, 0.9, 2.2]
    fitted = [result.plant.coeffs[1], result.plant.coeffs[2],
              result.plant.orders[1], result.plant.orders[2]]
    for name, a, b in zip(free_names, truth, fitted):
        print(f"{name:7s} {a:8.4f} {b:10.6f} {abs(b - a) / a:9.2e}")

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, measured, ".", markersize=2, alpha=0.5, label="measured")
    ax.plot(t, simulate_plant(result.plant, np.ones(grid.n_steps + 1), grid),
            label="fitted model")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("y(t)")
    ax.legend()
    ax.grid(True)
    fig.savefig(OUT / "identification.png", dpi=120)
    print(f"\nwrote {OUT / 'measured.csv'} and {OUT / 'identification.png'}")


if __name__ == "__main__":
    main()
