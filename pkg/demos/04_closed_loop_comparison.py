"""
Closed-loop comparison: fractional PD^delta versus integer PD.

Runs both designed controllers against the actual fractional plant and
compares the transient quality figures.  The integer design was tuned on
an approximate model, so its overshoot and settling are visibly worse even
though both loops are stable.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from fracctl import (FoPidController, FractionalPlant, LoopConfig, TimeGrid,
                     compute_metrics, simulate_closed_loop)

OUT = pathlib.Path(__file__).parent / "output"

PLANT = FractionalPlant([1.0, 0.5, 0.8], [0.0, 0.9, 2.2])
CONTROLLERS = {
    "fractional": FoPidController(20.5, td=5.79, delta=0.95),
    "integer": FoPidController(20.5, td=2.7343, delta=1.0),
}


def main():
    grid = TimeGrid(0.005, 10.0)
    traces = {}
    print(f"{'design':12s} {'E_t [%]':>9s} {'T_r [s]':>9s} {'P_r [%]':>9s}")
    for name, ctrl in CONTROLLERS.items():
        trace = simulate_closed_loop(LoopConfig(PLANT, ctrl, grid))
        m = compute_metrics(trace)
        traces[name] = trace
        print(f"{name:12s} {m.static_deviation:9.3f}"
              f" {m.control_time:9.3f} {m.overshoot:9.3f}")

    OUT.mkdir(exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, trace in traces.items():
        ax.plot(trace.t, trace.y, label=name)
        np.savetxt(OUT / f"loop_{name}.csv",
                   np.column_stack([trace.t, trace.w, trace.u, trace.y]),
                   delimiter=",", header="t,w,u,y", comments="", fmt="%.12g")
    ax.plot(traces["integer"].t, traces["integer"].w, "k:", linewidth=0.8,
            label="setpoint")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("y(t)")
    ax.legend()
    ax.grid(True)
    fig.savefig(OUT / "loop_comparison.png", dpi=120)
    print(f"\nwrote traces and {OUT / 'loop_comparison.png'}")


if __name__ == "__main__":
    main()
