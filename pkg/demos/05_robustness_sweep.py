"""How a fixed FOPID design degrades when the plant drifts.

The controller is tuned for nominal (L, T); real processes drift.  This
script re-simulates one balanced design over a grid of perturbed delay
and lag values and prints the resulting ITSE/ISDCO surfaces.  Oscillatory
plants (alpha > 1) lose performance noticeably faster than sluggish ones
under the same relative drift - worth knowing before deploying a design
tuned on a reduced-order model.

Run:  python demos/05_robustness_sweep.py
"""
import pathlib

import numpy as np

from lqrfopid import (
    DelayMethod,
    LqrDesignVars,
    NioptdPlant,
    Scenario,
    design_from_vars,
    robustness_sweep,
    write_sweep_csv,
)

OUT = pathlib.Path("demo_output")
OUT.mkdir(exist_ok=True)

CASES = {
    "oscillatory (alpha=1.5)": (
        NioptdPlant(K=1.0, L=0.5, T=2.0, alpha=1.5),
        LqrDesignVars(q1=0.643793, q2=0.02965, q3=0.062444, r=0.34342,
                      lam=1.133782, mu=0.449655),
        DelayMethod.HE,
    ),
    "sluggish (alpha=0.5)": (
        NioptdPlant(K=1.0, L=0.5, T=2.0, alpha=0.5),
        LqrDesignVars(q1=0.061832, q2=0.033902, q3=0.09303, r=0.873642,
                      lam=0.891239, mu=0.026349),
        DelayMethod.CAI,
    ),
}

scenario = Scenario(horizon=100.0, step_size=0.01)
for label, (plant, vars, method) in CASES.items():
    controller = design_from_vars(plant, vars, method)
    L_grid = plant.L * np.array([0.8, 1.0, 1.2])
    T_grid = plant.T * np.array([0.8, 1.0, 1.2])
    sweep = robustness_sweep(plant, controller, L_grid, T_grid, scenario)
    nominal = sweep.itse[1, 1]
    print(f"\n{label}: ITSE surface (rows: L x {L_grid.round(2).tolist()}, "
          f"cols: T x {T_grid.round(2).tolist()})")
    for i in range(3):
        print("   " + "  ".join(f"{sweep.itse[i, j]:8.4f}" for j in range(3)))
    worst = sweep.itse.max() / nominal
    print(f"   worst-case ITSE inflation within +-20% drift: {worst:.2f}x nominal")
    name = "osc" if plant.is_oscillatory else "slug"
    write_sweep_csv(OUT / f"sweep_{name}.csv", sweep)
    print(f"   wrote {OUT / f'sweep_{name}.csv'}")
