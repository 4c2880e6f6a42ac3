"""Open-loop behavior of the NIOPTD process family.

The template K e^{-Ls} / (T s^alpha + 1) covers two qualitatively
different regimes with a single knob: alpha < 1 creeps toward the final
value with a power-law tail, alpha > 1 overshoots and rings.  This script
sweeps alpha for the benchmark parameters (K=1, L=0.5, T=2), writes the
step responses and a Bode magnitude table, and prints summary numbers.

Run:  python demos/01_open_loop_dynamics.py
"""
import pathlib

import numpy as np

from lqrfopid import NioptdPlant, frequency_response, simulate_open_loop_step

OUT = pathlib.Path("demo_output")
OUT.mkdir(exist_ok=True)

alphas = [0.5, 0.8, 1.0, 1.2, 1.5]
responses = {}
for alpha in alphas:
    plant = NioptdPlant(K=1.0, L=0.5, T=2.0, alpha=alpha)
    res = simulate_open_loop_step(plant, horizon=60.0, h=0.01)
    responses[alpha] = res
    overshoot = 100.0 * (res.y.max() - 1.0)
    label = "oscillatory" if plant.is_oscillatory else "sluggish/first-order"
    print(f"alpha={alpha:3.1f} ({label:>22s}): "
          f"y(60s)={res.y[-1]:6.3f}, overshoot={max(overshoot, 0.0):5.1f}%")

# one CSV with all responses, columns t,y_<alpha>
t = responses[alphas[0]].t
table = np.column_stack([t] + [responses[a].y for a in alphas])
header = "t," + ",".join(f"y_alpha_{a}" for a in alphas)
np.savetxt(OUT / "open_loop_steps.csv", table, delimiter=",",
           header=header, comments="", fmt="%.6g")
print(f"\nwrote {OUT / 'open_loop_steps.csv'}")

# Bode magnitude: the resonance appears as alpha crosses 1
w = np.logspace(-3, 3, 400)
mag_cols = []
for alpha in alphas:
    plant = NioptdPlant(K=1.0, L=0.5, T=2.0, alpha=alpha)
    mag_cols.append(20 * np.log10(np.abs(frequency_response(plant, w))))
    peak = float(np.max(np.abs(frequency_response(plant, w))))
    print(f"alpha={alpha:3.1f}: peak |G(jw)| = {peak:5.2f}"
          + ("  <- resonant" if peak > 1.001 else ""))
bode = np.column_stack([w] + mag_cols)
np.savetxt(OUT / "open_loop_bode.csv", bode, delimiter=",",
           header="omega," + ",".join(f"mag_db_alpha_{a}" for a in alphas),
           comments="", fmt="%.6g")
print(f"wrote {OUT / 'open_loop_bode.csv'}")
