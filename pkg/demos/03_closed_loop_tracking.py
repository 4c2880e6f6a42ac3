"""Closed-loop tracking, control effort, and load-disturbance rejection.

Simulates the benchmark oscillatory plant under a delay-aware FOPID and
reports the two competing indices: ITSE (time-weighted squared tracking
error) and ISDCO (squared deviation of the control signal from its
steady-state value).  A step load disturbance is injected at the plant
input late in the run to show the loop absorbing it.

Two numerical paths are available; both are exercised here:
* "oustaloup" - band-limited rational realization, fast, the default;
* "gl"        - full-memory fractional convolution, the accuracy
                reference.

Run:  python demos/03_closed_loop_tracking.py
"""
import pathlib

import numpy as np

from lqrfopid import (
    DelayMethod,
    LqrDesignVars,
    NioptdPlant,
    Scenario,
    design_from_vars,
    simulate_closed_loop,
    write_trajectory_csv,
)

OUT = pathlib.Path("demo_output")
OUT.mkdir(exist_ok=True)

plant = NioptdPlant(K=1.0, L=0.5, T=2.0, alpha=1.5)
vars = LqrDesignVars(q1=0.643793, q2=0.02965, q3=0.062444, r=0.34342,
                     lam=1.133782, mu=0.449655)
controller = design_from_vars(plant, vars, DelayMethod.HE)
print(f"controller: kp={controller.kp:.4f} ki={controller.ki:.4f} "
      f"kd={controller.kd:.4f} lam={controller.lam:.4f} mu={controller.mu:.4f}\n")

scenario = Scenario(setpoint=1.0, horizon=100.0, step_size=0.01,
                    disturbance_time=70.0, disturbance_magnitude=0.1)

runs = [
    ("gl, full memory", dict(solver="gl")),
    ("oustaloup wide band", dict(solver="oustaloup")),
    ("oustaloup (1e-2,1e2)", dict(solver="oustaloup", band=(1e-2, 1e2))),
]
for label, kwargs in runs:
    res = simulate_closed_loop(plant, controller, scenario, **kwargs)
    peak = 100 * (res.y.max() - 1.0)
    settle = res.t[np.flatnonzero(np.abs(res.y - 1.0) > 0.02)]
    t_settle = float(settle[settle < 69.0].max()) if settle.size else 0.0
    print(f"[{label:>20s}] ITSE={res.itse:7.4f}  ISDCO={res.isdco:7.4f}  "
          f"overshoot={peak:4.1f}%  ~settled by t={t_settle:5.1f}s")
print("(ISDCO tracks the derivative-kick energy, which depends on the upper"
      "\n band edge; the narrow band reproduces the GL kick almost exactly)")

res = simulate_closed_loop(plant, controller, scenario)
dip = res.y[res.t > 70.0]
print(f"\ndisturbance at t=70: output perturbed to {dip.max():.3f} peak, "
      f"back within 2% by the horizon (y(100)={res.y[-1]:.4f})")
write_trajectory_csv(OUT / "closed_loop_trajectory.csv", res)
print(f"wrote {OUT / 'closed_loop_trajectory.csv'} (t,y,u,x1,x2,x3)")
