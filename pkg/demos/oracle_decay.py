"""Exact evolution with a finite bath versus the golden-rule rates.

A single excitation leaks into 512 discrete modes.  The fitted decay rate is
compared with beta/m, and a thermal bath is used to look at detailed balance.
"""
import numpy as np

import mincouple as mc
from mincouple import discrete_bath_oracle as ob
from mincouple import transitions as tr

beta = 0.01
cfg = mc.OracleConfig(N=512, window=(0.2, 3.0), t_grid=(0.0, 500.0, 5001), beta=beta,
                      fit_window=(20.0, 200.0), fit_method="log")
res = mc.run_oracle(cfg, mc.ohmic_step(beta))
print(f"fitted rate {res.fit.rate:.6f}  golden rule {beta}  energy drift {res.energy_drift:.1e}")
print(f"bath energy at t = 500: {res.rows[-1][3]:.4f} (initial quantum: 1)")
print(f"recurrence time of the discrete bath: {res.bath.recurrence_time:.0f}")

# Thermal bath: early-time slopes of the down and up probabilities.
weak = mc.ohmic_step(1e-4)
bath = mc.discretize_bath(weak, (0.2, 3.0), 512, 1.0)
t = np.linspace(10.0, 60.0, 26)
for x in (0.5, 1.0, 2.0):
    pr = ob.thermal_transition_probabilities(bath, 1.0, 1, 1.0 / x, t)
    ratio = np.polyfit(t, pr["down"], 1)[0] / np.polyfit(t, pr["up"], 1)[0]
    rep = tr.rates_thermal(1, 1.0 / x, 1.0, 1.0, weak)
    print(f"x = {x}: oracle down/up = {ratio:.4f}  formula = {rep.gamma_down / rep.gamma_up:.4f}")
