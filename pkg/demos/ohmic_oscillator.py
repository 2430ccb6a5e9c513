"""A particle in an Ohmic bath: memory kernel, mean motion and where the energy goes.

Run with ``python demos/ohmic_oscillator.py``.
"""
import numpy as np

import mincouple as mc

beta, m, w0 = 0.2, 1.0, 1.0

# The Ohmic coupling |f|^2 ~ 1/w^3 produces a constant susceptibility.
f = mc.ohmic_step(beta)
t = np.array([0.01, 1.0, 100.0])
print("chi(t) from the coupling:", mc.susceptibility_from_coupling(f, mc.Geometry.ONE_D, t))

# Mean trajectory from the integro-differential solver against the closed form.
sys = mc.OscillatorSystem(m, w0, mc.StepKernel(beta), q0=1.0, p0=0.0)
traj = mc.evolve_mean(sys, 20.0, 1e-3, estimate_error=True)
q_exact, _ = mc.analytic_underdamped(sys, traj.t)
print(f"max |q - q_exact| over [0, 20]: {np.max(np.abs(traj.q - q_exact)):.2e}"
      f" (self-estimate {traj.metadata['error_estimate']:.2e})")

# The mean energy only ever goes down.
print("energy at t = 0, 10, 20:", traj.E[[0, 10_000, 20_000]])

# In the long run the bath holds exactly the initial energy (n + 1/2) hbar w0.
for n in (0, 1, 3):
    rep = mc.energy_report(n, m, beta, w0)
    print(f"n={n}: E_init={rep.E_system_initial:.6f}  E_bath={rep.E_bath_asymptotic:.12f}")

# A memory kernel with finite relaxation time, integrated the same way.
sys_exp = mc.OscillatorSystem(m, w0, mc.ExponentialKernel(0.3, 2.0), q0=1.0)
q_exp = mc.evolve_mean(sys_exp, 20.0, 1e-3).q
print("exponential kernel, q(20) =", q_exp[-1], " Talbot:", mc.talbot_trajectory(sys_exp, [20.0])[0])
# Talbot inversion needs more contour nodes as w0 t grows and gives up past w0 t ~ 27.
