"""Two-level decay in the two-field bath, and a damped string.

First the Markov decay constant and the Lamb-type shift of a two-level
system; then the Laplace-domain Green function of a damped scalar field.
"""
import math

import mincouple as mc
from mincouple import field_modes as fm

p = mc.TwoLevelParams(Omega0=1.0, x12_sq=1.0, f=mc.ohmic_step(0.1, mc.Geometry.THREE_D))
print("decay constant:", mc.decay_constant(p))
for t in (100.0, 1000.0, 5000.0):
    chk = mc.markov_check(p, t, (1e-3, 1e3))
    print(f"  time-averaged memory kernel at t={t:g}: {chk.beta_markov:.6f} (rel err {chk.rel_err:.1e})")
print("shift over [0.5, 1.5]:", mc.frequency_shift(p, (0.5, 1.5)),
      " closed form:", 0.1 * math.log(3) / (2 * math.pi))

field = mc.ScalarFieldParams(L=1.0, lam=1.0, mu=2.0, n_max=10_000)
g = mc.green_function(0.3, 0.7, 1e-10, field, mc.StepKernel(0.1))
print(f"G(0.3, 0.7; s->0) = {g.value.real:.6f}  static = {mc.static_green(0.3, 0.7, field):.6f}"
      f"  tail bound {g.tail_bound:.1e}")
for n in (1, 2, 3):
    lo, hi = mc.green_poles(field, n, 0.1)
    print(f"mode {n}: poles {hi:.6f}, {lo:.6f}")

vec = fm.vector_mode_reduce(mc.VectorModeParams(rho=1.0, omega0=1.0, alpha=0.36, beta=0.05))
print("vector mode reduces to an oscillator at frequency", vec.omega0)
