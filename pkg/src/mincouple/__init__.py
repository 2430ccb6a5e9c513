"""Minimal-coupling model of dissipative quantum systems.

Transforms between coupling functions and memory kernels, mean dynamics
with memory, energy balance, transition rates, two-level decay, damped
field modes and an exact discrete-bath oracle.
"""
from .bath_model import (NATURAL, BathSpec, BoxKernel, CouplingFunction, ExponentialKernel,
                         Geometry, KernelCoupling, MemoryKernel, PhysConsts, StepKernel,
                         TabulatedCoupling, TabulatedKernel, box_coupling,
                         coupling_from_susceptibility, exponential_coupling, kernel_laplace,
                         load_tabulated, noise_correlation, ohmic_step,
                         susceptibility_from_coupling, validate_passivity)
from .discrete_bath_oracle import (DiscreteBath, OracleConfig, discretize_bath, evolve_exact,
                                   evolve_observables, fock_state, measure_rate, run_oracle)
from .energy_balance import EnergyReport, energy_report, energy_sweep, scalar_bath_energy
from .errors import *  # noqa: F401,F403
from .field_modes import (ScalarFieldParams, VectorModeParams, green_function, green_poles,
                          mode_solution, static_green, vector_mode_reduce)
from .memory_dynamics import (OscillatorSystem, Trajectory, analytic_underdamped, evolve_mean,
                              laplace_solution, talbot_trajectory)
from .transitions import RateReport, rate_vacuum_down, rates_excited_env, rates_thermal
from .two_level import TwoLevelParams, decay_constant, frequency_shift, markov_check

__version__ = "0.1.0"
