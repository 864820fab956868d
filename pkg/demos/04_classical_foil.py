"""What a classical bistable magnet would do instead.

An overdamped Langevin particle on the mean-field free energy f(m) also has
two wells, but it hops by thermal activation over the barrier. At the
benchmark parameters that takes minutes, so a sweep lasting milliseconds
never switches. At desk scale (a few k_B T of barrier) the hopping becomes
observable and follows the Kramers law.
"""
import math
import warnings

from lmg_lab import BENCHMARK, ModelParams
from lmg_lab.classical import LangevinConfig, classical_p_error, mfpt_estimate, temperature_for_exponent
from lmg_lab.semiclassics import barrier, kramers_time

b = barrier(BENCHMARK)
tk = kramers_time(BENCHMARK, mode="attempt_period")
print(f"benchmark barrier N df0/kT = {b.exponent:.2f}, Kramers time ~ {tk.time_s:.0f} s")
print(f"classical error after a 1 ms sweep: {classical_p_error(1e-3, BENCHMARK):.2f}")

print("\ndesk scale, N = 20, Gamma/J = 0.9")
for exponent in (3.0, 4.5, 6.0):
    temp = temperature_for_exponent(20, 0.9, exponent)
    res = mfpt_estimate(LangevinConfig(20, 0.9, temp, n_paths=300, seed=1))
    print(f"  barrier {exponent:.1f} kT  T = {temp:6.3f} nK  MFPT = {res.mean:9.1f} +- {res.stderr:6.1f} /J"
          f"  MFPT/Kramers {res.mean_s / res.kramers_s:.2f}")

params = ModelParams(20, 0.9, temp_nK=temperature_for_exponent(20, 0.9, 3.0))
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    for tau in (0.001, 0.01, 0.1):
        tau_q = tau * kramers_time(params, mode="full").time_s
        p = classical_p_error(tau_q, params, delta_h=0.05, n_paths=200, seed=2)
        print(f"  sweep of {tau:5.3f} tau_K: wrong-well fraction {p:.2f}")
print(f"  (exp(3) = {math.exp(3):.1f} sets the MFPT ratio between barriers 3 and 6 kT)")
