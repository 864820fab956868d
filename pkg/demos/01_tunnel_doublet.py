"""A macroscopic tunnel doublet.

At N = 370 and Gamma/J = 0.95 the two lowest Dicke-sector states are the
even and odd combinations of the two ferromagnetic wells. Their splitting
sets every timescale in the later demos, and the sign observable sgn(Jz)
connects them with a matrix element close to one.
"""
from lmg_lab import BENCHMARK, eigenbasis_element, jz2_expectation, m0_weight, sign_observable, solve
from lmg_lab.semiclassics import coherent_overlap, order_parameter

spec = solve(BENCHMARK)
q = sign_observable(BENCHMARK.n_spins)

print(f"tunnel splitting       {spec.delta_e * BENCHMARK.j_phys:9.2f} rad/s")
print(f"next gap / splitting   {spec.gap_ratio(2):9.2f}")
print(f"|<1|sgn Jz|0>|^2       {eigenbasis_element(spec, q, 0, 1) ** 2:9.4f}")
print(f"<3|sgn Jz|0>^2         {eigenbasis_element(spec, q, 3, 0) ** 2:9.4f}")
print(f"weight on m = 0        {100 * m0_weight(spec):9.4f} %")

# The doublet sits near |m| = N m*/2, far from the paramagnetic centre.
m_star = order_parameter(BENCHMARK.gamma_ratio)
print(f"N m*/2 squared         {(BENCHMARK.n_spins * m_star / 2) ** 2:9.1f}")
print(f"<Jz^2> in E0 and E1    {jz2_expectation(spec, 0):9.1f} {jz2_expectation(spec, 1):9.1f}")

# Two mean-field coherent states pointing into opposite wells barely overlap,
# which is why the doublet counts as macroscopically distinct.
print(f"coherent-state overlap {coherent_overlap(BENCHMARK.n_spins, BENCHMARK.gamma_ratio):9.2e}")
