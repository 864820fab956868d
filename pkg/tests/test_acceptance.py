"""Acceptance criteria 1-14, each at its stated tolerance.

Every test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion with the measured values underneath.
"""
import json
import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import cumulative_trapezoid

from lmg_lab import (
    BENCHMARK,
    ModelParams,
    Spectrum,
    build_superoperator,
    eigenbasis_element,
    jz2_expectation,
    k3_sequential,
    k3_stationary,
    m0_weight,
    propagate,
    sign_observable,
    solve,
    t2_phys,
    threshold_gamma,
    truncate,
)
from lmg_lab.classical import (
    LangevinConfig,
    boltzmann_density,
    mfpt_estimate,
    simulate_langevin,
    temperature_for_exponent,
)
from lmg_lab.cli import main as cli_main
from lmg_lab.semiclassics import (
    acf_linearization,
    barrier,
    goldilocks,
    hierarchy,
    instanton_action,
    kramers_time,
    macrorealist_bound,
    spinodal_field,
    sweep_window,
)

REFERENCE_GAMMAS = [0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0]
REFERENCE_K3_FIVE = [1.4294, 1.4156, 1.3889, 1.3167, 1.2180, 1.0798, 0.9922, 0.8947, 0.7950, 0.6712]
REFERENCE_K3_TEN = [1.4239, 1.4102, 1.3837, 1.3119, 1.2139, 1.0768, 0.9898, 0.8925, 0.7897, 0.6541]


def rel(a, b):
    return abs(a / b - 1.0)


@pytest.mark.criterion(1, "N=2 exact spectrum within 1e-10")
def test_c01_n2_spectrum(measured):
    ev = solve(ModelParams(2, 0.5)).eigenvalues
    want = np.array([(-1 - math.sqrt(5)) / 2, -1.0, (-1 + math.sqrt(5)) / 2])
    err = np.max(np.abs(ev - want))
    measured(f"eigenvalues {ev.round(12).tolist()}, max error {err:.1e}")
    assert err < 1e-10


@pytest.mark.criterion(2, "benchmark gap 1310 rad/s within 0.5%")
def test_c02_benchmark_gap(bench_spec, measured):
    gap = bench_spec.delta_e * BENCHMARK.j_phys
    measured(f"Delta E = {gap:.4f} rad/s")
    assert rel(gap, 1310.0) < 5e-3


@pytest.mark.criterion(3, "Q01^2, m0 weight and <Jz^2> of the ground doublet")
def test_c03_matrix_elements(bench_spec, measured):
    q = sign_observable(BENCHMARK.n_spins)
    q01 = eigenbasis_element(bench_spec, q, 0, 1) ** 2
    p0 = m0_weight(bench_spec)
    e0, e1 = jz2_expectation(bench_spec, 0), jz2_expectation(bench_spec, 1)
    measured(f"Q01^2={q01:.5f} m0={100 * p0:.4f}% <Jz^2>=({e0:.2f}, {e1:.2f})")
    assert rel(q01, 0.9436) < 2e-3
    assert rel(p0, 0.002374) < 2e-2
    assert rel(e0, 2574.2) < 5e-3
    assert rel(e1, 3103.7) < 5e-3


@pytest.mark.criterion(4, "reference five- and ten-level K3 within 0.5%")
def test_c04_reference_k3_grid(level_systems, measured):
    worst = 0.0
    for n, ref in ((5, REFERENCE_K3_FIVE), (10, REFERENCE_K3_TEN)):
        got = [k3_stationary(level_systems[n], g).k3 for g in REFERENCE_GAMMAS]
        errs = [rel(a, b) for a, b in zip(got, ref)]
        worst = max(worst, max(errs))
        measured(f"n={n}: " + " ".join(f"{v:.4f}" for v in got))
    measured(f"worst relative deviation {worst:.2e}")
    assert worst < 5e-3


@pytest.mark.criterion(5, "thresholds for n = 2, 3, 4, 5, 10 within 2%")
def test_c05_thresholds(level_systems, measured):
    ref = {2: 0.515, 3: 0.289, 4: 0.305, 5: 0.289, 10: 0.286}
    got = {n: threshold_gamma(level_systems[n]) for n in ref}
    measured("thresholds " + ", ".join(f"n={n}: {g:.5f}" for n, g in got.items()))
    for n in ref:
        assert rel(got[n], ref[n]) < 0.02, n


@pytest.mark.criterion(6, "sequential protocol K3 ~ 1.311, |C23 - C12| ~ 0.006")
def test_c06_sequential(level_systems, measured):
    rep = k3_sequential(level_systems[5], 0.05)
    diff = abs(rep.c23 - rep.c12)
    measured(f"K3={rep.k3:.5f} |C23-C12|={diff:.5f}")
    assert rel(rep.k3, 1.311) < 5e-3
    assert abs(diff - 0.006) <= 0.002


@pytest.mark.criterion(7, "T2_phys 7.04 ms and 1.22 ms within 2%")
def test_c07_t2_phys(bench_spec, measured):
    a, b = t2_phys(bench_spec, 0.05), t2_phys(bench_spec, 0.289)
    measured(f"T2(0.05)={a:.4f} ms, T2(0.289)={b:.4f} ms")
    assert rel(a, 7.04) < 0.02
    assert rel(b, 1.22) < 0.02


@pytest.mark.criterion(8, "hierarchy gamma_A, gamma_B and ratios")
def test_c08_hierarchy(bench_spec, level_systems, measured):
    gamma_c = threshold_gamma(level_systems[5])
    rep = hierarchy(BENCHMARK, bench_spec, gamma_c)
    measured(f"gamma_A={rep.gamma_a:.5f} gamma_B={rep.gamma_b:.5f} gamma_C={rep.gamma_c:.5f} "
             f"ratios {rep.ratio_ab:.3f}, {rep.ratio_bc:.3f}")
    assert rel(rep.gamma_a, 0.050) < 0.03
    assert rel(rep.gamma_b, 0.117) < 0.03
    assert rel(rep.ratio_ab, 2.35) < 0.05
    assert rel(rep.ratio_bc, 2.47) < 0.05
    assert rep.gamma_a < rep.gamma_b < rep.gamma_c


@pytest.mark.criterion(9, "instanton actions and Goldilocks N_c table")
def test_c09_instanton_table(measured):
    rows = {0.99: (0.000947, 972, 5521), 0.95: (0.010787, 87, 360), 0.90: (0.031255, 31, 105)}
    for g, (s_ref, nc_a, nc_r) in rows.items():
        s = instanton_action(g)
        row = goldilocks(g)
        measured(f"Gamma/J={g}: S={s:.6f} Nc_analytic={row.nc_analytic:.1f} Nc_root={row.nc_root:.1f}")
        assert abs(s - s_ref) < 1e-5
        assert rel(row.nc_analytic, nc_a) < 0.03
        assert rel(row.nc_root, nc_r) < 0.03


@pytest.mark.criterion(10, "spinodal field and sweep window")
def test_c10_spinodal(measured):
    sp = spinodal_field(0.95, BENCHMARK.j_phys)
    lo, hi = sweep_window(BENCHMARK)
    measured(f"h_sp={sp.h_sp_rad_s:.2f} rad/s, window [{lo:.3f}, {hi:.2f}] rad/s")
    assert rel(sp.h_sp_rad_s, 229.0) < 0.01
    assert rel(lo, 11.0) < 0.05


@pytest.mark.criterion(11, "barrier exponent 13.1 and attempt-period Kramers time 130 s")
def test_c11_barrier_kramers(measured):
    b = barrier(BENCHMARK)
    tk = kramers_time(BENCHMARK, mode="attempt_period")
    measured(f"N df0/kT={b.exponent:.4f}, df0={b.delta_f0_rad_s:.3f} rad/s, tau_K={tk.time_s:.1f} s")
    assert rel(b.exponent, 13.1) < 0.02
    assert rel(tk.time_s, 130.0) < 0.10


@pytest.mark.criterion(12, "linearised ACF eigenvalues at J=1, Gamma=0.5")
def test_c12_acf(measured):
    modes = acf_linearization(1.0, 0.5, gamma1=0.01, gamma2=0.1)
    ev = sorted(modes.eigenvalues, key=lambda z: (round(z.real, 6), z.imag))
    want = sorted([-0.1 - 1.7320508j, -0.1 + 1.7320508j, -0.01 + 0j],
                  key=lambda z: (round(z.real, 6), z.imag))
    measured("eigenvalues " + ", ".join(f"{z.real:+.5f}{z.imag:+.5f}i" for z in ev))
    assert max(abs(a - b) for a, b in zip(ev, want)) < 1e-4


@pytest.mark.criterion(13, "Goldilocks scan and dDeltaE/dN from the CLI")
def test_c13_goldilocks_scan(tmp_path, measured):
    out = tmp_path / "scan.json"
    code = cli_main(["goldilocks", "--n-min", "200", "--n-max", "400", "--step", "50",
                     "--temp-nk", "10", "--include", "370", "--derivative",
                     "--format", "json", "--output", str(out)])
    assert code == 0
    rows = {r["n_spins"]: r for r in json.loads(out.read_text())["rows"]}
    d250, d300, d370 = (rows[n]["delta_e_rad_s"] for n in (250, 300, 370))
    deriv = rows[370]["d_delta_e_dn"]
    measured(f"Delta E(250)={d250:.1f} Delta E(300)={d300:.1f} Delta E(370)={d370:.1f} "
             f"dDeltaE/dN(370)={deriv:.4f}")
    assert rel(d250, 3338.0) < 0.01
    assert rel(d300, 2299.0) < 0.01
    assert rel(d370, 1310.0) < 0.01
    assert rel(deriv, -10.95) < 0.05


# ---------------------------------------------------------------- criterion 14

@pytest.mark.criterion(14, "property suite")
def test_c14_parity_zeros(bench_spec):
    q = sign_observable(BENCHMARK.n_spins)
    for k in range(10):
        assert abs(eigenbasis_element(bench_spec, bench_spec.m_grid, k, k)) < 1e-8
    for k in (2, 4):
        assert abs(eigenbasis_element(bench_spec, q, k, 0)) < 1e-8


@pytest.mark.criterion(14, "property suite")
def test_c14_trace_preservation(level_systems):
    rng = np.random.default_rng(2024)
    sys = level_systems[5]
    for _ in range(10):
        a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        gamma = rng.uniform(0, 1)
        out = propagate(build_superoperator(sys, gamma), rho, rng.uniform(0, 2 * sys.default_dt()))
        assert abs(np.trace(out) - 1) < 1e-9


@pytest.mark.criterion(14, "property suite")
def test_c14_thermal_mixture(level_systems):
    sys = level_systems[2]
    values = []
    for p in (0.0, 0.25, 0.731, 1.0):
        rho0 = np.diag([p, 1 - p]).astype(complex)
        values.append(k3_stationary(sys, 0.05, rho0=rho0).k3)
    assert max(values) - min(values) < 1e-6


@pytest.mark.criterion(14, "property suite")
def test_c14_gauge_invariance(bench_spec):
    rng = np.random.default_rng(99)
    q = sign_observable(BENCHMARK.n_spins)
    flips = rng.choice([-1.0, 1.0], size=bench_spec.eigenvectors.shape[1])
    flipped = Spectrum(bench_spec.eigenvalues, bench_spec.eigenvectors * flips, bench_spec.m_grid)
    for s in (bench_spec, flipped):
        assert rel(eigenbasis_element(s, q, 0, 1) ** 2,
                   eigenbasis_element(bench_spec, q, 0, 1) ** 2) < 1e-12
        assert rel(jz2_expectation(s, 1), jz2_expectation(bench_spec, 1)) < 1e-12
        assert m0_weight(s) == pytest.approx(m0_weight(bench_spec), rel=1e-12)
    k_ref = k3_stationary(truncate(bench_spec, q, 5), 0.1).k3
    k_flip = k3_stationary(truncate(flipped, q, 5), 0.1).k3
    assert abs(k_ref - k_flip) < 1e-10


@pytest.mark.criterion(14, "property suite")
def test_c14_macrorealist():
    b = macrorealist_bound()
    assert b.max_k3 == 1 and b.min_k3 == -3 and len(b.per_assignment) == 8


@pytest.mark.criterion(14, "property suite")
def test_c14_langevin_equilibrium(measured):
    temp = temperature_for_exponent(12, 0.9, 2.0)
    cfg = LangevinConfig(12, 0.9, temp, n_paths=2000, seed=11)
    final = simulate_langevin(cfg, 2000.0, record_every=40000).final
    grid = np.linspace(-1.0, 1.0, 20001)
    cdf = cumulative_trapezoid(boltzmann_density(grid, cfg), grid, initial=0.0)
    cdf /= cdf[-1]
    edges = np.interp(np.linspace(0, 1, 21), cdf, grid)
    edges[0], edges[-1] = -1.0, 1.0
    observed, _ = np.histogram(final, edges)
    chi2 = stats.chisquare(observed)
    measured(f"Langevin equilibrium chi-square p = {chi2.pvalue:.3f} (seed {cfg.seed})")
    assert chi2.pvalue > 0.01


@pytest.mark.criterion(14, "property suite")
def test_c14_mfpt_kramers_band(measured):
    temp = temperature_for_exponent(20, 0.9, 5.0)
    cfg = LangevinConfig(20, 0.9, temp, n_paths=200, seed=20240611)
    res = mfpt_estimate(cfg)
    ratio = res.mean_s / res.kramers_s
    measured(f"MFPT/Kramers at N=20, exponent 5: {ratio:.3f} (seed {res.seed})")
    assert 1 / 3 < ratio < 3
