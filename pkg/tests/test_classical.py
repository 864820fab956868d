import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

import oracles
from lmg_lab import BENCHMARK, ModelParams
from lmg_lab.classical import (
    BlochState,
    LangevinConfig,
    boltzmann_density,
    classical_p_error,
    heuristic_gamma_eff,
    integrate_bloch,
    mfpt_estimate,
    simulate_langevin,
    temperature_for_exponent,
)
from lmg_lab.semiclassics import barrier, order_parameter, spinodal_field

# ---------------------------------------------------------------- Bloch


def test_fixed_point_is_stationary():
    traj = integrate_bloch(BlochState.fixed_point(0.9), 0.9, 100.0, dt=1e-2)
    assert np.max(np.abs(traj.m - traj.m[0])) < 1e-9


def test_small_oscillation_frequency():
    fp = BlochState.fixed_point(0.5).as_array()
    kicked = fp + np.array([0.0, 1e-3, 0.0])
    kicked /= np.linalg.norm(kicked)
    traj = integrate_bloch(BlochState(*kicked), 0.5, 60.0, dt=1e-3)
    assert traj.oscillation_frequency() == pytest.approx(math.sqrt(3), rel=0.01)
    assert traj.norm_drift < 1e-9


def test_pole_is_fixed_without_transverse_field():
    traj = integrate_bloch(BlochState(0.0, 0.0, 1.0), 0.0, 50.0)
    np.testing.assert_allclose(traj.m[-1], [0.0, 0.0, 1.0], atol=1e-14)


def test_bloch_validation():
    with pytest.raises(ValueError):
        integrate_bloch(BlochState(0.0, 0.0, 1.0), 0.5, 10.0, dt=0.1)
    with pytest.raises(ValueError):
        integrate_bloch(BlochState(0.0, 0.0, 0.5), 0.5, 10.0)


# ---------------------------------------------------------------- Langevin config

def test_config_einstein_relation_and_dt_limit():
    cfg = LangevinConfig(20, 0.9, 5.0, gamma_eff=2.0)
    assert cfg.diffusion == pytest.approx(2.0 * cfg.kbt / 20)
    with pytest.raises(ValueError):
        LangevinConfig(20, 0.9, 5.0, dt=1.0)
    with pytest.raises(ValueError):
        LangevinConfig(20, 0.9, 5.0, n_paths=0)


def test_heuristic_gamma_eff():
    assert heuristic_gamma_eff(0.5, 2.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        heuristic_gamma_eff(0.5, 0.0)


# ---------------------------------------------------------------- Langevin dynamics

def test_seed_determinism():
    cfg = LangevinConfig(16, 0.9, 5.0, n_paths=20, seed=7)
    a = simulate_langevin(cfg, 50.0, record_every=10)
    b = simulate_langevin(cfg, 50.0, record_every=10)
    c = simulate_langevin(cfg.with_(seed=8), 50.0, record_every=10)
    np.testing.assert_array_equal(a.paths, b.paths)
    assert not np.array_equal(a.paths, c.paths)


def test_zero_temperature_relaxes_to_well():
    m_star = order_parameter(0.9)
    cfg = LangevinConfig(20, 0.9, 1e-3, n_paths=50, seed=4)
    ens = simulate_langevin(cfg, 300.0, m0=-m_star + 0.1, record_every=100)
    assert abs(ens.final.mean() + m_star) < 1e-3


def test_biased_occupancy_matches_boltzmann():
    n = 12
    temp = temperature_for_exponent(n, 0.9, 2.0)
    cfg = LangevinConfig(n, 0.9, temp, n_paths=500, seed=3)
    h = cfg.kbt / (2 * n * order_parameter(0.9))
    cfg = cfg.with_(bias_h=h)
    ens = simulate_langevin(cfg, 4000.0, m0=0.0, record_every=200)
    tail = ens.paths[:, ens.times.size // 4:]
    measured = np.mean(tail > 0) / np.mean(tail < 0)
    exact = quad(lambda m: boltzmann_density(m, cfg), 0, 1)[0] / \
        quad(lambda m: boltzmann_density(m, cfg), -1, 0)[0]
    assert measured == pytest.approx(exact, rel=0.10)


def test_boltzmann_ratio_tends_to_two_well_estimate():
    # occupancy ratio -> exp(2 N m* h / kT) once the wells are narrow
    errs = []
    for n in (12, 48, 192):
        temp = temperature_for_exponent(n, 0.9, 2.0 * n / 12)
        cfg = LangevinConfig(n, 0.9, temp)
        cfg = cfg.with_(bias_h=cfg.kbt / (2 * n * order_parameter(0.9)))
        ratio = quad(lambda m: boltzmann_density(m, cfg), 0, 1, points=[0.4])[0] / \
            quad(lambda m: boltzmann_density(m, cfg), -1, 0, points=[-0.4])[0]
        errs.append(abs(ratio / math.e - 1))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.05


# ---------------------------------------------------------------- first passage

def test_mfpt_arrhenius_ratio():
    cold = mfpt_estimate(LangevinConfig(20, 0.9, temperature_for_exponent(20, 0.9, 6.0),
                                        n_paths=300, seed=2))
    warm = mfpt_estimate(LangevinConfig(20, 0.9, temperature_for_exponent(20, 0.9, 3.0),
                                        n_paths=300, seed=1))
    ratio = cold.mean / warm.mean
    assert math.exp(3) / 2 < ratio < 2 * math.exp(3)


def test_mfpt_slope_in_n():
    temp = temperature_for_exponent(14, 0.9, 3.0)
    ns = [14, 18, 22, 26]
    logs = [math.log(mfpt_estimate(LangevinConfig(n, 0.9, temp, n_paths=300, seed=n)).mean)
            for n in ns]
    slope = np.polyfit(ns, logs, 1)[0]
    expected = barrier(ModelParams(14, 0.9, temp_nK=temp)).exponent / 14
    assert slope == pytest.approx(expected, rel=0.15)


def test_slide_past_spinodal_is_deterministic():
    sp = spinodal_field(0.9)
    h = 2.0 * sp.h_sp
    cfg = LangevinConfig(20, 0.9, 1e-3, bias_h=h, n_paths=20, seed=5, dt=0.01)
    m_star = order_parameter(0.9)
    ens = simulate_langevin(cfg, 100.0, m0=-m_star)
    crossing = np.argmax(ens.paths >= 0.0, axis=1)
    assert np.all(crossing > 0)
    measured = ens.times[crossing].mean()
    want = oracles.deterministic_slide_time(0.9, cfg.kbt, h, -m_star, 0.0)
    assert measured == pytest.approx(want, rel=0.02)


def test_mfpt_refuses_large_barriers_and_few_passages():
    with pytest.raises(ValueError):
        mfpt_estimate(LangevinConfig(20, 0.9, temperature_for_exponent(20, 0.9, 9.0)))
    cfg = LangevinConfig(20, 0.9, temperature_for_exponent(20, 0.9, 2.0), n_paths=10)
    with pytest.raises(RuntimeError):
        mfpt_estimate(cfg)


# ---------------------------------------------------------------- sweep error

def test_classical_p_error_frozen_regimes():
    assert classical_p_error(1e-3, BENCHMARK) == 1.0
    params = ModelParams(20, 0.9, temp_nK=temperature_for_exponent(20, 0.9, 3.0))
    assert classical_p_error(0.0, params) == 1.0


def test_classical_p_error_slow_sweep_switches():
    params = ModelParams(20, 0.9, temp_nK=temperature_for_exponent(20, 0.9, 3.0))
    tau_q = 200.0 / params.j_phys
    with warnings.catch_warnings():
        # the LZ window is empty at desk-scale N, so any amplitude warns
        warnings.simplefilter("ignore", RuntimeWarning)
        p = classical_p_error(tau_q, params, delta_h=0.05, n_paths=200, seed=6)
    assert p < 0.1
    with pytest.raises(ValueError):
        classical_p_error(-1.0, params)
