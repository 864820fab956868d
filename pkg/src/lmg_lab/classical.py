"""Classical foil: reactive Bloch precession and overdamped Langevin dynamics
on the mean-field free-energy landscape.

Time is measured in units of 1/J throughout (J = 1); divide by ``j_phys``
to convert to seconds. The Langevin kernel runs one independent random
stream per path, seeded from ``np.random.SeedSequence(seed)``, so ensemble
results do not depend on thread scheduling.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numba
import numpy as np
from scipy.optimize import brentq

from .params import J_PHYS, ModelParams
from .semiclassics.mean_field import (
    barrier,
    free_energy_gradient,
    kramers_time,
    order_parameter,
    sweep_window,
)

# numba falls back to another threading layer when the system TBB is too old
warnings.filterwarnings("ignore", message="The TBB threading layer requires TBB")

MAX_DESK_EXPONENT = 8.0
MIN_PASSAGES = 50


# ---------------------------------------------------------------- Bloch

@dataclass(frozen=True)
class BlochState:
    mx: float
    my: float
    mz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.mx, self.my, self.mz], dtype=float)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    @classmethod
    def fixed_point(cls, gamma_ratio: float) -> "BlochState":
        """Tilted ordered-phase fixed point (Gamma/J, 0, m*) at h = 0."""
        return cls(gamma_ratio, 0.0, order_parameter(gamma_ratio))


@dataclass(frozen=True)
class BlochTrajectory:
    times: np.ndarray
    m: np.ndarray

    @property
    def norm_drift(self) -> float:
        """Largest deviation of |m| from its initial value."""
        norms = np.linalg.norm(self.m, axis=1)
        return float(np.max(np.abs(norms - norms[0])))

    def oscillation_frequency(self, component: int = 2) -> float:
        """Angular frequency from mean-subtracted zero crossings."""
        x = self.m[:, component] - self.m[:, component].mean()
        idx = np.flatnonzero(np.signbit(x[:-1]) != np.signbit(x[1:]))
        if idx.size < 3:
            raise ValueError("fewer than three zero crossings; integrate longer")
        # linear interpolation of crossing instants
        t0, t1 = self.times[idx], self.times[idx + 1]
        x0, x1 = x[idx], x[idx + 1]
        tc = t0 - x0 * (t1 - t0) / (x1 - x0)
        half_period = np.diff(tc).mean()
        return math.pi / half_period


@numba.njit(cache=True)
def _bloch_rhs(m, j, gamma, h):
    b = j * m[2] + h
    return np.array([2.0 * b * m[1],
                     -2.0 * b * m[0] + 2.0 * gamma * m[2],
                     -2.0 * gamma * m[1]])


@numba.njit(cache=True)
def _rk4(m0, j, gamma, h, dt, n_steps):
    out = np.empty((n_steps + 1, 3))
    out[0] = m0
    m = m0.copy()
    for k in range(n_steps):
        k1 = _bloch_rhs(m, j, gamma, h)
        k2 = _bloch_rhs(m + 0.5 * dt * k1, j, gamma, h)
        k3 = _bloch_rhs(m + 0.5 * dt * k2, j, gamma, h)
        k4 = _bloch_rhs(m + dt * k3, j, gamma, h)
        m = m + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = m
    return out


def integrate_bloch(state: BlochState, gamma_ratio: float, t_final: float,
                    dt: float = 1e-3, j: float = 1.0, h: float = 0.0) -> BlochTrajectory:
    """RK4 integration of the conservative mean-field Bloch equations.

    dmx/dt = 2 (J mz + h) my, dmy/dt = -2 (J mz + h) mx + 2 Gamma mz,
    dmz/dt = -2 Gamma my, with Gamma = gamma_ratio * j.
    """
    if not 0 < dt <= 0.05:
        raise ValueError(f"dt must be in (0, 0.05], got {dt}")
    if t_final < dt:
        raise ValueError("t_final must be at least one step")
    if abs(state.norm - 1.0) > 1e-9:
        raise ValueError(f"initial Bloch vector must have unit norm, got {state.norm}")
    n_steps = int(round(t_final / dt))
    m = _rk4(state.as_array(), float(j), float(gamma_ratio * j), float(h), float(dt), n_steps)
    return BlochTrajectory(np.arange(n_steps + 1) * dt, m)


# ---------------------------------------------------------------- Langevin

@dataclass(frozen=True)
class LangevinConfig:
    """Overdamped Langevin ensemble on f(m).

    ``gamma_eff`` is the dimensionless mobility (time in 1/J), ``dt`` the
    Euler-Maruyama step in the same units, ``seed`` the master seed.
    """

    n_spins: int
    gamma_ratio: float
    temp_nK: float
    bias_h: float = 0.0
    gamma_eff: float = 1.0
    dt: float = 0.05
    n_paths: int = 200
    seed: int = 0
    j_phys: float = J_PHYS

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be positive")
        if self.gamma_eff <= 0 or self.dt <= 0:
            raise ValueError("gamma_eff and dt must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.params  # validates the physical fields
        width = self.well_width
        drift = self.max_drift
        if self.dt * drift >= 0.1 * width:
            raise ValueError(
                f"dt={self.dt:g} too large: dt*max|drift|={self.dt * drift:.3g} must be "
                f"below 0.1*well width={0.1 * width:.3g}")

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.n_spins, self.gamma_ratio, j_phys=self.j_phys,
                           temp_nK=self.temp_nK, bias_h=self.bias_h)

    @property
    def kbt(self) -> float:
        return self.params.kbt

    @property
    def diffusion(self) -> float:
        """Einstein relation D = gamma_eff kBT / N."""
        return self.gamma_eff * self.kbt / self.n_spins

    @property
    def well_width(self) -> float:
        """Distance from the minimum to the barrier top, m* (1 in the disordered case)."""
        m_star = order_parameter(self.gamma_ratio) if self.gamma_ratio <= 1 else 0.0
        return m_star if m_star > 0 else 1.0

    @property
    def max_drift(self) -> float:
        grid = np.linspace(-1.0, 1.0, 2001)
        grad = free_energy_gradient(grid, self.gamma_ratio, self.kbt, self.bias_h)
        return float(self.gamma_eff * np.max(np.abs(grad)))

    def path_seeds(self) -> np.ndarray:
        return np.random.SeedSequence(self.seed).generate_state(self.n_paths, dtype=np.uint32)

    def with_(self, **changes) -> "LangevinConfig":
        return replace(self, **changes)


@numba.njit(cache=True)
def _drift(m, gamma, kbt, h, gamma_eff):
    y = m + h
    e = math.sqrt(y * y + gamma * gamma)
    occ = 1.0 if kbt <= 0.0 else math.tanh(e / kbt)
    ratio = y / e if e > 0.0 else 0.0
    return -gamma_eff * (m - occ * ratio)


@numba.njit(cache=True)
def _reflect(m):
    if m > 1.0:
        m = 2.0 - m
    elif m < -1.0:
        m = -2.0 - m
    return min(1.0, max(-1.0, m))


@numba.njit(parallel=True, cache=True)
def _ensemble(m0, seeds, n_steps, dt, gamma, kbt, h0, h1, gamma_eff, diff, record_every):
    n_paths = m0.size
    n_rec = n_steps // record_every + 1
    out = np.empty((n_paths, n_rec))
    amp = math.sqrt(2.0 * diff * dt)
    for p in numba.prange(n_paths):
        np.random.seed(seeds[p])
        m = m0[p]
        out[p, 0] = m
        r = 1
        for k in range(n_steps):
            h = h0 + (h1 - h0) * (k / n_steps) if n_steps > 0 else h0
            m = m + _drift(m, gamma, kbt, h, gamma_eff) * dt + amp * np.random.standard_normal()
            m = _reflect(m)
            if (k + 1) % record_every == 0:
                out[p, r] = m
                r += 1
    return out


@numba.njit(parallel=True, cache=True)
def _first_passage(m0, seeds, max_steps, dt, gamma, kbt, h, gamma_eff, diff, target):
    n_paths = m0.size
    steps = np.full(n_paths, -1, dtype=np.int64)
    amp = math.sqrt(2.0 * diff * dt)
    for p in numba.prange(n_paths):
        np.random.seed(seeds[p])
        m = m0[p]
        for k in range(max_steps):
            m = m + _drift(m, gamma, kbt, h, gamma_eff) * dt + amp * np.random.standard_normal()
            m = _reflect(m)
            if m >= target:
                steps[p] = k + 1
                break
    return steps


@dataclass(frozen=True)
class LangevinEnsemble:
    times: np.ndarray
    paths: np.ndarray
    seed: int

    @property
    def final(self) -> np.ndarray:
        return self.paths[:, -1]


def simulate_langevin(config: LangevinConfig, t_final: float, m0=None,
                      record_every: int = 1, h_end: float | None = None) -> LangevinEnsemble:
    """Euler-Maruyama ensemble of m_z paths with reflecting walls at +-1.

    ``m0`` is a scalar or per-path array (default: the -m* well). With
    ``h_end`` the bias ramps linearly from ``config.bias_h`` to ``h_end``
    over ``t_final``. Paths are sampled every ``record_every`` steps.
    """
    n_steps = int(round(t_final / config.dt))
    if n_steps < 0 or record_every < 1:
        raise ValueError("t_final must be non-negative and record_every positive")
    if m0 is None:
        m0 = -order_parameter(min(config.gamma_ratio, 1.0))
    start = np.broadcast_to(np.asarray(m0, dtype=float), (config.n_paths,)).copy()
    h1 = config.bias_h if h_end is None else h_end
    paths = _ensemble(start, config.path_seeds(), n_steps, config.dt, config.gamma_ratio,
                      config.kbt, config.bias_h, h1, config.gamma_eff, config.diffusion,
                      record_every)
    times = np.arange(paths.shape[1]) * config.dt * record_every
    return LangevinEnsemble(times, paths, config.seed)


def boltzmann_density(m, config: LangevinConfig) -> np.ndarray:
    """Normalised exp(-N f(m)/kBT) on [-1, 1], the Langevin stationary density."""
    from scipy.integrate import quad

    from .semiclassics.mean_field import free_energy

    p = config.params
    f_min = min(free_energy(np.linspace(-1, 1, 4001), p.gamma_ratio, p.kbt, p.bias_h))

    def weight(x):
        return np.exp(-p.n_spins * (free_energy(x, p.gamma_ratio, p.kbt, p.bias_h) - f_min) / p.kbt)

    z, _ = quad(weight, -1.0, 1.0, limit=200, points=[-order_parameter(min(p.gamma_ratio, 1)),
                                                       order_parameter(min(p.gamma_ratio, 1))])
    return weight(np.asarray(m, dtype=float)) / z


@dataclass(frozen=True)
class MFPTResult:
    mean_s: float
    stderr_s: float
    mean: float
    stderr: float
    n_passages: int
    n_paths: int
    kramers_s: float
    exponent: float
    seed: int


def mfpt_estimate(config: LangevinConfig, t_max: float | None = None,
                  target: float = 0.0) -> MFPTResult:
    """Mean first-passage time from -m* to m_z >= ``target``.

    Only desk-scale barriers (N df0 / kBT <= 8) are accepted. ``t_max`` is
    the per-path time budget (default: 30 Kramers times). Paths that have
    not crossed by then are excluded with a warning; fewer than 50 passages
    is an error.
    """
    params = config.params.with_(bias_h=0.0)
    b = barrier(params)
    if b.exponent > MAX_DESK_EXPONENT:
        raise ValueError(
            f"barrier exponent {b.exponent:.2f} exceeds the desk-scale limit "
            f"{MAX_DESK_EXPONENT}; reduce n_spins or raise temp_nK")
    tau_k = kramers_time(params, config.gamma_eff, mode="full")
    tau_k_dimless = tau_k.time_s * params.j_phys
    if t_max is None:
        t_max = 30.0 * tau_k_dimless
    max_steps = int(math.ceil(t_max / config.dt))
    start = np.full(config.n_paths, -b.m_min)
    steps = _first_passage(start, config.path_seeds(), max_steps, config.dt,
                           config.gamma_ratio, config.kbt, config.bias_h,
                           config.gamma_eff, config.diffusion, target)
    passed = steps[steps >= 0]
    if passed.size < MIN_PASSAGES:
        raise RuntimeError(
            f"only {passed.size} of {config.n_paths} paths crossed within t_max={t_max:.3g}; "
            f"need {MIN_PASSAGES}. Use smaller n_spins, higher temp_nK or more paths")
    if passed.size < steps.size:
        warnings.warn(f"{steps.size - passed.size} paths did not cross within the budget "
                      "and were excluded; the mean is biased low", RuntimeWarning)
    times = passed * config.dt
    mean = float(times.mean())
    stderr = float(times.std(ddof=1) / math.sqrt(times.size))
    scale = 1.0 / config.j_phys
    return MFPTResult(mean * scale, stderr * scale, mean, stderr, int(passed.size),
                      config.n_paths, tau_k.time_s, b.exponent, config.seed)


def temperature_for_exponent(n_spins: int, gamma_ratio: float, exponent: float,
                             j_phys: float = J_PHYS) -> float:
    """Temperature (nK) at which N df0 / kBT equals ``exponent``."""
    def excess(t_nk):
        return barrier(ModelParams(n_spins, gamma_ratio, j_phys=j_phys, temp_nK=t_nk)).exponent - exponent

    return float(brentq(excess, 1e-3, 1e5, xtol=1e-12, rtol=1e-12))


def classical_p_error(tau_q_s: float, params: ModelParams, gamma_eff: float = 1.0,
                      delta_h: float | None = None, n_paths: int = 200, seed: int = 0,
                      dt: float = 0.05) -> float:
    """Fraction of classical paths left in the wrong well after a bias sweep.

    The bias ramps linearly from +delta_h to -delta_h (units of J) over
    ``tau_q_s`` seconds, starting in the +m* well. Sweeps shorter than 1% of
    the Kramers time are frozen and return 1 without simulation.
    """
    if tau_q_s < 0:
        raise ValueError("tau_q must be non-negative")
    p0 = params.with_(bias_h=0.0)
    tau_k = kramers_time(p0, gamma_eff, mode="full").time_s
    if tau_q_s < 0.01 * tau_k:
        return 1.0
    lo, hi = sweep_window(p0)
    if delta_h is None:
        delta_h = math.sqrt(lo * hi) / params.j_phys
    if not lo <= delta_h * params.j_phys <= hi:
        warnings.warn(f"sweep amplitude {delta_h * params.j_phys:.4g} rad/s outside the "
                      f"valid window [{lo:.4g}, {hi:.4g}]", RuntimeWarning)
    cfg = LangevinConfig(params.n_spins, params.gamma_ratio, params.temp_nK,
                         bias_h=delta_h, gamma_eff=gamma_eff, dt=dt, n_paths=n_paths,
                         seed=seed, j_phys=params.j_phys)
    ens = simulate_langevin(cfg, tau_q_s * params.j_phys, m0=order_parameter(params.gamma_ratio),
                            record_every=max(1, int(round(tau_q_s * params.j_phys / dt))),
                            h_end=-delta_h)
    return float(np.mean(ens.final > 0))


def heuristic_gamma_eff(gamma: float, gamma2: float) -> float:
    """Zeno-type mobility scale 4 Gamma^2 / Gamma2 (proportionality only)."""
    if gamma2 <= 0:
        raise ValueError("gamma2 must be positive")
    return 4.0 * gamma * gamma / gamma2
