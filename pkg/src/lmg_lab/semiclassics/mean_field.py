"""Mean-field landscape: order parameter, free energy, barrier, Kramers time,
spinodal field and the linearised Bloch normal modes.

Energies are in units of J unless a name ends in ``_rad_s``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..params import ModelParams


class DisorderedPhaseError(ValueError):
    """Operation requires the ordered phase Gamma < J."""


def order_parameter(gamma_ratio: float) -> float:
    """m* = sqrt(1 - (Gamma/J)^2); 0 (with a warning) in the disordered phase."""
    if gamma_ratio < 0:
        raise ValueError("gamma_ratio must be non-negative")
    if gamma_ratio > 1:
        warnings.warn(f"Gamma/J = {gamma_ratio} > 1 is in the disordered phase; m* = 0",
                      RuntimeWarning)
        return 0.0
    return math.sqrt(1.0 - gamma_ratio ** 2)


def is_ordered(gamma_ratio: float) -> bool:
    return 0 <= gamma_ratio < 1


def _require_ordered(gamma_ratio):
    if not is_ordered(gamma_ratio):
        raise DisorderedPhaseError(f"Gamma/J = {gamma_ratio} is not in the ordered phase")


def coherent_overlap(n_spins: int, gamma_ratio: float) -> float:
    """Spin-coherent-state overlap (Gamma/J)^N, evaluated in log space."""
    if gamma_ratio <= 0:
        return 0.0
    return math.exp(n_spins * math.log(gamma_ratio))


def _log2cosh(x):
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax))


def free_energy(m, gamma_ratio: float, kbt: float, h: float = 0.0, j: float = 1.0):
    """Mean-field free energy per spin f(m), vectorised over ``m``.

    f = J m^2 / 2 - T ln[2 cosh(sqrt((J m + h)^2 + Gamma^2) / T)], with T = kbt
    in units of J. At T = 0 the ground-state energy -sqrt(...) is returned.
    """
    m = np.asarray(m, dtype=float)
    gamma = gamma_ratio * j
    energy = np.sqrt((j * m + h) ** 2 + gamma ** 2)
    if kbt == 0:
        out = 0.5 * j * m ** 2 - energy
    else:
        out = 0.5 * j * m ** 2 - kbt * _log2cosh(energy / kbt)
    return out if out.ndim else float(out)


def free_energy_gradient(m, gamma_ratio: float, kbt: float, h: float = 0.0, j: float = 1.0):
    """Analytic df/dm."""
    m = np.asarray(m, dtype=float)
    y = j * m + h
    energy = np.sqrt(y ** 2 + (gamma_ratio * j) ** 2)
    occ = 1.0 if kbt == 0 else np.tanh(energy / kbt)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(energy > 0, y / energy, 0.0)
    out = j * m - j * occ * ratio
    return out if np.ndim(out) else float(out)


def curvature(m: float, gamma_ratio: float, kbt: float, h: float = 0.0,
              step: float = 1e-5) -> float:
    """f''(m) by central differences."""
    f = lambda x: free_energy(x, gamma_ratio, kbt, h)
    return (f(m + step) - 2.0 * f(m) + f(m - step)) / step ** 2


@dataclass(frozen=True)
class Barrier:
    delta_f0: float
    delta_f0_rad_s: float
    exponent: float
    delta_f0_approx: float
    m_min: float


def barrier(params: ModelParams) -> Barrier:
    """Free-energy barrier f(0) - f(m*) at h = 0 and the extensive exponent N df/kT.

    Uses the exact f(m); ``delta_f0_approx`` is the large-argument form
    J - Gamma - J m*^2 / 2 kept for comparison.
    """
    g = params.gamma_ratio
    _require_ordered(g)
    kbt = params.kbt
    if kbt <= 0:
        raise ValueError("barrier exponent needs a positive temperature")
    m_star = order_parameter(g)
    df = free_energy(0.0, g, kbt) - free_energy(m_star, g, kbt)
    approx = 1.0 - g - 0.5 * m_star ** 2
    return Barrier(
        delta_f0=df,
        delta_f0_rad_s=df * params.j_phys,
        exponent=params.n_spins * df / kbt,
        delta_f0_approx=approx,
        m_min=m_star,
    )


@dataclass(frozen=True)
class KramersTime:
    time_s: float
    prefactor_s: float
    exponent: float
    mode: str


def kramers_time(params: ModelParams, gamma_eff: float = 1.0, mode: str = "full") -> KramersTime:
    """Classical escape time over the mean-field barrier.

    ``mode="full"``: 2 pi / (gamma_eff sqrt(f''(m*) |f''(0)|)) e^{N df/kT}, with
    gamma_eff a dimensionless mobility (time measured in 1/j_phys) and the
    curvatures taken numerically. ``mode="attempt_period"``: (2 pi / omega0)
    e^{N df/kT} with omega0 = 2 J m*.
    """
    b = barrier(params)
    m_star = b.m_min
    if mode == "attempt_period":
        omega0 = 2.0 * m_star * params.j_phys
        prefactor = 2.0 * math.pi / omega0
    elif mode == "full":
        if gamma_eff <= 0:
            raise ValueError("gamma_eff must be positive")
        k_min = curvature(m_star, params.gamma_ratio, params.kbt)
        k_top = curvature(0.0, params.gamma_ratio, params.kbt)
        if k_min <= 0 or k_top >= 0:
            raise DisorderedPhaseError(
                f"landscape is not a double well (f''(m*)={k_min:.3g}, f''(0)={k_top:.3g})")
        prefactor = 2.0 * math.pi / (gamma_eff * math.sqrt(k_min * abs(k_top))) / params.j_phys
    else:
        raise ValueError(f"unknown Kramers mode {mode!r}")
    return KramersTime(prefactor * math.exp(b.exponent), prefactor, b.exponent, mode)


@dataclass(frozen=True)
class Spinodal:
    h_sp: float
    h_sp_rad_s: float
    y_sp: float
    m_sp: float


def spinodal_field(gamma_ratio: float, j_phys: float = 1.0) -> Spinodal:
    """Bias at which the metastable well disappears (zero-temperature landscape)."""
    _require_ordered(gamma_ratio)
    g = gamma_ratio
    e_sp = g ** (2.0 / 3.0)
    y_sp = math.sqrt(e_sp ** 2 - g ** 2)
    m_sp = -y_sp / e_sp
    h_sp = y_sp * (g ** (-2.0 / 3.0) - 1.0)
    return Spinodal(h_sp, h_sp * j_phys, y_sp, m_sp)


def sweep_window(params: ModelParams, delta_e: float | None = None) -> tuple[float, float]:
    """Valid LZ sweep amplitude window [Delta E / (N m*), h_sp] in rad/s.

    ``delta_e`` is the tunnel splitting in units of J; computed by exact
    diagonalisation when omitted.
    """
    _require_ordered(params.gamma_ratio)
    if delta_e is None:
        from ..spectrum import solve

        delta_e = solve(params.with_(bias_h=0.0), n_lowest=2).delta_e
    m_star = order_parameter(params.gamma_ratio)
    lo = delta_e / (params.n_spins * m_star) * params.j_phys
    hi = spinodal_field(params.gamma_ratio, params.j_phys).h_sp_rad_s
    return lo, hi


@dataclass(frozen=True)
class NormalModes:
    eigenvalues: np.ndarray
    omega0: float
    matrix: np.ndarray


def acf_linearization(j: float, gamma: float, gamma1: float, gamma2: float) -> NormalModes:
    """Normal modes of the damped Bloch equations linearised at the tilted fixed point.

    Variables are ordered (dm_x, dm_y, dm_z); the eigenvalues are
    -gamma2 +- i omega0 and -gamma1 with omega0 = 2 J m*.
    """
    _require_ordered(gamma / j)
    m_star = math.sqrt(1.0 - (gamma / j) ** 2)
    w = 2.0 * j * m_star
    mat = np.array([
        [-gamma2, w, 0.0],
        [-w, -gamma2, 0.0],
        [0.0, -2.0 * gamma, -gamma1],
    ])
    ev = np.linalg.eigvals(mat)
    ev = ev[np.lexsort((ev.imag, ev.real))]
    return NormalModes(ev, w, mat)
