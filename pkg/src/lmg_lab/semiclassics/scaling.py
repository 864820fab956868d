"""Landau-Zener sweep error, dephasing-rate scaling and freeze-out exponents."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..params import ModelParams
from .mean_field import order_parameter


def lz_sweep_rate(n_spins: int, m_star: float, delta_h_rad_s: float) -> float:
    """alpha = N m* Delta h (rad/s)."""
    return n_spins * m_star * delta_h_rad_s


def lz_error(delta_e_rad_s: float, n_spins: int, m_star: float, delta_h_rad_s: float,
             tau_q_s, window: tuple[float, float] | None = None):
    """Landau-Zener probability of ending in the diabatic (wrong) well.

    exp(-pi Delta E^2 tau_Q / (4 alpha)), vectorised over ``tau_q_s``. If a
    sweep ``window`` (lo, hi) in rad/s is supplied, a bias amplitude outside
    it triggers a RuntimeWarning.
    """
    tau = np.asarray(tau_q_s, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau_q must be non-negative")
    if window is not None and not window[0] <= delta_h_rad_s <= window[1]:
        warnings.warn(
            f"sweep amplitude {delta_h_rad_s:g} rad/s lies outside the valid window "
            f"[{window[0]:.4g}, {window[1]:.4g}]", RuntimeWarning)
    alpha = lz_sweep_rate(n_spins, m_star, delta_h_rad_s)
    if alpha <= 0:
        raise ValueError("sweep rate alpha must be positive")
    out = np.exp(-math.pi * delta_e_rad_s ** 2 * tau / (4.0 * alpha))
    return out if out.ndim else float(out)


def lz_normalized_time(delta_e_rad_s: float, alpha: float, tau_q_s):
    """x = tau_Q Delta E^2 / (4 alpha), so that P_error = exp(-pi x)."""
    return np.asarray(tau_q_s, dtype=float) * delta_e_rad_s ** 2 / (4.0 * alpha)


def lz_crossover_schematic(x):
    """Illustrative interpolation e^{-pi x} e^{-x^2} + (1 - e^{-x^2}); not a prediction."""
    x = np.asarray(x, dtype=float)
    g = np.exp(-x * x)
    return np.exp(-math.pi * x) * g + (1.0 - g)


@dataclass(frozen=True)
class DephasingRates:
    t2_coll_ms: float
    t2_local_ms: float
    rate_coll: float
    rate_local: float


def dephasing_rates(params: ModelParams, gamma_phi_per_s: float) -> DephasingRates:
    """Coherence times of the mean-field doublet under collective and local dephasing.

    1/T2_coll = m*^2 N^2 gamma / 2 and 1/T2_local = N gamma (1 + m*^2).
    """
    if gamma_phi_per_s <= 0:
        raise ValueError("gamma_phi must be positive")
    n = params.n_spins
    m2 = order_parameter(params.gamma_ratio) ** 2
    coll = 0.5 * m2 * n * n * gamma_phi_per_s
    local = n * gamma_phi_per_s * (1.0 + m2)
    return DephasingRates(1e3 / coll, 1e3 / local, coll, local)


_FREEZEOUT = {
    "j_quench": Fraction(1, 3),
    "h_quench": Fraction(1, 2),
    "classical_overdamped": Fraction(1, 2),
}


def freezeout_exponent(protocol: str) -> Fraction:
    """Exponent of tau_Q in the freeze-out time for the given quench protocol."""
    try:
        return _FREEZEOUT[protocol]
    except KeyError:
        raise ValueError(
            f"unknown protocol {protocol!r}; expected one of {sorted(_FREEZEOUT)}") from None
