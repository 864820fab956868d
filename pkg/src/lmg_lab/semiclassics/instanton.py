"""WKB instanton action and the Goldilocks crossover N_c."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .mean_field import DisorderedPhaseError, order_parameter

#: Fitted C0 / k_B T at T = 10 nK, keyed by Gamma/J.
FITTED_C0_OVER_KBT = {0.99: 2.51, 0.95: 2.546, 0.90: 2.616}

N_MAX = 1e5


def instanton_action_closed(gamma_ratio: float) -> float:
    """arctanh(m*) - m*."""
    if not 0 < gamma_ratio < 1:
        raise DisorderedPhaseError("instanton action needs 0 < Gamma/J < 1")
    m_star = order_parameter(gamma_ratio)
    return math.atanh(m_star) - m_star


def instanton_action_integral(gamma_ratio: float) -> float:
    """Quadrature of ln(J sqrt(1 - z^2) / Gamma) over [0, m*]."""
    if not 0 < gamma_ratio < 1:
        raise DisorderedPhaseError("instanton action needs 0 < Gamma/J < 1")
    m_star = order_parameter(gamma_ratio)
    val, _ = quad(lambda z: 0.5 * math.log1p(-z * z) - math.log(gamma_ratio),
                  0.0, m_star, epsabs=1e-14, epsrel=1e-13)
    return val


def instanton_action(gamma_ratio: float, check: bool = True) -> float:
    """Intensive instanton action S_inst, cross-checked against quadrature."""
    s = instanton_action_closed(gamma_ratio)
    if check:
        s_num = instanton_action_integral(gamma_ratio)
        if abs(s - s_num) > 1e-8:
            raise ArithmeticError(
                f"closed-form action {s!r} disagrees with quadrature {s_num!r}")
    return s


def instanton_splitting(n, gamma_ratio: float, c0: float):
    """C0 sqrt(N) exp(-N S_inst); same units as ``c0``."""
    s = instanton_action(gamma_ratio, check=False)
    n = np.asarray(n, dtype=float)
    return c0 * np.sqrt(n) * np.exp(-n * s)


@dataclass(frozen=True)
class GoldilocksRow:
    gamma_ratio: float
    s_inst: float
    nc_analytic: float
    nc_root: float
    c0_over_kbt: float
    nc_root_lo: float = math.nan
    nc_root_hi: float = math.nan
    nc_root_lo_log: float = math.nan
    nc_root_hi_log: float = math.nan


def _instanton_root(c0: float, s: float) -> float:
    # ln(c0) + ln(N)/2 - N s peaks at N = 1/(2s); the physical root lies beyond it
    def g(n):
        return math.log(c0) + 0.5 * math.log(n) - n * s

    start = max(1.0, 0.5 / s)
    if g(start) < 0:
        return math.nan
    grid = np.geomspace(start, N_MAX, 400)
    vals = np.array([g(n) for n in grid])
    idx = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    if idx.size == 0:
        return math.nan
    k = idx[0]
    return brentq(g, grid[k], grid[k + 1], xtol=1e-10)


def goldilocks(gamma_ratio: float, c0_over_kbt: float | None = None,
               c0_variation: float = 0.05) -> GoldilocksRow:
    """N_c from the analytic estimate ln(C0/kT)/S and from the full instanton root.

    ``c0_over_kbt`` defaults to the fitted constants for Gamma/J in
    {0.99, 0.95, 0.90}. The root is also solved with C0 scaled by
    (1 -+ c0_variation) and with ln C0 scaled the same way; NaN marks a
    missing root (possible when C0 <= k_B T).
    """
    if c0_over_kbt is None:
        try:
            c0_over_kbt = FITTED_C0_OVER_KBT[round(gamma_ratio, 6)]
        except KeyError:
            raise ValueError(
                f"no fitted C0 for Gamma/J = {gamma_ratio}; pass c0_over_kbt") from None
    if c0_over_kbt <= 0:
        raise ValueError("c0_over_kbt must be positive")
    s = instanton_action(gamma_ratio)
    analytic = math.log(c0_over_kbt) / s
    root = _instanton_root(c0_over_kbt, s)
    lo = _instanton_root(c0_over_kbt * (1 - c0_variation), s)
    hi = _instanton_root(c0_over_kbt * (1 + c0_variation), s)
    ln_c0 = math.log(c0_over_kbt)
    lo_log = _instanton_root(math.exp(ln_c0 * (1 - c0_variation)), s)
    hi_log = _instanton_root(math.exp(ln_c0 * (1 + c0_variation)), s)
    return GoldilocksRow(gamma_ratio, s, analytic, root, c0_over_kbt, lo, hi,
                         min(lo_log, hi_log), max(lo_log, hi_log))


def fit_c0(n_values, delta_e_over_kbt, gamma_ratio: float) -> float:
    """Least-squares C0/kT in log space with S_inst held at its WKB value."""
    n = np.asarray(n_values, dtype=float)
    y = np.log(np.asarray(delta_e_over_kbt, dtype=float) / np.sqrt(n))
    s = instanton_action(gamma_ratio)
    return float(math.exp(np.mean(y + n * s)))
