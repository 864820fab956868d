"""Analytic Leggett-Garg estimates: two-level K3, the A/B/C threshold
hierarchy, the coherent multi-level sum and the macrorealist bound."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..params import ModelParams
from ..spectrum import Spectrum, eigenbasis_element, jz2_expectation, sign_observable
from .mean_field import order_parameter


def k3_two_level(t2_ms: float, delta_e_rad_s: float, q01_sq: float) -> float:
    """Q01^2 (xi + xi^2 / 2) with xi = exp(-pi / (3 Delta E T2)).

    ``t2_ms = inf`` gives the coherent ceiling 1.5 Q01^2.
    """
    if t2_ms <= 0:
        raise ValueError("t2 must be positive")
    xi = math.exp(-math.pi / (3.0 * delta_e_rad_s * t2_ms * 1e-3))
    return q01_sq * (xi + 0.5 * xi * xi)


def xi_threshold(q01_sq: float) -> float:
    """Root of Q01^2 (xi + xi^2/2) = 1 on (0, 1); NaN when 1.5 Q01^2 <= 1."""
    xi = -1.0 + math.sqrt(1.0 + 2.0 / q01_sq)
    return xi if 0 < xi < 1 else math.nan


def two_level_coefficient(spec: Spectrum, delta_e_rad_s: float | None = None,
                          j_phys: float | None = None) -> float:
    """pi Gamma01 / (3 Delta E) for gamma_phi = 1 s^-1, with Gamma01 from full-space Jz^2.

    Pass ``delta_e_rad_s`` to fix the gap (e.g. the quoted 1310 rad/s);
    otherwise the recomputed gap times ``j_phys`` is used.
    """
    gamma01 = 0.5 * (jz2_expectation(spec, 0) + jz2_expectation(spec, 1))
    if delta_e_rad_s is None:
        if j_phys is None:
            raise ValueError("need delta_e_rad_s or j_phys")
        delta_e_rad_s = spec.delta_e * j_phys
    return math.pi * gamma01 / (3.0 * delta_e_rad_s)


def k3_two_level_curve(gammas_per_s, coefficient: float, q01_sq: float) -> np.ndarray:
    """Q01^2 (e^{-c g} + e^{-2 c g} / 2) over a grid of dephasing rates."""
    x = np.exp(-coefficient * np.asarray(gammas_per_s, dtype=float))
    return q01_sq * (x + 0.5 * x * x)


@dataclass(frozen=True)
class HierarchyReport:
    gamma_a: float
    gamma_b: float
    gamma_c: float
    xi_root: float
    t2_threshold_ms: float
    t2_coll_ms: float
    t2_local_ms: float
    t2_phys_ms: float
    reference_gamma: float

    @property
    def ratio_ab(self) -> float:
        return self.gamma_b / self.gamma_a

    @property
    def ratio_bc(self) -> float:
        return self.gamma_c / self.gamma_b


def hierarchy(params: ModelParams, spec: Spectrum, gamma_c: float = math.nan,
              reference_gamma: float = 0.05) -> HierarchyReport:
    """Level A (mean-field collective T2) and level B (eigenstate Gamma01) thresholds.

    ``gamma_c`` is the numerically root-found truncated-Lindblad threshold and
    is only carried along. T2 values are quoted at ``reference_gamma`` (s^-1).
    """
    n = params.n_spins
    q = sign_observable(n)
    q01_sq = eigenbasis_element(spec, q, 0, 1) ** 2
    delta_e = spec.delta_e * params.j_phys
    xi = xi_threshold(q01_sq)
    t2_thr = math.pi / (3.0 * delta_e * math.log(1.0 / xi))
    m_star = order_parameter(params.gamma_ratio)
    gamma_a = 2.0 / (m_star ** 2 * n ** 2 * t2_thr)
    gamma01 = 0.5 * (jz2_expectation(spec, 0) + jz2_expectation(spec, 1))
    gamma_b = 1.0 / (gamma01 * t2_thr)

    from .scaling import dephasing_rates

    rates = dephasing_rates(params, reference_gamma)
    return HierarchyReport(
        gamma_a=gamma_a,
        gamma_b=gamma_b,
        gamma_c=gamma_c,
        xi_root=xi,
        t2_threshold_ms=t2_thr * 1e3,
        t2_coll_ms=rates.t2_coll_ms,
        t2_local_ms=rates.t2_local_ms,
        t2_phys_ms=1e3 / (reference_gamma * gamma01),
        reference_gamma=reference_gamma,
    )


@dataclass(frozen=True)
class MultilevelK3:
    k3: float
    contributions: np.ndarray


def k3_coherent_multilevel(q_k0_sq, gap_ratios, tau_over_tau_star: float = 1.0) -> MultilevelK3:
    """Dephasing-free K3 as a sum over odd-parity levels.

    Each level k contributes Q_k0^2 [2 cos(r_k x) - cos(2 r_k x)] with
    x = pi tau_hat / 3 and r_k = (E_k - E_0) / (E_1 - E_0).
    """
    q2 = np.asarray(q_k0_sq, dtype=float)
    r = np.asarray(gap_ratios, dtype=float)
    if q2.shape != r.shape:
        raise ValueError("q_k0_sq and gap_ratios must be aligned")
    x = math.pi / 3.0 * tau_over_tau_star
    contrib = q2 * (2.0 * np.cos(r * x) - np.cos(2.0 * r * x))
    return MultilevelK3(float(contrib.sum()), contrib)


def multilevel_inputs(spec: Spectrum, n_levels: int | None = None,
                      odd_only: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """(Q_k0^2, (E_k - E_0)/Delta E) for k = 1 .. n_levels-1 from a spectrum."""
    n = spec.eigenvectors.shape[1] if n_levels is None else n_levels
    q = sign_observable(spec.n_spins)
    v = spec.eigenvectors[:, :n]
    qk0 = v.T @ (q * v[:, 0])
    ks = np.arange(1, n)
    if odd_only:
        ks = ks[ks % 2 == 1]
    ratios = (spec.eigenvalues[ks] - spec.eigenvalues[0]) / spec.delta_e
    return qk0[ks] ** 2, ratios


@dataclass(frozen=True)
class MacrorealistBound:
    max_k3: int
    min_k3: int
    per_assignment: list


def macrorealist_bound() -> MacrorealistBound:
    """Enumerate Q1 Q2 + Q2 Q3 - Q1 Q3 over all (Q1, Q2, Q3) in {+1, -1}^3."""
    rows = [((a, b, c), a * b + b * c - a * c)
            for a, b, c in itertools.product((1, -1), repeat=3)]
    values = [v for _, v in rows]
    return MacrorealistBound(max(values), min(values), rows)
