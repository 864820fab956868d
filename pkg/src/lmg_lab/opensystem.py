"""Truncated-level Lindblad dynamics and Leggett-Garg correlators.

Superoperators act on column-stacked density matrices: vec(rho) stacks the
columns of rho, so vec(A rho B) = (B^T kron A) vec(rho). Under this
convention the coherent part -i[H, rho] is -i (I kron H - H^T kron I).

Rates handed to the public functions are physical (s^-1). They are divided
by the LevelSystem's ``j_phys`` exactly once, right before the generator is
assembled; everything downstream is dimensionless with J = 1.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from .params import J_PHYS
from .spectrum import ConvergenceError, Spectrum, eigenbasis_matrix, jz2_expectation

log = logging.getLogger(__name__)

MAX_LEVELS = 10


class BracketError(ValueError):
    """No sign change was found inside the allowed bracket."""


@dataclass(frozen=True)
class LevelSystem:
    """n-level truncation in the energy eigenbasis.

    ``h_diag`` holds the lowest eigenvalues (units of J); ``jz`` and ``q`` are
    the projected matrices <E_i|Jz|E_j> and <E_i|sgn(Jz)|E_j>.
    """

    n_levels: int
    h_diag: np.ndarray
    jz: np.ndarray
    q: np.ndarray
    delta_e: float
    j_phys: float = J_PHYS

    @property
    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.h_diag)

    def ground_state(self) -> np.ndarray:
        rho = np.zeros((self.n_levels, self.n_levels), dtype=complex)
        rho[0, 0] = 1.0
        return rho

    def default_dt(self) -> float:
        """Optimal LGI interval pi / (3 Delta E), dimensionless."""
        return math.pi / (3.0 * self.delta_e)


@dataclass(frozen=True)
class K3Report:
    c12: float
    c23: float
    c13: float
    k3: float
    protocol: str


def truncate(spec: Spectrum, q_diag, n_levels: int, j_phys: float = J_PHYS) -> LevelSystem:
    if not 2 <= n_levels <= min(MAX_LEVELS, spec.eigenvectors.shape[1]):
        raise ValueError(
            f"n_levels must be in [2, {min(MAX_LEVELS, spec.eigenvectors.shape[1])}], "
            f"got {n_levels}")
    jz = eigenbasis_matrix(spec, spec.m_grid, n_levels)
    q = eigenbasis_matrix(spec, q_diag, n_levels)
    return LevelSystem(
        n_levels=n_levels,
        h_diag=np.array(spec.eigenvalues[:n_levels], dtype=float),
        jz=jz,
        q=q,
        delta_e=spec.delta_e,
        j_phys=j_phys,
    )


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(v).reshape((n, n), order="F")


def build_superoperator(sys: LevelSystem, gamma_phi_dimensionless: float,
                        jz_sq: np.ndarray | None = None) -> np.ndarray:
    """Generator of d rho/dt = -i[H, rho] + g (Jz rho Jz - 1/2 {Jz^2, rho}).

    ``jz_sq`` replaces the projected (P Jz P)^2 in the anticommutator, e.g.
    with the full-space matrix elements of Jz^2.
    """
    if gamma_phi_dimensionless < 0:
        raise ValueError("dephasing rate must be non-negative")
    n = sys.n_levels
    eye = np.eye(n)
    h = sys.hamiltonian
    jz = sys.jz
    if jz_sq is None:
        jz_sq = jz @ jz
    coherent = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    dissipator = (np.kron(jz.T, jz)
                  - 0.5 * np.kron(eye, jz_sq)
                  - 0.5 * np.kron(jz_sq.T, eye))
    return coherent + gamma_phi_dimensionless * dissipator


def propagator(superop: np.ndarray, t: float) -> np.ndarray:
    if t < 0:
        raise ValueError("propagation time must be non-negative")
    prop = expm(superop * t)
    if not np.all(np.isfinite(prop)):
        raise ConvergenceError("matrix exponential produced non-finite entries")
    return prop


def _rehermitize(rho: np.ndarray) -> np.ndarray:
    drift = np.max(np.abs(rho - rho.conj().T)) if rho.size else 0.0
    if drift > 1e-8:
        warnings.warn(f"Hermiticity drift {drift:.2e} after propagation", RuntimeWarning)
    if drift > 1e-12:
        rho = 0.5 * (rho + rho.conj().T)
    return rho


def apply(prop: np.ndarray, rho: np.ndarray) -> np.ndarray:
    n = rho.shape[0]
    return _rehermitize(unvec(prop @ vec(rho), n))


def propagate(superop: np.ndarray, rho: np.ndarray, t: float) -> np.ndarray:
    """exp(L t) applied to rho."""
    return apply(propagator(superop, t), np.asarray(rho, dtype=complex))


def lueders_instrument(q: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Operator-valued instrument (Q rho + rho Q) / 2; not trace-normalised."""
    q = np.asarray(q)
    rho = np.asarray(rho)
    if q.shape != rho.shape:
        raise ValueError(f"shape mismatch: Q {q.shape} vs rho {rho.shape}")
    return 0.5 * (q @ rho + rho @ q)


def _correlator(q: np.ndarray, prop: np.ndarray, inst: np.ndarray) -> float:
    return float(np.trace(q @ apply(prop, inst)).real)


def _dimensionless_rate(sys: LevelSystem, gamma_phi_per_s: float) -> float:
    if gamma_phi_per_s < 0:
        raise ValueError("gamma_phi must be non-negative")
    return gamma_phi_per_s / sys.j_phys


def k3_stationary(sys: LevelSystem, gamma_phi_per_s: float, dt: float | None = None,
                  rho0: np.ndarray | None = None) -> K3Report:
    """K3 = 2 C12 - C13 with re-preparation before each pair (C23 := C12)."""
    dt = sys.default_dt() if dt is None else dt
    rho0 = sys.ground_state() if rho0 is None else np.asarray(rho0, dtype=complex)
    superop = build_superoperator(sys, _dimensionless_rate(sys, gamma_phi_per_s))
    p1 = propagator(superop, dt)
    inst = lueders_instrument(sys.q, rho0)
    c12 = _correlator(sys.q, p1, inst)
    c13 = _correlator(sys.q, p1 @ p1, inst)
    return K3Report(c12, c12, c13, 2 * c12 - c13, "stationary")


def k3_sequential(sys: LevelSystem, gamma_phi_per_s: float, dt: float | None = None,
                  rho0: np.ndarray | None = None) -> K3Report:
    """K3 = C12 + C23 - C13 with the t2 measurement acting on the evolved state."""
    dt = sys.default_dt() if dt is None else dt
    rho0 = sys.ground_state() if rho0 is None else np.asarray(rho0, dtype=complex)
    superop = build_superoperator(sys, _dimensionless_rate(sys, gamma_phi_per_s))
    p1 = propagator(superop, dt)
    p2 = propagator(superop, 2 * dt)
    inst = lueders_instrument(sys.q, rho0)
    c12 = _correlator(sys.q, p1, inst)
    c13 = _correlator(sys.q, p2, inst)
    rho_t1 = apply(p1, rho0)
    c23 = _correlator(sys.q, p1, lueders_instrument(sys.q, rho_t1))
    return K3Report(c12, c23, c13, c12 + c23 - c13, "sequential")


def threshold_gamma(sys: LevelSystem, bracket=(0.2, 0.5), limits=(0.05, 2.0),
                    xtol: float = 1e-4, widen: float = 1.5) -> float:
    """Dephasing rate (s^-1) at which the stationary K3 crosses 1.

    The bracket is widened geometrically by ``widen`` on both sides, clipped to
    ``limits``, until K3 - 1 changes sign.
    """
    def excess(g):
        return k3_stationary(sys, g).k3 - 1.0

    lo, hi = bracket
    f_lo, f_hi = excess(lo), excess(hi)
    while f_lo * f_hi > 0:
        if lo <= limits[0] and hi >= limits[1]:
            raise BracketError(
                f"K3 - 1 has no sign change on [{limits[0]}, {limits[1]}] s^-1 "
                f"(n_levels={sys.n_levels}); values {f_lo:+.4f}, {f_hi:+.4f}")
        lo, hi = max(lo / widen, limits[0]), min(hi * widen, limits[1])
        f_lo, f_hi = excess(lo), excess(hi)
        log.debug("widened threshold bracket to [%g, %g]", lo, hi)
    return float(brentq(excess, lo, hi, xtol=xtol))


def t2_phys(spec: Spectrum, gamma_phi_per_s: float) -> float:
    """Secular coherence time of |E0><E1| in ms, from full-space Jz^2."""
    if gamma_phi_per_s <= 0:
        raise ValueError("gamma_phi must be positive")
    rate = 0.5 * gamma_phi_per_s * (jz2_expectation(spec, 0) + jz2_expectation(spec, 1))
    return 1000.0 / rate


def projected_jz_squared(spec: Spectrum, n_levels: int) -> np.ndarray:
    """Full-space <E_i|Jz^2|E_j> restricted to the lowest n_levels."""
    return eigenbasis_matrix(spec, spec.m_grid ** 2, n_levels)
