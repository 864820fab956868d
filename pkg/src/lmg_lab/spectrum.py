"""Exact diagonalisation of the LMG model in the symmetric Dicke sector.

The Hamiltonian H = -(2J/N) Jz^2 - 2 Gamma Jx - 2 h Jz is tridiagonal in the
Dicke basis |j=N/2, m>, m = -N/2 ... N/2, so the full (N+1)-level spectrum
comes from a symmetric tridiagonal eigenproblem.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .params import ModelParams


class ConvergenceError(RuntimeError):
    """A numerical routine failed to converge or produced non-finite output."""


class NonlinearResponseError(ValueError):
    """Finite-difference step is outside the linear-response regime."""


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    diagonal: np.ndarray
    off_diagonal: np.ndarray
    m_grid: np.ndarray

    @property
    def dim(self) -> int:
        return self.diagonal.size

    def dense(self) -> np.ndarray:
        return (np.diag(self.diagonal)
                + np.diag(self.off_diagonal, 1)
                + np.diag(self.off_diagonal, -1))

    def norm(self) -> float:
        """Gershgorin upper bound on the spectral norm."""
        radius = np.abs(self.diagonal).copy()
        radius[:-1] += np.abs(self.off_diagonal)
        radius[1:] += np.abs(self.off_diagonal)
        return float(radius.max())


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues (units of J) and Dicke-basis eigenvectors.

    Column ``k`` of ``eigenvectors`` is |E_k>.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    m_grid: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def n_spins(self) -> int:
        return self.dim - 1

    @property
    def delta_e(self) -> float:
        """Tunnel splitting E1 - E0 in units of J."""
        return float(self.eigenvalues[1] - self.eigenvalues[0])

    def gap_ratio(self, k: int = 2) -> float:
        """(E_k - E_{k-1}) / (E_1 - E_0)."""
        return float((self.eigenvalues[k] - self.eigenvalues[k - 1]) / self.delta_e)


def build_hamiltonian(params: ModelParams) -> TridiagonalHamiltonian:
    n = params.n_spins
    m = np.arange(n + 1) - n / 2
    jt = n / 2
    diagonal = -(2.0 / n) * m ** 2 - 2.0 * params.bias_h * m
    # <m+1| Jx |m> = sqrt(jt(jt+1) - m(m+1)) / 2, times -2 Gamma
    off = -params.gamma_ratio * np.sqrt(jt * (jt + 1) - m[:-1] * (m[:-1] + 1))
    return TridiagonalHamiltonian(diagonal, off, m)


def _fix_gauge(vecs: np.ndarray, tie_rtol: float = 1e-8) -> np.ndarray:
    # largest-|entry| positive. Parity eigenstates have |v[m]| = |v[-m]|, so
    # entries within tie_rtol of the maximum count as tied; the lowest index wins.
    mag = np.abs(vecs)
    tied = mag >= mag.max(axis=0) * (1.0 - tie_rtol)
    idx = np.argmax(tied, axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def diagonalize(h: TridiagonalHamiltonian, n_lowest: int | None = None) -> Spectrum:
    """Diagonalise ``h``, optionally keeping only the ``n_lowest`` levels.

    Raises ConvergenceError if the solver fails or the residual contract
    ||H v - lambda v|| <= 1e-9 ||H|| is violated.
    """
    if h.diagonal.ndim != 1 or h.off_diagonal.size != h.diagonal.size - 1:
        raise ValueError("malformed tridiagonal Hamiltonian")
    kwargs = {}
    if n_lowest is not None:
        if not 1 <= n_lowest <= h.dim:
            raise ValueError(f"n_lowest must be in [1, {h.dim}], got {n_lowest}")
        kwargs = dict(select="i", select_range=(0, n_lowest - 1))
    try:
        w, v = eigh_tridiagonal(h.diagonal, h.off_diagonal, **kwargs)
    except LinAlgError as exc:
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
        raise ConvergenceError("eigensolver returned non-finite values")

    order = np.argsort(w, kind="stable")
    w, v = w[order], _fix_gauge(v[:, order])

    hv = h.diagonal[:, None] * v
    hv[:-1] += h.off_diagonal[:, None] * v[1:]
    hv[1:] += h.off_diagonal[:, None] * v[:-1]
    residual = np.linalg.norm(hv - v * w, axis=0).max()
    scale = max(h.norm(), 1.0)
    if residual > 1e-9 * scale:
        raise ConvergenceError(f"eigen-residual {residual:.3e} exceeds 1e-9*||H||")
    return Spectrum(w, v, h.m_grid)


def solve(params: ModelParams, n_lowest: int | None = None) -> Spectrum:
    """Shortcut for ``diagonalize(build_hamiltonian(params))``."""
    return diagonalize(build_hamiltonian(params), n_lowest)


def sign_observable(n_spins: int) -> np.ndarray:
    """Diagonal of sgn(Jz) in the Dicke basis, with sgn(0) = 0."""
    if n_spins < 2:
        raise ValueError("n_spins must be >= 2")
    m = np.arange(n_spins + 1) - n_spins / 2
    return np.sign(m)


def eigenbasis_element(spec: Spectrum, diag_observable, i: int, j: int) -> float:
    """<E_i| D |E_j> for an observable D diagonal in the Dicke basis."""
    n_vec = spec.eigenvectors.shape[1]
    if not (0 <= i < n_vec and 0 <= j < n_vec):
        raise IndexError(f"level indices ({i}, {j}) out of range for {n_vec} levels")
    d = np.asarray(diag_observable, dtype=float)
    v = spec.eigenvectors
    return float(np.dot(v[:, i] * d, v[:, j]))


def eigenbasis_matrix(spec: Spectrum, diag_observable, n_levels: int) -> np.ndarray:
    """All elements <E_i|D|E_j> for i, j < n_levels."""
    v = spec.eigenvectors[:, :n_levels]
    d = np.asarray(diag_observable, dtype=float)
    mat = v.T @ (d[:, None] * v)
    return 0.5 * (mat + mat.T)


def jz2_expectation(spec: Spectrum, level: int) -> float:
    """Full-space <E_level| Jz^2 |E_level>."""
    return eigenbasis_element(spec, spec.m_grid ** 2, level, level)


def m0_weight(spec: Spectrum) -> float:
    """|<m=0|E_0>|^2; zero for odd N where no m=0 state exists."""
    zero = np.flatnonzero(spec.m_grid == 0)
    if zero.size == 0:
        return 0.0
    return float(spec.eigenvectors[zero[0], 0] ** 2)


def ground_magnetization(params: ModelParams) -> float:
    """Intensive ground-state magnetisation m_z = (2/N) <Jz>."""
    spec = solve(params, n_lowest=1)
    return float(2.0 / params.n_spins * np.dot(spec.eigenvectors[:, 0] ** 2, spec.m_grid))


def susceptibility(params: ModelParams, mode: str = "exact", step_h: float = 1e-6) -> float:
    """Finite-N susceptibility dm_z/dh at h = 0, in units of 1/J.

    ``mode="exact"`` differentiates the exact ground-state magnetisation by a
    central difference over +-step_h and repeats at step_h/2; a relative change
    above 1% raises NonlinearResponseError. ``mode="two_level"`` returns the
    pseudospin estimate 2 N m*^2 / Delta E.
    """
    if mode == "two_level":
        from .semiclassics.mean_field import order_parameter

        m_star = order_parameter(params.gamma_ratio)
        spec = solve(params.with_(bias_h=0.0), n_lowest=2)
        return 2 * params.n_spins * m_star ** 2 / spec.delta_e
    if mode != "exact":
        raise ValueError(f"unknown susceptibility mode {mode!r}")
    if step_h <= 0:
        raise ValueError("step_h must be positive")

    def central(step):
        up = ground_magnetization(params.with_(bias_h=params.bias_h + step))
        dn = ground_magnetization(params.with_(bias_h=params.bias_h - step))
        return (up - dn) / (2 * step)

    chi = central(step_h)
    chi_half = central(step_h / 2)
    if abs(chi - chi_half) > 0.01 * abs(chi_half):
        raise NonlinearResponseError(
            f"susceptibility changed from {chi:.6g} to {chi_half:.6g} on halving "
            f"step_h={step_h:g}; reduce the step")
    return float(chi_half)
