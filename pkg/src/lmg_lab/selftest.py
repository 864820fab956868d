"""Quick numerical self-checks exercised by ``lmg-lab selftest``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .opensystem import (
    LevelSystem,
    build_superoperator,
    k3_stationary,
    propagate,
    truncate,
)
from .params import BENCHMARK, DELTA_E_BENCHMARK, ModelParams
from .semiclassics import instanton_action_closed, instanton_action_integral, macrorealist_bound
from .spectrum import eigenbasis_element, sign_observable, solve


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _n2_eigenvalues():
    ev = solve(ModelParams(2, 0.5)).eigenvalues
    want = np.sort([(-1 - math.sqrt(5)) / 2, -1.0, (-1 + math.sqrt(5)) / 2])
    err = float(np.max(np.abs(ev - want)))
    return err < 1e-10, f"max error {err:.2e}"


def _toy_system():
    return LevelSystem(3, np.zeros(3), np.diag([-1.0, 0.0, 1.0]), np.eye(3), 1.0, j_phys=1.0)


def _dephasing_decay():
    sys = _toy_system()
    rho = np.full((3, 3), 1.0 / 3, dtype=complex)
    out = propagate(build_superoperator(sys, 0.1), rho, 2.0)
    ratio = abs(out[0, 2]) / abs(rho[0, 2])
    err = abs(ratio - math.exp(-0.4)) / math.exp(-0.4)
    return err < 1e-9, f"relative error {err:.2e}"


def _trace_preservation():
    rng = np.random.default_rng(7)
    sys = _toy_system()
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    out = propagate(build_superoperator(sys, 0.37), rho, 3.1)
    err = abs(np.trace(out) - 1.0)
    return err < 1e-10, f"trace error {err:.2e}"


def _benchmark_spectrum():
    spec = solve(BENCHMARK, n_lowest=10)
    gap = spec.delta_e * BENCHMARK.j_phys
    q = sign_observable(BENCHMARK.n_spins)
    q01 = eigenbasis_element(spec, q, 0, 1) ** 2
    ok = abs(gap / DELTA_E_BENCHMARK - 1) < 5e-3 and abs(q01 / 0.9436 - 1) < 2e-3
    return ok, f"gap {gap:.2f} rad/s, Q01^2 {q01:.5f}"


def _parity():
    spec = solve(BENCHMARK, n_lowest=10)
    q = sign_observable(BENCHMARK.n_spins)
    diag = max(abs(eigenbasis_element(spec, spec.m_grid, k, k)) for k in range(10))
    even = max(abs(eigenbasis_element(spec, q, k, 0)) for k in (2, 4))
    return max(diag, even) < 1e-8, f"max |<Ek|Jz|Ek>| {diag:.1e}, max |Q_k0| (k even) {even:.1e}"


def _k3_five_level():
    spec = solve(BENCHMARK, n_lowest=5)
    sys = truncate(spec, sign_observable(BENCHMARK.n_spins), 5)
    k3 = k3_stationary(sys, 0.05).k3
    return abs(k3 / 1.3167 - 1) < 5e-3, f"K3(0.05 s^-1) = {k3:.4f}"


def _instanton():
    grid = np.linspace(0.5, 0.995, 50)
    err = max(abs(instanton_action_closed(g) - instanton_action_integral(g)) for g in grid)
    return err < 1e-8, f"max closed-vs-quadrature difference {err:.1e}"


def _macrorealism():
    b = macrorealist_bound()
    return (b.max_k3, b.min_k3, len(b.per_assignment)) == (1, -3, 8), f"max {b.max_k3}, min {b.min_k3}"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("N=2 eigenvalues", _n2_eigenvalues),
    ("dephasing decay", _dephasing_decay),
    ("trace preservation", _trace_preservation),
    ("benchmark gap and Q01^2", _benchmark_spectrum),
    ("parity selection", _parity),
    ("five-level K3 at 0.05 s^-1", _k3_five_level),
    ("instanton action quadrature", _instanton),
    ("macrorealist enumeration", _macrorealism),
]


def run_selftest() -> list[Check]:
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, not an abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(Check(name, bool(ok), detail))
    return results
