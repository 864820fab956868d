"""Numerical laboratory for the Lipkin-Meshkov-Glick model: exact Dicke-sector
spectra, collective-dephasing Lindblad dynamics with Leggett-Garg correlators,
semiclassical estimates and a classical Langevin comparison."""
from .params import BENCHMARK, DELTA_E_BENCHMARK, J_PHYS, KBT_PER_NK, ModelParams
from .spectrum import (
    ConvergenceError,
    NonlinearResponseError,
    Spectrum,
    TridiagonalHamiltonian,
    build_hamiltonian,
    diagonalize,
    eigenbasis_element,
    eigenbasis_matrix,
    ground_magnetization,
    jz2_expectation,
    m0_weight,
    sign_observable,
    solve,
    susceptibility,
)
from .opensystem import (
    BracketError,
    K3Report,
    LevelSystem,
    build_superoperator,
    k3_sequential,
    k3_stationary,
    lueders_instrument,
    propagate,
    propagator,
    t2_phys,
    threshold_gamma,
    truncate,
)

__version__ = "0.1.0"


def benchmark_system(n_levels: int = 5, params: ModelParams = BENCHMARK) -> LevelSystem:
    """Truncated level system for ``params`` (default N=370, Gamma/J=0.95)."""
    spec = solve(params, n_lowest=max(n_levels, 2))
    return truncate(spec, sign_observable(params.n_spins), n_levels, params.j_phys)
