"""Physical constants and the model parameter bundle.

All internal arithmetic is done in units where the Ising coupling J = 1.
``J_PHYS`` converts dimensionless energies and rates to rad/s, and is only
applied when numbers leave the library (reports, CLI output).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

#: Ising coupling J in rad/s for the benchmark BEC.
J_PHYS = 37195.4

#: k_B T in rad/s per nanokelvin.
KBT_PER_NK = 131.0

#: Benchmark tunnel splitting, rad/s (N=370, Gamma/J=0.95).
DELTA_E_BENCHMARK = 1310.0


@dataclass(frozen=True)
class ModelParams:
    """Parameter bundle for one LMG configuration.

    Attributes
    ----------
    n_spins : int
        Number of spins N (Dicke dimension N + 1).
    gamma_ratio : float
        Transverse field over coupling, Gamma/J.
    j_phys : float
        J in rad/s, used only for unit conversion at the boundaries.
    temp_nK : float
        Temperature in nanokelvin.
    bias_h : float
        Longitudinal field in units of J.
    """

    n_spins: int
    gamma_ratio: float
    j_phys: float = J_PHYS
    temp_nK: float = 10.0
    bias_h: float = 0.0

    def __post_init__(self):
        if int(self.n_spins) != self.n_spins or self.n_spins < 2:
            raise ValueError(f"n_spins must be an integer >= 2, got {self.n_spins!r}")
        for name in ("gamma_ratio", "j_phys", "temp_nK", "bias_h"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.gamma_ratio < 0:
            raise ValueError(f"gamma_ratio must be non-negative, got {self.gamma_ratio}")
        if self.j_phys <= 0:
            raise ValueError(f"j_phys must be positive, got {self.j_phys}")
        if self.temp_nK < 0:
            raise ValueError(f"temp_nK must be non-negative, got {self.temp_nK}")

    @property
    def kbt_phys(self) -> float:
        """k_B T in rad/s."""
        return KBT_PER_NK * self.temp_nK

    @property
    def kbt(self) -> float:
        """k_B T in units of J."""
        return self.kbt_phys / self.j_phys

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


BENCHMARK = ModelParams(n_spins=370, gamma_ratio=0.95)
