"""Closed-form and semiclassical estimates."""
from .instanton import (
    FITTED_C0_OVER_KBT,
    GoldilocksRow,
    fit_c0,
    goldilocks,
    instanton_action,
    instanton_action_closed,
    instanton_action_integral,
    instanton_splitting,
)
from .lgi import (
    HierarchyReport,
    MacrorealistBound,
    MultilevelK3,
    hierarchy,
    k3_coherent_multilevel,
    k3_two_level,
    k3_two_level_curve,
    macrorealist_bound,
    multilevel_inputs,
    two_level_coefficient,
    xi_threshold,
)
from .mean_field import (
    Barrier,
    DisorderedPhaseError,
    KramersTime,
    NormalModes,
    Spinodal,
    acf_linearization,
    barrier,
    coherent_overlap,
    curvature,
    free_energy,
    free_energy_gradient,
    is_ordered,
    kramers_time,
    order_parameter,
    spinodal_field,
    sweep_window,
)
from .scaling import (
    DephasingRates,
    dephasing_rates,
    freezeout_exponent,
    lz_crossover_schematic,
    lz_error,
    lz_normalized_time,
    lz_sweep_rate,
)
