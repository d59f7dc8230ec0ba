"""Exact reduced dynamics of spins dephased by damped thermal bosonic modes.

Closed-form maps for single spins, two coupled spins and two-level emitters,
spectral analysis of coupled mode networks, and a brute-force Lindblad
master-equation oracle for validating all of them.
"""

from ._kernels import BACKEND_NAME
from .emitter import EmitterParams, evolve_emitter
from .errors import (
    ConfigError,
    OracleAccuracyError,
    QuadratureConvergenceError,
    SpinBosonError,
    TruncationError,
)
from .network import (
    CouplingMatrix,
    FkPredictions,
    NormalModeDecomposition,
    TwistingPulse,
    build_random_coupling,
    build_uniform_coupling,
    decompose,
    fk_predictions,
    twisting_strength,
)
from .spectral import (
    DephasingFactors,
    ModeSpec,
    accumulate_factors,
    asymptotic_rates,
    correlation_function,
    dephasing_integrals_closed,
    dephasing_integrals_quadrature,
    dephasing_integrals_undamped,
    thermal_occupation,
)
from .spinmap import (
    SpinDensityMatrix,
    coherence_magnitude,
    dephasing_factor,
    evolve_spin,
)
from .twospin import (
    TwoSpinDensityMatrix,
    TwoSpinParams,
    antisymmetric_mode_spec,
    coupled_to_local,
    debye_rates,
    evolve_two_spins,
    local_to_coupled,
    normal_mode_frequencies,
    normal_mode_specs,
    symmetric_overlap,
    symmetric_projector_population,
    symmetric_projector_population_from_mode,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "ConfigError",
    "CouplingMatrix",
    "DephasingFactors",
    "EmitterParams",
    "FkPredictions",
    "ModeSpec",
    "NormalModeDecomposition",
    "OracleAccuracyError",
    "QuadratureConvergenceError",
    "SpinBosonError",
    "SpinDensityMatrix",
    "TruncationError",
    "TwistingPulse",
    "TwoSpinDensityMatrix",
    "TwoSpinParams",
    "accumulate_factors",
    "antisymmetric_mode_spec",
    "asymptotic_rates",
    "build_random_coupling",
    "build_uniform_coupling",
    "coherence_magnitude",
    "correlation_function",
    "coupled_to_local",
    "debye_rates",
    "decompose",
    "dephasing_factor",
    "dephasing_integrals_closed",
    "dephasing_integrals_quadrature",
    "dephasing_integrals_undamped",
    "evolve_emitter",
    "evolve_spin",
    "evolve_two_spins",
    "fk_predictions",
    "local_to_coupled",
    "normal_mode_frequencies",
    "normal_mode_specs",
    "symmetric_overlap",
    "symmetric_projector_population",
    "symmetric_projector_population_from_mode",
    "thermal_occupation",
    "twisting_strength",
]
