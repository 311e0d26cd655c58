"""Bosonic atom-molecule conversion: exact many-particle spectra and
dynamics, mean-field flow on the teardrop surface, and semiclassical
(Bohr-Sommerfeld/WKB) quantisation that recovers the former from the
latter."""

__version__ = "0.1.0"

from .core import (
    KzBasis,
    ModelParams,
    basis_states,
    make_params,
    params_from_mode_energies,
    teardrop_radius,
    teardrop_radius_sq,
)
from .meanfield import (
    BlochPoint,
    CanonicalPoint,
    FixedPoint,
    MeanFieldWavefunction,
    Trajectory,
    bloch_point,
    bloch_projection,
    critical_epsilon,
    energy_range,
    fixed_points,
    from_canonical,
    integrate_trajectory,
    mf_energy,
    mf_rhs,
    nls_rhs,
    to_canonical,
    wavefunction,
)
from .quantum import (
    MomentSet,
    OperatorMatrix,
    QuantumState,
    VariationalSpec,
    basis_state,
    build_generators,
    build_hamiltonian,
    casimir_matrix,
    evolve_state,
    exact_spectrum,
    observables,
    structure_polynomial,
    variational_ground_state,
)
from .semiclassics import (
    PotentialCurves,
    SemiclassicalSpectrum,
    TurningPoints,
    WKBState,
    action,
    density_of_states,
    elliptic_k,
    period,
    potential_curves,
    quantize,
    turning_points,
    wkb_state,
)

__all__ = [
    "__version__",
    "KzBasis",
    "ModelParams",
    "basis_states",
    "make_params",
    "params_from_mode_energies",
    "teardrop_radius",
    "teardrop_radius_sq",
    "BlochPoint",
    "CanonicalPoint",
    "FixedPoint",
    "MeanFieldWavefunction",
    "Trajectory",
    "bloch_point",
    "bloch_projection",
    "critical_epsilon",
    "energy_range",
    "fixed_points",
    "from_canonical",
    "integrate_trajectory",
    "mf_energy",
    "mf_rhs",
    "nls_rhs",
    "to_canonical",
    "wavefunction",
    "MomentSet",
    "OperatorMatrix",
    "QuantumState",
    "VariationalSpec",
    "basis_state",
    "build_generators",
    "build_hamiltonian",
    "casimir_matrix",
    "evolve_state",
    "exact_spectrum",
    "observables",
    "structure_polynomial",
    "variational_ground_state",
    "PotentialCurves",
    "SemiclassicalSpectrum",
    "TurningPoints",
    "WKBState",
    "action",
    "density_of_states",
    "elliptic_k",
    "period",
    "potential_curves",
    "quantize",
    "turning_points",
    "wkb_state",
]
