"""Semiclassical moment dynamics for a particle on a circle or a sphere.

The classical angles and momenta are extended with all second-order
central moments of the Weyl-symbol distribution; the coupled system closes
at second order and is integrated as an ordinary flow.  Subpackages:
states and validation, exact bracket algebra, fast and generic flows,
Gaussian initial packets, the adaptive integrator, trajectory analysis,
parameter sweeps, and the command-line front end.
"""
from .algebra import (
    CircleHamiltonian,
    SphereHamiltonian,
    bracket,
    bracket_table,
    generic_rhs,
    quantum_hamiltonian,
)
from .analysis import (
    EXCLUDE_TERMINATED,
    LAST_VALID_STATE,
    EnsembleResult,
    EnsembleRun,
    counting_tolerance,
    ensemble_stats,
    hemisphere_ratio,
    mean_final_theta,
    phase_shift,
    phase_shift_scale,
    predicted_phase_shift,
    time_to_theta,
    uncertainty_products,
)
from .dynamics import (
    CIRCLE_FREE,
    EVOLVE,
    FROZEN,
    SPHERE_FREE,
    SPHERE_MAKAROV,
    ZEROED,
    MakarovPotential,
    SystemKind,
    effective_potential,
    energy,
    rhs,
)
from .ensemble import SweepSpec, run_sweep
from .initial import (
    GaussianSpec,
    circle_initial_moments,
    solve_kappa,
    sphere_initial_moments,
)
from .integrate import (
    IntegratorConfig,
    Trajectory,
    convergence_check,
    integrate,
    integrate_flow,
)
from .states import (
    CIRCLE,
    SPHERE,
    MomentState,
    SystemParams,
    moment_names,
    random_valid_state,
    validate_state,
)

__version__ = "0.1.0"

__all__ = [
    "CIRCLE",
    "CIRCLE_FREE",
    "EVOLVE",
    "EXCLUDE_TERMINATED",
    "FROZEN",
    "LAST_VALID_STATE",
    "SPHERE",
    "SPHERE_FREE",
    "SPHERE_MAKAROV",
    "ZEROED",
    "CircleHamiltonian",
    "EnsembleResult",
    "EnsembleRun",
    "GaussianSpec",
    "IntegratorConfig",
    "MakarovPotential",
    "MomentState",
    "SphereHamiltonian",
    "SweepSpec",
    "SystemKind",
    "SystemParams",
    "Trajectory",
    "bracket",
    "bracket_table",
    "circle_initial_moments",
    "convergence_check",
    "counting_tolerance",
    "effective_potential",
    "energy",
    "ensemble_stats",
    "generic_rhs",
    "hemisphere_ratio",
    "integrate",
    "integrate_flow",
    "mean_final_theta",
    "moment_names",
    "phase_shift",
    "phase_shift_scale",
    "predicted_phase_shift",
    "quantum_hamiltonian",
    "random_valid_state",
    "rhs",
    "solve_kappa",
    "sphere_initial_moments",
    "time_to_theta",
    "uncertainty_products",
    "validate_state",
    "__version__",
]
