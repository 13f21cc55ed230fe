"""Collision-model simulator and dissipative classifier for qubit
information reservoirs."""

__version__ = "0.1.0"

from .classify import Decision, decide_phi, decide_theta, pattern_scan
from .engine import (
    CollisionSchedule,
    NoiseParams,
    ReservoirSpec,
    TrajectoryRecord,
    build_interaction_hamiltonian,
    collide_once,
    decay_step,
    sample_schedule,
    simulate,
    steady_state_estimate,
)
from .master import (
    MicromaserCoefficients,
    bloch_rhs,
    closed_form_steady_state,
    coefficients,
    integrate_bloch,
    micromaser_liouvillian,
)
from .qfi import (
    QfiResult,
    dphi_rho,
    dtheta_rho,
    qfi_phi_analytic,
    qfi_scan_decide,
    qfi_theta_analytic_single,
    qfi_tls,
)
from .states import BlochParams, ReservoirMoments, pauli_expectations, pure_state, reservoir_moments
from .train import TrainConfig, TrainTrace, actual_magnetization, cost, cost_surface, gradient, train

__all__ = [
    "__version__",
    "BlochParams",
    "CollisionSchedule",
    "Decision",
    "MicromaserCoefficients",
    "NoiseParams",
    "QfiResult",
    "ReservoirMoments",
    "ReservoirSpec",
    "TrainConfig",
    "TrainTrace",
    "TrajectoryRecord",
    "actual_magnetization",
    "bloch_rhs",
    "build_interaction_hamiltonian",
    "closed_form_steady_state",
    "coefficients",
    "collide_once",
    "cost",
    "cost_surface",
    "decay_step",
    "decide_phi",
    "decide_theta",
    "dphi_rho",
    "dtheta_rho",
    "gradient",
    "integrate_bloch",
    "micromaser_liouvillian",
    "pattern_scan",
    "pauli_expectations",
    "pure_state",
    "qfi_phi_analytic",
    "qfi_scan_decide",
    "qfi_theta_analytic_single",
    "qfi_tls",
    "reservoir_moments",
    "sample_schedule",
    "simulate",
    "steady_state_estimate",
    "train",
]
