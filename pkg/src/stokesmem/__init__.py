"""Spectral laboratory for Stokes flow with exponential memory on a ball.

Eigenmode layers (3D ball, 2D disk), closed-form adjoint mode dynamics under
the memory kernel, 8-mode packet selection, exact observability quotients and
their power-law scaling, the non-controllable-datum contradiction, forward
modal simulation with transposition checks, and finite-family Gramian
analysis.
"""

__version__ = "0.1.0"

from .eigen2d import EigenMode2D, compute_modes_2d, mode_table_2d
from .eigen3d import BallGeometry, EigenMode3D, compute_modes_3d, mode_table_3d
from .memory_modes import (
    MemoryParams,
    ModeDynamics,
    alpha_eval,
    alpha_oracle,
    integro_residual,
    memory_tail,
    mode_dynamics,
)
from .modetable import ModeTable
from .observability import (
    ObservabilityReport,
    SlopeFit,
    boundary_observation_norm,
    contradiction_report,
    fit_power_law,
    initial_norm_sq,
    observability_scan,
)
from .packet import PacketSelection, build_constraints, select_packet
from .simulate import (
    ControlSignal,
    modal_duality_check,
    observability_constant_scan,
    observability_gramian,
    simulate_distributed,
)

__all__ = [
    "__version__",
    "BallGeometry",
    "ControlSignal",
    "EigenMode2D",
    "EigenMode3D",
    "MemoryParams",
    "ModeDynamics",
    "ModeTable",
    "ObservabilityReport",
    "PacketSelection",
    "SlopeFit",
    "alpha_eval",
    "alpha_oracle",
    "boundary_observation_norm",
    "build_constraints",
    "compute_modes_2d",
    "compute_modes_3d",
    "contradiction_report",
    "fit_power_law",
    "initial_norm_sq",
    "integro_residual",
    "memory_tail",
    "modal_duality_check",
    "mode_dynamics",
    "mode_table_2d",
    "mode_table_3d",
    "observability_constant_scan",
    "observability_gramian",
    "observability_scan",
    "select_packet",
    "simulate_distributed",
]
