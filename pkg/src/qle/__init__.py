"""Quantum and thermodynamic limits on resonator time-bandwidth products."""

from .langevin import (
    ClassicalDrive,
    Classification,
    MomentState,
    MomentTrajectory,
    ResonatorModel,
    TbpReport,
    ase_penalty,
    commutator_analytic,
    integrate_classical,
    propagate_moments,
    qmfs_check,
    required_kappa,
    tbp_report,
)
from .network import (
    CouplingMatrix,
    GaugeSolution,
    ReservoirDecomposition,
    decompose_reservoir,
    solve_gauge,
    validate_coupling,
)
from .oracle import discrete_mode_oracle
from .scattering import ScatteringMatrix, classify, dilate_to_unitary, two_port_closure_check
from .thermo import Bath, BathSystem, Link, LinkMode, detect_violation, step, three_bath_restore

__version__ = "0.1.0"
