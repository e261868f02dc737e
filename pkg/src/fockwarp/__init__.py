"""Deformed coordinate operators on a truncated lattice Fock space.

Builds second-quantized coordinate, momentum, and velocity operators
over a finite momentum lattice, applies momentum-diagonal warped
deformations, and verifies the resulting operator identities exactly or
by measured refinement convergence.
"""

__version__ = "0.1.0"

from .lattice import LatticeSpec, MomentumGrid, build_grid, dft_one_particle, negation_index, position_multiplier
from .fock import FockBasis, basis_dimension, enumerate_basis, sector_table
from .operators import (
    FockOperator,
    as_matrix,
    coordinate_op_spectral,
    coordinate_op_stencil,
    momentum_op,
    number_op,
    nwp_op,
    second_quantize,
    tilde_velocity_op,
    time_op,
    translate,
    velocity_op,
)
from .deform import ThetaMatrix, deformed_commutator, rieffel_product, twist_phases, validate_theta, warp
from .ensembles import TestStateEnsemble, fock_ensemble, gaussian_packet, one_particle_ensemble
from .checks import check_exact_suite, fit_order, relative_residual, run_convergence_suite
