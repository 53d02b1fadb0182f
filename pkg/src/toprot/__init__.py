"""Classical and quantum rotation numbers of freely rotating asymmetric tops."""

from toprot._backend import BACKEND
from toprot.classical import (
    ClassicalPoint,
    EulerState,
    Molecule,
    PRESETS,
    Regime,
    angular_momentum_trajectory,
    classify,
    delta_phi_one_period,
    get_molecule,
    integrate_euler_angles,
    momenta_from_angles,
    period,
    point_from_gamma,
    simulate_tre,
)
from toprot.quantum_spectrum import SpectrumLevel, WangBlock, build_blocks, eigen_tridiagonal, spectrum
from toprot.rotnum_classical import (
    AsymptoteCoefficients,
    Definition,
    RotationNumberResult,
    cos_theta_sq,
    geometric_area,
    second_action,
    separatrix_asymptote,
    theta_cl,
    tre_distance,
)
from toprot.rotnum_quantum import (
    Convention,
    LabeledLattice,
    RotationCell,
    assign_p,
    convergence_study,
    em_lattice,
    theta_q,
    theta_q_grid,
)
from toprot.specfun import complete_elliptic_K, jacobi_elliptic

__version__ = "0.1.0"
