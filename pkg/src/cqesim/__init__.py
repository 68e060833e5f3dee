"""Contracted quantum eigensolver simulation library.

Ground-state solvers for many-fermion Hamiltonians in Jordan-Wigner
encoded and unencoded qubit-particle form, with exact-diagonalization
references and measurement resource estimation.
"""

from ._backend import backend_name
from .acse import (
    Ansatz,
    AnsatzLayer,
    ConvergenceTrace,
    CqeConfig,
    ResidualMatrix,
    choose_epsilon,
    merge_p_depth,
    quasi_newton_correct,
    residual_auxiliary,
    residual_exact,
    residual_parity_split,
    run_cqe,
    sparsify,
)
from .fcidump import FcidumpError, IntegralSet, load_fcidump, parse_fcidump
from .hamiltonian import (
    ReducedHamiltonian,
    build_reduced_hamiltonian,
    evolve_auxiliary,
    fci_ground_state,
    hartree_fock_reference,
    lowest_energy_determinants,
    pivoted_cholesky,
)
from .rdm import (
    Rdm2,
    compute_rdm2,
    count_rdm2_canonical,
    count_rdm2_elements,
    energy_from_rdm2,
)
from .resources import auxiliary_cost_report, count_cnots, measurement_groups
from .states import CapabilityError, FockState

__all__ = [
    "backend_name",
    "Ansatz",
    "AnsatzLayer",
    "ConvergenceTrace",
    "CqeConfig",
    "ResidualMatrix",
    "choose_epsilon",
    "merge_p_depth",
    "quasi_newton_correct",
    "residual_auxiliary",
    "residual_exact",
    "residual_parity_split",
    "run_cqe",
    "sparsify",
    "FcidumpError",
    "IntegralSet",
    "load_fcidump",
    "parse_fcidump",
    "ReducedHamiltonian",
    "build_reduced_hamiltonian",
    "evolve_auxiliary",
    "fci_ground_state",
    "hartree_fock_reference",
    "lowest_energy_determinants",
    "pivoted_cholesky",
    "Rdm2",
    "compute_rdm2",
    "count_rdm2_canonical",
    "count_rdm2_elements",
    "energy_from_rdm2",
    "auxiliary_cost_report",
    "count_cnots",
    "measurement_groups",
    "CapabilityError",
    "FockState",
]
__version__ = "0.1.0"
