"""Symmetric informationally complete POVMs of arbitrary rank."""

__version__ = "0.1.0"

from .bloch import (
    classify_by_trace_cube,
    eigen_extremes,
    gell_mann_basis,
    inner,
    norm,
    scaling_membership,
    shrink_factor,
)
from .povm import Povm, SiReport, probabilities, random_si_povm, reconstruct_state, verify_mub, verify_si
from .sic_search import SearchConfig, SearchResult, frame_potential, phase_objective, search, sic_from_fiducial
from .wh_covariant import PhaseVector, covariant_si_povm, generating_vector, make_phase_vector, orbit_and_check
from .wh_group import GroupContext, convolve_coefficients, displacement, expand, reconstruct, sign, trace_product
from .wigner import WignerFunction, parity_operator, state_from_wigner, wigner_function, wigner_povm
