"""Coupled-cavity array with detuned cavities: scattering, bound states, resonances."""
from .lattice import AmplitudeVector, Boundary, Impurity, LatticeSpec, ModelError, build_hamiltonian, dispersion
from .scattering import ScatteringSolution, reflect_double, reflect_single
from .spectral import (
    BoundStateSolution,
    NoState,
    QuantizationBranch,
    ResonantStateSolution,
    bound_state_single,
    double_bound_states,
    quantization_solve,
    resonant_state,
)
from .oracle import diagonalize, evolve_packet, match_bound_states

__all__ = [
    "AmplitudeVector", "Boundary", "Impurity", "LatticeSpec", "ModelError", "build_hamiltonian", "dispersion",
    "ScatteringSolution", "reflect_single", "reflect_double",
    "BoundStateSolution", "ResonantStateSolution", "NoState", "QuantizationBranch",
    "bound_state_single", "double_bound_states", "quantization_solve", "resonant_state",
    "diagonalize", "evolve_packet", "match_bound_states",
]
__version__ = "0.1.0"
