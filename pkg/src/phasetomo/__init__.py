"""phasetomo: direct wave-function tomography as complex phase estimation.

A numerical laboratory covering single-qubit direct tomography, the
NOON-pointer, Dicke-pointer and time-reversal-ensemble Heisenberg-limit
schemes, with analytic variance/Fisher predictions cross-validated by
seeded Monte Carlo measurement simulation.
"""

__version__ = "0.1.0"

from .coupling import (  # noqa: F401
    AlphaBeta,
    ComplexPhase,
    CouplingConfig,
    alpha_beta,
    final_pointer_state,
    final_pointer_state_from_phase,
    phase_from_alpha_beta,
    psi_from_phase,
)
from .states import (  # noqa: F401
    SystemState,
    make_state,
    preset_state,
    tilde_psi,
    time_reverse,
)
