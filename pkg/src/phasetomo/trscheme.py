"""Time-reversal-ensemble scheme: pairing a system ensemble with its
complex-conjugated replica.

Coupling N pointer-qubit pairs to (state, conjugated state) and
post-selecting leaves the 2N-qubit NOON-subspace amplitudes

    amp0 ∝ [(alpha - i beta)(alpha* - i beta*)]^N
    amp1 ∝ [(alpha* + i beta*)(alpha + i beta)]^N

whose moduli are equal for *any* complex (alpha, beta): the pairing
cancels Im(phi) exactly, so the state is always the balanced
(|0...0> + e^{2 i N phi1} |1...1>)/sqrt(2): a plain amplified-phase
interferometer for phi1 alone. phi2 estimation reuses the NOON scheme on
the untransformed ensemble.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .coupling import AlphaBeta
from .errors import (
    ConfigError,
    OutOfDomainMeanError,
    PoleAtGammaError,
    SingularWorkingPointError,
)


@dataclass(frozen=True)
class TrPairState:
    """2N-qubit NOON-subspace state of the paired ensembles.

    The modulus identity forces |amp0| = |amp1| = 1/sqrt(2).
    """

    n_pairs: int
    amp0: complex
    amp1: complex

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ConfigError("n_pairs must be >= 1")
        root_half = 1 / np.sqrt(2)
        if (
            abs(abs(self.amp0) - root_half) > 1e-12
            or abs(abs(self.amp1) - root_half) > 1e-12
        ):
            raise ConfigError("TR pair state must be balanced (moduli 1/sqrt 2)")

    @property
    def relative_phase(self) -> float:
        """arg(amp1/amp0), the amplified 2*N*phi1."""
        return float(cmath.phase(self.amp1 / self.amp0))


def tr_final_state(ab: AlphaBeta, n: int) -> TrPairState:
    """Literal paired construction, normalized in log-polar form."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    a, b = complex(ab.alpha), complex(ab.beta)
    z0 = (a - 1j * b) * (a.conjugate() - 1j * b.conjugate())
    z1 = (a.conjugate() + 1j * b.conjugate()) * (a + 1j * b)
    if min(abs(z0), abs(z1)) < 1e-300:
        raise PoleAtGammaError("paired amplitude product vanished")
    w0 = n * cmath.log(z0)
    w1 = n * cmath.log(z1)
    shift = max(w0.real, w1.real)
    a0 = cmath.exp(w0 - shift)
    a1 = cmath.exp(w1 - shift)
    nrm = np.hypot(abs(a0), abs(a1))
    return TrPairState(n, a0 / nrm, a1 / nrm)


def modulus_identity_check(a: complex, b: complex) -> float:
    """| |(a-ib)(a*-ib*)| - |(a*+ib*)(a+ib)| | for arbitrary complex a, b."""
    a, b = complex(a), complex(b)
    lhs = abs((a - 1j * b) * (a.conjugate() - 1j * b.conjugate()))
    rhs = abs((a.conjugate() + 1j * b.conjugate()) * (a + 1j * b))
    return abs(lhs - rhs)


def tr_parity_expectation(phi1: float, n: int) -> float:
    """<sigma_x^(x 2N)> = cos(2 N phi1) on the paired final state."""
    return float(np.cos(2 * n * phi1))


def tr_estimate_phi1(measured_parity: float, n: int) -> tuple[float, float]:
    """(phi1 estimate, per-shot variance) from the 2N-qubit parity.

    phi1 = arccos(parity)/(2N) on the branch [0, pi/(2N)]; the propagated
    per-shot variance is identically 1/(4 N^2). The fringe extrema
    |parity| = 1 (sin(2 N phi1) = 0) have vanishing slope and are rejected.
    """
    if n < 1:
        raise ConfigError("n must be >= 1")
    if abs(measured_parity) > 1:
        raise OutOfDomainMeanError(
            f"parity mean {measured_parity!r} outside [-1, 1]"
        )
    if abs(abs(measured_parity) - 1.0) < 1e-12:
        raise SingularWorkingPointError(
            "parity at a fringe extremum: estimator slope vanishes"
        )
    phi1 = float(np.arccos(measured_parity) / (2 * n))
    variance = 1.0 / (4 * n * n)
    return phi1, variance
