"""Single-qubit direct tomography: probabilities, reconstruction, moments.

The pointer is prepared in the +1 eigenstate of K1 (the optimal-sensitivity
choice <K2>_in = <K>_in = 0), three outcome probabilities are read out, and
the amplitude is recovered exactly by inverting the complex-phase map. Two
closed-form moment maps (the optimal two-observable pair and the full
rotation-plus-shift transformation) are provided for estimation work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import (
    AXIS_TRIPLES,
    ComplexPhase,
    CouplingConfig,
    alpha_beta,
    final_pointer_state,
    psi_from_phase,
)
from .errors import ConfigError, OutOfDomainMeanError, SingularThetaError
from .states import SystemState


@dataclass(frozen=True)
class ProbTriple:
    """Probabilities of outcome +1 for the measurements K, K1, K2."""

    p_k: float
    p_k1: float
    p_k2: float

    def __post_init__(self):
        for name in ("p_k", "p_k1", "p_k2"):
            p = getattr(self, name)
            if not -1e-12 <= p <= 1 + 1e-12:
                raise ConfigError(f"{name} = {p!r} is not a probability")


def pointer_input_default(axis: str = "z") -> np.ndarray:
    """+1 eigenstate of K1 for the given coupling axis."""
    k1 = AXIS_TRIPLES[axis][1]
    evals, evecs = np.linalg.eigh(k1)
    vec = evecs[:, int(np.argmax(evals))].astype(complex)
    # fix the gauge: largest component real positive
    i = int(np.argmax(np.abs(vec)))
    return vec * (abs(vec[i]) / vec[i])


def forward_probabilities(
    state: SystemState,
    config: CouplingConfig,
    pointer_in: np.ndarray | None = None,
) -> ProbTriple:
    """Exact outcome probabilities p_M = (1 + <M>_f)/2 on the final pointer."""
    pin = pointer_input_default(config.pointer_axis) if pointer_in is None else pointer_in
    pin = np.asarray(pin, dtype=complex)
    if abs(np.linalg.norm(pin) - 1) > 1e-10:
        raise ConfigError("pointer_in must be normalized")
    ab = alpha_beta(state, config)
    fin = final_pointer_state(ab, pin, config.pointer_axis)
    K, K1, K2 = AXIS_TRIPLES[config.pointer_axis]

    def prob(M: np.ndarray) -> float:
        return float((1 + np.real(fin.conj() @ M @ fin)) / 2)

    return ProbTriple(p_k=prob(K), p_k1=prob(K1), p_k2=prob(K2))


def phase_from_probabilities(probs: ProbTriple) -> ComplexPhase:
    """Invert the optimal-input moment maps for the complex phase.

    With the default pointer input, <K1>_f = cos(phi1)/cosh(phi2),
    <K2>_f = sin(phi1)/cosh(phi2) and <K>_f = tanh(phi2); phi2 follows from
    artanh, phi1 from atan2 of the two transverse moments.
    """
    k_f = 2 * probs.p_k - 1
    if abs(k_f) >= 1:
        raise OutOfDomainMeanError(f"<K>_f = {k_f!r} leaves artanh's domain")
    phi2 = float(np.arctanh(k_f))
    phi1 = float(np.arctan2(2 * probs.p_k2 - 1, 2 * probs.p_k1 - 1))
    return ComplexPhase(phi1, phi2)


def reconstruct_eq5(
    probs: ProbTriple, theta: float, psi_tilde: float, d: int
) -> complex:
    """Recover psi_x from the three probabilities, psi_tilde and theta.

    Exact at every theta in (0, pi): the probabilities are inverted to the
    complex phase, which maps back to the amplitude in closed form. ``d``
    is accepted for interface completeness; the phase route does not need
    it. The endpoints theta in {0, pi} (sin theta = 0) are rejected as the
    documented singular set of the three-probability reconstruction.
    """
    if psi_tilde <= 0:
        raise ConfigError("psi_tilde must be positive")
    if d < 2:
        raise ConfigError("dimension must be >= 2")
    if abs(np.sin(theta)) < 1e-12:
        raise SingularThetaError(
            f"reconstruction is singular at theta = {theta!r}: sin(theta) = 0"
        )
    phi = phase_from_probabilities(probs)
    return psi_from_phase(phi, psi_tilde, theta)


def optimal_expectations(phi: ComplexPhase, k1_in: float) -> tuple[float, float]:
    """(<K1>_f, <K>_f) for an input with <K2>_in = <K>_in = 0."""
    k1_f = np.cos(phi.phi1) / np.cosh(phi.phi2) * k1_in
    k_f = np.tanh(phi.phi2)
    return float(k1_f), float(k_f)


def general_expectations(
    phi: ComplexPhase, k_in: float, k1_in: float, k2_in: float
) -> tuple[float, float, float]:
    """(<K>_f, <K1>_f, <K2>_f) for an arbitrary Bloch vector input.

    Re(phi) rotates (<K1>, <K2>) about K; Im(phi) shifts <K>; both share
    the denominator cosh(phi2) + sinh(phi2) <K>_in.
    """
    norm = np.sqrt(k_in**2 + k1_in**2 + k2_in**2)
    if norm > 1 + 1e-10:
        raise ConfigError(f"input Bloch vector has norm {norm!r} > 1")
    c1, s1 = np.cos(phi.phi1), np.sin(phi.phi1)
    ch, sh = np.cosh(phi.phi2), np.sinh(phi.phi2)
    den = ch + sh * k_in
    k1_f = (c1 * k1_in - s1 * k2_in) / den
    k2_f = (s1 * k1_in + c1 * k2_in) / den
    k_f = (sh + ch * k_in) / den
    return float(k_f), float(k1_f), float(k2_f)


def estimate_phase(
    k1_f: float, k_f: float, k1_in: float = 1.0, k2_f: float | None = None
) -> tuple[ComplexPhase, bool]:
    """Invert (<K1>_f, <K>_f) for phi; sign of phi1 needs <K2>_f.

    Returns (phase, sign_resolved). Without a measured <K2>_f the sign of
    phi1 is ambiguous and the positive branch is reported with
    ``sign_resolved = False``.
    """
    if abs(k_f) >= 1:
        raise OutOfDomainMeanError(f"<K>_f = {k_f!r} leaves artanh's domain")
    if k1_in == 0:
        raise ConfigError("k1_in = 0 carries no phi1 signal")
    phi2 = float(np.arctanh(k_f))
    arg = k1_f * np.cosh(phi2) / k1_in
    if abs(arg) > 1 + 1e-12:
        raise OutOfDomainMeanError(
            f"|<K1>_f cosh(phi2)/k1_in| = {abs(arg)!r} > 1"
        )
    phi1 = float(np.arccos(np.clip(arg, -1, 1)))
    resolved = k2_f is not None
    if resolved and k2_f < 0:
        phi1 = -phi1
    return ComplexPhase(phi1, phi2), resolved
