"""System-pointer coupling, post-selection and the complex phase map.

Coupling a single probe qubit to basis component ``x`` with strength theta
and post-selecting the system on the uniform state leaves the pointer in
``(alpha*I - i*beta*K)|in>`` (normalized), with

    alpha = (psi_tilde - psi_x + psi_x cos(theta/2)) / sqrt(d)
    beta  = psi_x sin(theta/2) / sqrt(d)

The same map is a rotation by a *complex* angle phi defined through
``cos(phi/2) = alpha / sqrt(alpha^2 + beta^2)`` and
``sin(phi/2) = beta / sqrt(alpha^2 + beta^2)``; phi = phi1 + i*phi2 is the
quantity every estimation scheme in this package targets. Re(phi) acts as
an ordinary rotation about K, Im(phi) as a non-unitary amplitude shift.

Branch convention: Re(phi/2) lies in (-pi/2, pi/2] (so phi -> 0 in the
weak-coupling limit), and complex square roots are principal.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchAmbiguityError,
    ConfigError,
    DegenerateAlphaBetaError,
    PoleAtPhaseError,
)
from .states import SystemState, tilde_psi

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

#: coupling axis -> (K, K1, K2), a right-handed perpendicular triple
AXIS_TRIPLES = {
    "z": (SIGMA_Z, SIGMA_X, SIGMA_Y),
    "y": (SIGMA_Y, SIGMA_Z, SIGMA_X),
}

DEGENERACY_TOL = 1e-14


@dataclass(frozen=True)
class CouplingConfig:
    """Coupling strength, target basis index (1-based) and pointer axis."""

    theta: float
    target_x: int
    pointer_axis: str = "z"

    def __post_init__(self):
        if not 0 < self.theta <= np.pi:
            raise ConfigError(
                f"theta must lie in (0, pi], got {self.theta!r}; theta = 0 "
                "carries no coupling"
            )
        if self.target_x < 1:
            raise ConfigError("target_x is a 1-based basis index")
        if self.pointer_axis not in AXIS_TRIPLES:
            raise ConfigError(f"pointer_axis must be one of {set(AXIS_TRIPLES)}")


@dataclass(frozen=True)
class AlphaBeta:
    """Post-selected pointer-map amplitudes."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        q = self.alpha**2 + self.beta**2
        scale = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(q) <= DEGENERACY_TOL * max(scale, 1e-300):
            raise DegenerateAlphaBetaError(
                "alpha^2 + beta^2 vanishes; no finite phase exists"
            )


@dataclass(frozen=True)
class ComplexPhase:
    """phi = phi1 + i*phi2 with phi1 on the principal branch (-pi, pi]."""

    phi1: float
    phi2: float

    def __post_init__(self):
        if not -np.pi < self.phi1 <= np.pi + 1e-12:
            raise ConfigError(f"phi1 = {self.phi1!r} outside (-pi, pi]")

    @property
    def value(self) -> complex:
        return complex(self.phi1, self.phi2)

    @classmethod
    def from_complex(cls, phi: complex) -> "ComplexPhase":
        return cls(float(phi.real), float(phi.imag))


def alpha_beta(state: SystemState, config: CouplingConfig) -> AlphaBeta:
    """Evaluate (alpha, beta) for one basis component of one state."""
    if config.target_x > state.dim:
        raise ConfigError(
            f"target_x = {config.target_x} exceeds state dimension {state.dim}"
        )
    d = state.dim
    psi_x = complex(state.amplitudes[config.target_x - 1])
    pt = tilde_psi(state)
    half = config.theta / 2
    alpha = (pt - psi_x + psi_x * np.cos(half)) / np.sqrt(d)
    beta = psi_x * np.sin(half) / np.sqrt(d)
    return AlphaBeta(alpha, beta)


def phase_from_alpha_beta(ab: AlphaBeta) -> ComplexPhase:
    """Invert cos(phi/2) ∝ alpha, sin(phi/2) ∝ beta on the principal branch.

    The complex arctangent is evaluated through whichever of beta/alpha or
    alpha/beta is better conditioned; the result is wrapped so that
    Re(phi/2) ∈ (-pi/2, pi/2]. The wrap flips the signs of cos(phi/2) and
    sin(phi/2) together, which is the allowed overall sign of the square
    root of alpha^2 + beta^2.
    """
    a, b = complex(ab.alpha), complex(ab.beta)
    if abs(a) < 1e-300 and abs(b) < 1e-300:
        raise BranchAmbiguityError("alpha = beta = 0 has no phase")
    if abs(a) >= abs(b):
        half = cmath.atan(b / a)
    else:
        half = np.pi / 2 - cmath.atan(a / b)
    if half.real > np.pi / 2:
        half -= np.pi
    elif half.real <= -np.pi / 2:
        half += np.pi
    return ComplexPhase.from_complex(2 * half)


def psi_from_phase(phi: ComplexPhase, psi_tilde: float, theta: float) -> complex:
    """Recover the amplitude psi_x from an estimated phase.

    Uses the pole-free form
    ``psi_x = psi_tilde sin(phi/2) / (2 sin(theta/4) cos(theta/4 - phi/2))``,
    equivalent to the tan(phi/2) form wherever the latter is finite.
    """
    if not 0 < theta <= np.pi:
        raise ConfigError(f"theta must lie in (0, pi], got {theta!r}")
    half = phi.value / 2
    quarter = theta / 4
    den = 2 * np.sin(quarter) * cmath.cos(quarter - half)
    if abs(den) < 1e-14:
        raise PoleAtPhaseError(
            f"phase {phi.value!r} sits at the pole of the inversion formula"
        )
    return psi_tilde * cmath.sin(half) / den


def complex_rotation(phi: complex, axis: str = "z") -> np.ndarray:
    """e^{-i phi K / 2} = cos(phi/2) I - i sin(phi/2) K, complex phi.

    Valid because K^2 = I for both supported axes.
    """
    K = AXIS_TRIPLES[axis][0]
    half = phi / 2
    return cmath.cos(half) * IDENTITY_2 - 1j * cmath.sin(half) * K


def phase_prefactor(ab: AlphaBeta, phi: ComplexPhase | None = None) -> complex:
    """Global phase sqrt((alpha^2+beta^2)/|alpha^2+beta^2|), principal root.

    Physically unobservable; exposed so the two pointer-state constructions
    can be compared exactly rather than only up to a phase. When ``phi`` is
    given, the result also carries the +-1 of the principal-branch wrap (a
    2*pi shift of phi flips the rotation operator's sign), so that

        final_pointer_state_from_phase(phi, pin) * phase_prefactor(ab, phi)
            == final_pointer_state(ab, pin)

    holds exactly, not just up to a sign.
    """
    a, b = complex(ab.alpha), complex(ab.beta)
    q = a**2 + b**2
    pref = cmath.sqrt(q / abs(q))
    if phi is not None:
        root = cmath.sqrt(q)
        if abs(a) >= abs(b):
            ref, target = cmath.cos(phi.value / 2) * root, a
        else:
            ref, target = cmath.sin(phi.value / 2) * root, b
        if abs(ref - target) > abs(ref + target):
            pref = -pref
    return pref


def final_pointer_state(
    ab: AlphaBeta, pointer_in: np.ndarray, axis: str = "z"
) -> np.ndarray:
    """Normalized pointer state (alpha*I - i*beta*K)|in>, direct route."""
    pin = np.asarray(pointer_in, dtype=complex)
    if pin.shape != (2,):
        raise ConfigError("pointer_in must be a single-qubit state vector")
    K = AXIS_TRIPLES[axis][0]
    out = (ab.alpha * IDENTITY_2 - 1j * ab.beta * K) @ pin
    norm = np.linalg.norm(out)
    if norm < 1e-150:
        raise DegenerateAlphaBetaError("post-selected pointer state vanished")
    return out / norm


def final_pointer_state_from_phase(
    phi: ComplexPhase, pointer_in: np.ndarray, axis: str = "z"
) -> np.ndarray:
    """Normalized pointer state via the complex rotation e^{-i phi K/2}|in>.

    The unobservable global-phase prefactor is dropped here; multiplying by
    :func:`phase_prefactor` reproduces the direct route exactly.
    """
    pin = np.asarray(pointer_in, dtype=complex)
    out = complex_rotation(phi.value, axis) @ pin
    norm = np.linalg.norm(out)
    if norm < 1e-150:
        raise DegenerateAlphaBetaError("post-selected pointer state vanished")
    return out / norm
