"""Entangled-pointer estimation on the two-dimensional NOON subspace.

An N-qubit pointer prepared in (|0...0> + |1...1>)/sqrt(2) stays inside the
span of |0...0> and |1...1> under the per-qubit coupling, so every quantity
lives in a 2-dimensional subspace regardless of N:

    amp0 ∝ (alpha - i beta)^N ,  amp1 ∝ (alpha + i beta)^N ,

equivalently exp(-i N phi / 2) and exp(+i N phi / 2) over
sqrt(2 cosh(N phi2)). The observables are M1 = sigma_x^(x N) (swaps the two
branch states) and the branch observable M2 = diag(+1, -1) on the subspace:

    <M1> = cos(N phi1) / cosh(N phi2) ,   <M2> = tanh(N phi2) .

Amplitude powers are taken in log-polar form so N ~ 10^3 neither overflows
nor underflows.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .coupling import AlphaBeta, ComplexPhase
from .errors import (
    ConfigError,
    OutOfDomainMeanError,
    PoleAtGammaError,
    SingularJacobianError,
)
from .metrology import CovarianceReport, fisher_matrix, invert_error_propagation


@dataclass(frozen=True)
class NoonState:
    """Pointer state restricted to the span of |0...0> and |1...1>."""

    n_qubits: int
    amp0: complex
    amp1: complex

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ConfigError("n_qubits must be >= 1")
        nrm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(nrm - 1) > 1e-12:
            raise ConfigError(f"subspace norm {nrm!r} deviates from 1")


def _log_polar_amps(z0: complex, z1: complex, n: int) -> tuple[complex, complex]:
    """Normalized (z0^n, z1^n) computed via n*log(z) with common rescaling."""
    w0 = n * cmath.log(z0)
    w1 = n * cmath.log(z1)
    shift = max(w0.real, w1.real)
    a0 = cmath.exp(w0 - shift)
    a1 = cmath.exp(w1 - shift)
    nrm = np.hypot(abs(a0), abs(a1))
    return a0 / nrm, a1 / nrm


def noon_final_state(ab: AlphaBeta, n: int) -> NoonState:
    """Post-selected NOON pointer state from the coupling amplitudes."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    z0 = complex(ab.alpha) - 1j * complex(ab.beta)
    z1 = complex(ab.alpha) + 1j * complex(ab.beta)
    if min(abs(z0), abs(z1)) < 1e-150:
        raise PoleAtGammaError("alpha -+ i beta vanishes; state collapses")
    a0, a1 = _log_polar_amps(z0, z1, n)
    return NoonState(n, a0, a1)


def noon_final_state_from_phase(phi: ComplexPhase, n: int) -> NoonState:
    """Same state built from exp(-+ i N phi / 2) (global phase may differ)."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    a0, a1 = _log_polar_amps(
        cmath.exp(-1j * phi.value / 2), cmath.exp(1j * phi.value / 2), n
    )
    return NoonState(n, a0, a1)


def noon_expectations(phi: ComplexPhase, n: int) -> tuple[float, float]:
    """(<M1>, <M2>) from the closed scalar formulas."""
    nphi2 = n * phi.phi2
    m1 = np.cos(n * phi.phi1) / np.cosh(nphi2)
    m2 = np.tanh(nphi2)
    return float(m1), float(m2)


def noon_expectations_dense(state: NoonState) -> tuple[float, float]:
    """(<M1>, <M2>) evaluated directly on the subspace amplitudes."""
    m1 = 2 * np.real(np.conj(state.amp0) * state.amp1)
    m2 = abs(state.amp0) ** 2 - abs(state.amp1) ** 2
    return float(m1), float(m2)


def noon_jacobian(phi: ComplexPhase, n: int) -> np.ndarray:
    """d<M_mu>/d phi_i for the (M1, M2) pair."""
    ch = np.cosh(n * phi.phi2)
    th = np.tanh(n * phi.phi2)
    u = np.cos(n * phi.phi1) / ch
    return np.array(
        [
            [-n * np.sin(n * phi.phi1) / ch, -n * u * th],
            [0.0, n / ch**2],
        ]
    )


def noon_measurement_covariance(phi: ComplexPhase, n: int) -> np.ndarray:
    """Per-shot symmetrized covariance of (M1, M2).

    M1 and M2 anticommute on the subspace, so the symmetrized cross moment
    is -<M1><M2>; both squares are the identity.
    """
    u, v = noon_expectations(phi, n)
    return np.array([[1 - u**2, -u * v], [-u * v, 1 - v**2]])


def noon_variance(phi: ComplexPhase, n: int) -> CovarianceReport:
    """Estimator covariance of (phi1, phi2) per (M1, M2) shot pair.

    Equals cosh^2(N phi2)/N^2 on the diagonal (and zero off-diagonal) at
    every working point where sin(N phi1) != 0.
    """
    if abs(np.sin(n * phi.phi1)) < 1e-12:
        raise SingularJacobianError(
            "sin(N phi1) = 0: the parity channel carries no phi1 signal here"
        )
    return invert_error_propagation(
        noon_jacobian(phi, n), noon_measurement_covariance(phi, n)
    )


@dataclass(frozen=True)
class NoonPovm:
    """POVM restricted to the NOON subspace: per element
    (A, B, C) = (<0..|Pi|0..>, <1..|Pi|1..>, <0..|Pi|1..>)."""

    elements: tuple

    def __post_init__(self):
        elems = tuple(
            (complex(a), complex(b), complex(c)) for (a, b, c) in self.elements
        )
        object.__setattr__(self, "elements", elems)
        sum_a = sum(e[0] for e in elems)
        sum_b = sum(e[1] for e in elems)
        sum_c = sum(e[2] for e in elems)
        if abs(sum_a - 1) > 1e-10 or abs(sum_b - 1) > 1e-10:
            raise ConfigError("POVM diagonal elements must sum to 1 on the subspace")
        if abs(sum_c) > 1e-10:
            raise ConfigError("POVM off-diagonal elements must sum to 0")
        for a, b, c in elems:
            if abs(a.imag) > 1e-12 or abs(b.imag) > 1e-12:
                raise ConfigError("diagonal POVM entries must be real")
            if a.real < -1e-12 or b.real < -1e-12:
                raise ConfigError("diagonal POVM entries must be non-negative")
            if abs(c) ** 2 > a.real * b.real + 1e-10:
                raise ConfigError("POVM block fails |C|^2 <= A*B (not PSD)")


def parity_povm() -> NoonPovm:
    """Two-element sigma_x^(x N) parity POVM on the subspace."""
    return NoonPovm(((0.5, 0.5, 0.5), (0.5, 0.5, -0.5)))


def branch_povm() -> NoonPovm:
    """Projectors onto |0...0>, |1...1> plus the (zero-weight) remainder."""
    return NoonPovm(((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 0.0)))


def noon_povm_probabilities(povm: NoonPovm, ab: AlphaBeta, n: int) -> np.ndarray:
    """Outcome probabilities p_j = A_j|amp0|^2 + B_j|amp1|^2 + 2Re(C_j amp0* amp1)."""
    state = noon_final_state(ab, n)
    cross = np.conj(state.amp0) * state.amp1
    p = np.array(
        [
            (
                a.real * abs(state.amp0) ** 2
                + b.real * abs(state.amp1) ** 2
                + 2 * np.real(c * cross)
            )
            for (a, b, c) in povm.elements
        ]
    )
    total = p.sum()
    if abs(total - 1) > 1e-12:
        raise ConfigError(f"POVM probabilities sum to {total!r}")
    return p


def gamma_ratio(ab: AlphaBeta) -> complex:
    """gamma = (alpha - i beta)/(alpha + i beta); equals exp(-i phi)."""
    a, b = complex(ab.alpha), complex(ab.beta)
    den = a + 1j * b
    scale = max(abs(a), abs(b), 1e-300)
    if abs(den) <= 1e-14 * scale:
        raise PoleAtGammaError("alpha + i beta = 0: gamma diverges")
    return (a - 1j * b) / den


def estimate_phase_from_means(m1: float, m2: float, n: int) -> ComplexPhase:
    """Invert measured (<M1>, <M2>) means; phi1 branch in [0, pi/N].

    One-fringe inversion only: the pi/N-periodic ambiguity is inherent to
    the interferometric readout.
    """
    if abs(m2) >= 1:
        raise OutOfDomainMeanError(f"<M2> = {m2!r} leaves artanh's domain")
    phi2 = float(np.arctanh(m2) / n)
    arg = m1 * np.cosh(n * phi2)
    if abs(arg) > 1 + 1e-9:
        raise OutOfDomainMeanError(
            f"|<M1>| cosh(N phi2) = {abs(arg)!r} exceeds 1"
        )
    phi1 = float(np.arccos(np.clip(arg, -1.0, 1.0)) / n)
    return ComplexPhase(phi1, phi2)


def parity_round_probabilities(n: int):
    """Outcome-probability functions for one round (one shot of each
    observable): the sigma_x parity pair and the branch pair."""

    def parity(phi1: float, phi2: float) -> np.ndarray:
        u = np.cos(n * phi1) / np.cosh(n * phi2)
        return np.array([(1 + u) / 2, (1 - u) / 2])

    def branch(phi1: float, phi2: float) -> np.ndarray:
        v = np.tanh(n * phi2)
        return np.array([(1 + v) / 2, (1 - v) / 2])

    return parity, branch


def noon_fisher_per_round(phi: ComplexPhase, n: int, step: float = 1e-5) -> np.ndarray:
    """Fisher information of one (parity, branch) measurement round.

    Additivity over the two independent readouts: F = F_parity + F_branch,
    each from finite differences of the outcome distributions.
    """
    parity, branch = parity_round_probabilities(n)
    return fisher_matrix(parity, phi, step) + fisher_matrix(branch, phi, step)
