"""System-state construction and the global-phase convention.

A system state is a d-dimensional vector of complex amplitudes, unit norm.
The sum of amplitudes (written ``psi_tilde`` throughout) is made real and
strictly positive by a global phase rotation; every reconstruction formula
in the package assumes this convention.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    IllConditionedReconstructionWarning,
    ZeroNormError,
    ZeroSumError,
)

NORM_TOL = 1e-12
TINY_SUM_WARN = 1e-6


@dataclass(frozen=True)
class SystemState:
    """Normalized pure state with the amplitude-sum phase convention.

    Attributes
    ----------
    amplitudes : np.ndarray
        Complex amplitudes in the fixed basis, length ``dim >= 2``,
        unit norm, sum real and positive. Read-only.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise ConfigError("state needs at least 2 amplitudes")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ConfigError(f"state norm {norm!r} deviates from 1 beyond {NORM_TOL}")
        s = amps.sum()
        if abs(s.imag) > NORM_TOL or s.real <= 0:
            raise ConfigError("amplitude sum must be real and positive; use make_state")

    @property
    def dim(self) -> int:
        return self.amplitudes.size


def make_state(raw) -> SystemState:
    """Normalize ``raw`` and rotate the global phase so the sum is positive.

    Raises
    ------
    ZeroNormError
        If the vector norm vanishes.
    ZeroSumError
        If the normalized amplitude sum is within 1e-12 of zero (the fixed
        uniform post-selection cannot see such a state; it is rejected
        rather than re-post-selected).
    """
    v = np.asarray(raw, dtype=complex)
    if v.ndim != 1 or v.size < 2:
        raise ConfigError("state needs at least 2 amplitudes")
    norm = np.linalg.norm(v)
    if norm <= 0 or not np.isfinite(norm):
        raise ZeroNormError("state vector has zero (or non-finite) norm")
    v = v / norm
    s = v.sum()
    if abs(s) < NORM_TOL:
        raise ZeroSumError("amplitude sum is numerically zero")
    if abs(s) < TINY_SUM_WARN:
        warnings.warn(
            f"amplitude sum {abs(s):.3e} is tiny; reconstruction will be "
            "ill conditioned",
            IllConditionedReconstructionWarning,
            stacklevel=2,
        )
    v = v * np.exp(-1j * np.angle(s))
    return SystemState(v)


def tilde_psi(state: SystemState) -> float:
    """Sum of amplitudes. Real and positive by convention."""
    s = state.amplitudes.sum()
    return float(s.real)


def time_reverse(state: SystemState) -> SystemState:
    """Complex-conjugate every amplitude (basis states taken TR-invariant).

    The convention-fixed sum is real, so conjugation preserves it and the
    result is again a valid state. Involutive.
    """
    return SystemState(np.conj(state.amplitudes))


_PRESET_RE = re.compile(r"^(uniform|ramp)-(\d+)$")


def preset_state(name: str) -> SystemState:
    """Build a named preset: ``uniform-d`` or ``ramp-d`` (amplitudes ∝ x)."""
    m = _PRESET_RE.match(name)
    if not m:
        raise ConfigError(f"unknown state preset {name!r}")
    kind, d = m.group(1), int(m.group(2))
    if d < 2:
        raise ConfigError("preset dimension must be >= 2")
    if kind == "uniform":
        return make_state(np.ones(d))
    return make_state(np.arange(1, d + 1, dtype=float))


def state_from_pairs(pairs) -> SystemState:
    """Build a state from ``[[re, im], ...]`` pairs (run-config format)."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ConfigError("amplitudes must be a list of [re, im] pairs")
    return make_state(arr[:, 0] + 1j * arr[:, 1])
