"""Seeded Monte Carlo simulation of projective measurements.

Randomness comes from numpy's Philox counter-based generator. Stream
splitting is explicit and documented: stream k of seed s is
``Generator(Philox(SeedSequence(entropy=s, spawn_key=(k,))))``, so records
are bit-identical for a given plan regardless of execution order, and
parallel workers can draw from disjoint streams safely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .coupling import AXIS_TRIPLES, ComplexPhase
from .dicke import (
    DickeState,
    estimate_phase_from_moments,
    var_phi1_covariance,
    _jy_eigensystem,
)
from .errors import ConfigError, NumericDomainError, UnsupportedRepresentationError
from .metrology import CovarianceReport, invert_error_propagation
from .noon import (
    NoonState,
    estimate_phase_from_means,
    noon_jacobian,
    noon_measurement_covariance,
)
from .qubit import estimate_phase
from .trscheme import TrPairState, tr_estimate_phi1


def stream_generator(seed: int, stream: int) -> Generator:
    """The documented per-stream generator for a 64-bit seed."""
    return Generator(Philox(SeedSequence(entropy=seed, spawn_key=(stream,))))


@dataclass(frozen=True)
class ShotPlan:
    """Seed, shots per observable, and the scheme's observable labels."""

    seed: int
    shots_per_observable: int
    observables: tuple[str, ...]

    def __post_init__(self):
        if self.shots_per_observable < 1:
            raise ConfigError("shots_per_observable must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if not self.observables:
            raise ConfigError("observable set must not be empty")


@dataclass(frozen=True)
class MeasurementModel:
    """Projective observable reduced to outcome values + probabilities."""

    label: str
    eigenvalues: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float).copy()
        p = np.asarray(self.probabilities, dtype=float).copy()
        if ev.shape != p.shape or ev.ndim != 1:
            raise ConfigError("eigenvalues and probabilities must align")
        if p.min() < -1e-10 or abs(p.sum() - 1) > 1e-10:
            raise ConfigError(f"invalid outcome distribution for {self.label!r}")
        p = np.clip(p, 0, None)
        p /= p.sum()
        ev.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "probabilities", p)


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome counts for one observable plus empirical summaries."""

    label: str
    eigenvalues: np.ndarray
    counts: np.ndarray
    shots: int

    def __post_init__(self):
        if int(self.counts.sum()) != self.shots:
            raise ConfigError("counts must sum to shots")

    @property
    def mean(self) -> float:
        return float((self.eigenvalues * self.counts).sum() / self.shots)

    @property
    def variance(self) -> float:
        m = self.mean
        return float(((self.eigenvalues - m) ** 2 * self.counts).sum() / self.shots)

    @property
    def sem(self) -> float:
        return float(np.sqrt(self.variance / self.shots))


# -- model builders per pointer representation --------------------------------

def qubit_models(final_state: np.ndarray, axis: str = "z") -> list[MeasurementModel]:
    """K, K1, K2 measurement models on a single-qubit pointer state."""
    state = np.asarray(final_state, dtype=complex)
    if state.shape != (2,):
        raise UnsupportedRepresentationError("qubit models need a 2-vector")
    models = []
    for label, op in zip(("K", "K1", "K2"), AXIS_TRIPLES[axis]):
        evals, evecs = np.linalg.eigh(op)
        p = np.abs(evecs.conj().T @ state) ** 2
        models.append(MeasurementModel(label, evals, p))
    return models


def noon_models(state: NoonState) -> list[MeasurementModel]:
    """M1 (x-parity) and M2 (branch) models on the NOON subspace."""
    m1 = 2 * np.real(np.conj(state.amp0) * state.amp1)
    p_parity = np.array([(1 + m1) / 2, (1 - m1) / 2])
    p_branch = np.array([abs(state.amp0) ** 2, abs(state.amp1) ** 2])
    return [
        MeasurementModel("M1", np.array([1.0, -1.0]), p_parity),
        MeasurementModel("M2", np.array([1.0, -1.0]), p_branch),
    ]


def dicke_models(state: DickeState) -> list[MeasurementModel]:
    """Jz and Jy collective-spin models on a rotated Dicke state."""
    ms = state.m_values
    p_z = np.abs(state.coefficients) ** 2
    evals, evecs, _ = _jy_eigensystem(state.j2)
    p_y = np.abs(evecs.conj().T @ state.coefficients) ** 2
    return [
        MeasurementModel("Jz", np.asarray(ms, float), p_z),
        MeasurementModel("Jy", evals, p_y),
    ]


def tr_models(state: TrPairState) -> list[MeasurementModel]:
    """2N-qubit parity model on the TR pair state."""
    parity = 2 * np.real(np.conj(state.amp0) * state.amp1)
    p = np.array([(1 + parity) / 2, (1 - parity) / 2])
    return [MeasurementModel("parity2N", np.array([1.0, -1.0]), p)]


# -- sampling ------------------------------------------------------------------

def sample_observable(
    model: MeasurementModel, plan: ShotPlan, stream: int
) -> MeasurementRecord:
    """Draw i.i.d. Born-rule outcomes for one observable from one stream."""
    rng = stream_generator(plan.seed, stream)
    counts = rng.multinomial(plan.shots_per_observable, model.probabilities)
    return MeasurementRecord(
        label=model.label,
        eigenvalues=model.eigenvalues,
        counts=counts,
        shots=plan.shots_per_observable,
    )


def sample_records(
    models: list[MeasurementModel], plan: ShotPlan
) -> dict[str, MeasurementRecord]:
    """One record per observable; stream index = position in the plan."""
    wanted = {m.label: m for m in models}
    unknown = set(plan.observables) - set(wanted)
    if unknown:
        raise ConfigError(f"plan names unknown observables {sorted(unknown)}")
    return {
        label: sample_observable(wanted[label], plan, stream)
        for stream, label in enumerate(plan.observables)
    }


# -- estimator assembly --------------------------------------------------------

def empirical_phase_estimate(
    records: dict[str, MeasurementRecord],
    scheme: str,
    n: int,
) -> tuple[ComplexPhase, CovarianceReport]:
    """Scheme inversion applied to empirical means, with shot-noise covariance.

    The covariance is the per-shot measurement covariance pushed through
    the inversion Jacobian at the estimated point, divided by the shot
    count (delta method).
    """
    if scheme == "qubit":
        need = ("K", "K1", "K2")
        _require(records, need)
        s = records["K"].shots
        phase, _ = estimate_phase(
            records["K1"].mean, records["K"].mean, 1.0, records["K2"].mean
        )
        cov = _noon_cov_at(phase, 1) / s
    elif scheme == "noon":
        _require(records, ("M1", "M2"))
        s = records["M1"].shots
        phase = estimate_phase_from_means(records["M1"].mean, records["M2"].mean, n)
        cov = _noon_cov_at(phase, n) / s
    elif scheme == "dicke":
        _require(records, ("Jz", "Jy"))
        s = records["Jz"].shots
        jz2_mean = float(
            (records["Jz"].eigenvalues ** 2 * records["Jz"].counts).sum()
            / records["Jz"].shots
        )
        phase = estimate_phase_from_moments(n / 2, records["Jy"].mean, jz2_mean)
        try:
            cov = var_phi1_covariance(n / 2, phase).matrix / s
        except NumericDomainError:
            cov = np.full((2, 2), np.nan)
    elif scheme == "tr":
        _require(records, ("parity2N",))
        s = records["parity2N"].shots
        phi1, var1 = tr_estimate_phi1(records["parity2N"].mean, n)
        phase = ComplexPhase(phi1, 0.0)
        cov = np.diag([var1 / s, np.nan])
    else:
        raise ConfigError(f"unknown scheme {scheme!r}")
    return phase, CovarianceReport(np.asarray(cov, float), "monte-carlo")


def _require(records: dict[str, MeasurementRecord], labels) -> None:
    missing = [x for x in labels if x not in records]
    if missing:
        raise ConfigError(f"records missing observables {missing}")


def _noon_cov_at(phase: ComplexPhase, n: int) -> np.ndarray:
    try:
        rep = invert_error_propagation(
            noon_jacobian(phase, n), noon_measurement_covariance(phase, n)
        )
        return np.array(rep.matrix)
    except NumericDomainError:
        return np.full((2, 2), np.nan)


def records_to_csv(
    records: dict[str, MeasurementRecord], scheme: str, seed: int
) -> str:
    """Serialize records as ``scheme,observable,eigenvalue,count,seed`` rows."""
    lines = ["scheme,observable,eigenvalue,count,seed"]
    for label in sorted(records):
        rec = records[label]
        for ev, ct in zip(rec.eigenvalues, rec.counts):
            lines.append(f"{scheme},{label},{float(ev)!r},{int(ct)},{seed}")
    return "\n".join(lines) + "\n"
