"""Generic two-parameter estimation machinery.

Error-propagation inversion, classical Fisher information of an outcome
distribution, the Cramer-Rao bound, and the complex-block form of a real
2x2 parameter covariance. Parameters are always (phi1, phi2).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .coupling import ComplexPhase
from .errors import (
    ConfigError,
    DegenerateDistributionError,
    SingularFisherError,
    SingularJacobianError,
)

PSD_TOL = 1e-10
PROB_FLOOR = 1e-14
DROPPED_GRAD_WARN = 1e-7


@dataclass(frozen=True)
class CovarianceReport:
    """2x2 covariance of (phi1, phi2) estimators plus its provenance.

    ``source`` is one of ``"error-propagation"``, ``"cramer-rao"``
    (a lower bound, not an achieved covariance) or ``"monte-carlo"``.
    """

    matrix: np.ndarray
    source: str
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (2, 2):
            raise ConfigError("covariance must be 2x2")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def var_phi1(self) -> float:
        return float(self.matrix[0, 0])

    @property
    def var_phi2(self) -> float:
        return float(self.matrix[1, 1])


def _check_psd(m: np.ndarray, what: str, tol: float = PSD_TOL) -> None:
    sym_err = abs(m[0, 1] - m[1, 0])
    scale = max(1.0, float(np.abs(m).max()))
    if sym_err > tol * scale:
        raise ConfigError(f"{what} is not symmetric (residual {sym_err:.2e})")
    evals = np.linalg.eigvalsh((m + m.T) / 2)
    if evals.min() < -tol * scale:
        raise ConfigError(f"{what} is not PSD (min eigenvalue {evals.min():.2e})")


def invert_error_propagation(
    jacobian: np.ndarray, meas_cov: np.ndarray
) -> CovarianceReport:
    """Solve V = J C J^T for the parameter covariance C = J^-1 V J^-T.

    ``jacobian[mu, i]`` holds d<M_mu>/d phi_i; ``meas_cov`` is the
    symmetrized per-shot covariance of the observables.
    """
    J = np.asarray(jacobian, dtype=float)
    V = np.asarray(meas_cov, dtype=float)
    if J.shape != (2, 2) or V.shape != (2, 2):
        raise ConfigError("jacobian and covariance must be 2x2")
    if not np.isfinite(J).all():
        raise ConfigError("jacobian has non-finite entries")
    _check_psd(V, "measurement covariance")
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    scale = float(np.abs(J).max()) ** 2
    if abs(det) <= 1e-12 * max(scale, 1e-300):
        raise SingularJacobianError(
            "expectation-value Jacobian is singular at this working point"
        )
    Jinv = np.array([[J[1, 1], -J[0, 1]], [-J[1, 0], J[0, 0]]]) / det
    C = Jinv @ V @ Jinv.T
    C = (C + C.T) / 2
    return CovarianceReport(C, "error-propagation")


def fisher_matrix(probs, at: ComplexPhase, step: float = 1e-5) -> np.ndarray:
    """Classical Fisher information F_ij = sum_k d_i p_k d_j p_k / p_k.

    ``probs(phi1, phi2)`` must return the outcome-probability vector.
    Derivatives are central finite differences with relative step ``step``,
    refined once by Richardson extrapolation. Outcomes whose probability at
    the working point is below 1e-14 are dropped from the sum; if such an
    outcome still has a visible derivative a warning is emitted.
    """
    if step <= 0:
        raise ConfigError("finite-difference step must be positive")
    x0 = np.array([at.phi1, at.phi2], dtype=float)
    p0 = np.asarray(probs(*x0), dtype=float)

    def grad(h_scale: float) -> np.ndarray:
        g = np.zeros((2, p0.size))
        for i in range(2):
            h = step * h_scale * max(1.0, abs(x0[i]))
            xp, xm = x0.copy(), x0.copy()
            xp[i] += h
            xm[i] -= h
            g[i] = (np.asarray(probs(*xp), float) - np.asarray(probs(*xm), float)) / (
                2 * h
            )
        return g

    g_full = grad(1.0)
    g_half = grad(0.5)
    g = (4 * g_half - g_full) / 3

    keep = p0 > PROB_FLOOR
    dropped = ~keep
    if dropped.any() and np.abs(g[:, dropped]).max() > DROPPED_GRAD_WARN:
        warnings.warn(
            "an outcome with vanishing probability has a non-vanishing "
            "derivative; its Fisher contribution is being discarded",
            stacklevel=2,
        )
    if keep.sum() <= 1 and np.abs(g[:, keep]).max() < 1e-13:
        raise DegenerateDistributionError(
            "distribution is concentrated on one outcome with zero derivatives"
        )
    F = np.zeros((2, 2))
    gk = g[:, keep]
    pk = p0[keep]
    for i in range(2):
        for j in range(i, 2):
            F[i, j] = F[j, i] = float(np.sum(gk[i] * gk[j] / pk))
    if np.abs(F).max() < 1e-13:
        raise DegenerateDistributionError(
            "outcome distribution carries no information about (phi1, phi2)"
        )
    return F


def cramer_rao_bound(fisher: np.ndarray) -> CovarianceReport:
    """Invert the Fisher matrix into the covariance lower bound."""
    F = np.asarray(fisher, dtype=float)
    if F.shape != (2, 2):
        raise ConfigError("Fisher matrix must be 2x2")
    _check_psd(F, "Fisher matrix")
    cond = np.linalg.cond(F)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularFisherError(
            f"Fisher matrix condition number {cond:.3e} exceeds 1e12"
        )
    C = np.linalg.inv(F)
    C = (C + C.T) / 2
    return CovarianceReport(C, "cramer-rao")


def complex_block_covariance(report: CovarianceReport | np.ndarray) -> np.ndarray:
    """Covariance of Z = phi1 + i*phi2 as the 2x2 Hermitian block

        [[<dZ dZ*>, <dZ dZ>], [<dZ* dZ*>, <dZ* dZ>]].
    """
    C = report.matrix if isinstance(report, CovarianceReport) else np.asarray(report)
    a = float(C[0, 0] + C[1, 1])
    b = complex(C[0, 0] - C[1, 1], 2 * C[0, 1])
    block = np.array([[a, b], [b.conjugate(), a]], dtype=complex)
    herm_err = np.abs(block - block.conj().T).max()
    if herm_err > PSD_TOL * max(1.0, abs(a)):
        raise ConfigError("complex covariance block is not Hermitian")
    return block


def real_covariance_from_block(block: np.ndarray) -> np.ndarray:
    """Invert :func:`complex_block_covariance` (round-trip helper)."""
    b = np.asarray(block, dtype=complex)
    a = b[0, 0].real
    zz = b[0, 1]
    c11 = (a + zz.real) / 2
    c22 = (a - zz.real) / 2
    c12 = zz.imag / 2
    return np.array([[c11, c12], [c12, c22]])


def dominates_psd(
    cov: np.ndarray, bound: np.ndarray, slack: float = 0.0
) -> bool:
    """True when cov + slack*I - bound is PSD (covariance respects the bound)."""
    diff = np.asarray(cov, float) - np.asarray(bound, float) + slack * np.eye(2)
    return bool(np.linalg.eigvalsh((diff + diff.T) / 2).min() >= 0)
