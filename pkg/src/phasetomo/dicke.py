"""Dicke-pointer estimation in the spin-j representation.

The N-qubit symmetric pointer lives in a (2j+1)-dimensional spin space,
j = N/2. The coupling acts as exp(-i phi Jy) on |j, 0> with complex phi;
the imaginary part makes the rotation non-unitary, so states are
renormalized by W00(2 i phi2) = <j,0| e^{2 phi2 Jy} |j,0>.

Two routes exist for the rotation amplitudes W_m0(phi) = <j,m|e^{-i phi Jy}|j,0>:

* the dense matrix exponential (scaling-and-squaring Pade via scipy), which
  works for any j and is the sign/branch arbiter;
* for integer j, associated Legendre polynomials of the complex argument
  cos(phi), with the branch (1 - cos^2 phi)^(1/2) := sin(phi) taken from
  phi itself and Condon-Shortley signs. The recurrence runs upward in the
  degree at fixed order (the stable direction), seeded at the pre-scaled
  P^m_m so no factorial-sized intermediates appear.

Estimators: Jy reads out phi2 alone (its moments do not depend on phi1);
Jz^2 together with Jy reads out phi1 through the two-parameter error
propagation. The useful simplification (algebraically equal to the
closed-form <Jz^2>, and manifestly real) is

    <Jz^2> = <Jy> (cosh 2 phi2 - cos 2 phi1) / (2 sinh 2 phi2).

Both inverse variances peak at phi = 0 with the Heisenberg value
N(N+2)/2 = 2 j (j+1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .coupling import ComplexPhase
from .errors import (
    ComplexResidueError,
    ConfigError,
    DivergentVarianceError,
    HalfIntegerJError,
    OutOfDomainMeanError,
    SingularJacobianError,
)
from .metrology import CovarianceReport, invert_error_propagation

#: below this |phi2| the closed forms with coth/sinh factors switch to the
#: exact Jy-eigenbasis evaluation (stable at and around phi2 = 0)
SMALL_PHI2 = 1e-4
#: |sin(2 phi1)| below this is treated as a stationary point of <Jz^2>
SIN_FLOOR = 1e-8


def _j2_of(j) -> int:
    j2 = int(round(2 * float(j)))
    if j2 < 1 or abs(2 * float(j) - j2) > 1e-9:
        raise ConfigError(f"j = {j!r} is not a positive (half-)integer")
    return j2


def _require_integer_j(j) -> int:
    j2 = _j2_of(j)
    if j2 % 2:
        raise HalfIntegerJError(
            f"closed-form route needs integer j (even N); got j = {j!r}"
        )
    return j2 // 2


@lru_cache(maxsize=None)
def spin_matrices(j2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(m-values, Jx, Jy, Jz) in the |j, m> basis ordered m = j .. -j."""
    j = j2 / 2
    ms = np.arange(j, -j - 1, -1)
    dim = j2 + 1
    jplus = np.zeros((dim, dim))
    for k in range(1, dim):
        m = ms[k]
        jplus[k - 1, k] = math.sqrt(j * (j + 1) - m * (m + 1))
    jminus = jplus.T
    jx = ((jplus + jminus) / 2).astype(complex)
    jy = (jplus - jminus) / 2j
    jz = np.diag(ms).astype(complex)
    for a in (ms, jx, jy, jz):
        a.setflags(write=False)
    return ms, jx, jy, jz


@lru_cache(maxsize=None)
def _jy_eigensystem(j2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(eigenvalues, eigenvectors, |<eig|j,0 or top>|^2 weights of |j,0>)."""
    _, _, jy, _ = spin_matrices(j2)
    evals, evecs = np.linalg.eigh(jy)
    v0 = np.zeros(j2 + 1, dtype=complex)
    v0[j2 // 2] = 1.0  # m = 0 slot for integer j; mid slot otherwise
    weights = np.abs(evecs.conj().T @ v0) ** 2
    for a in (evals, evecs, weights):
        a.setflags(write=False)
    return evals, evecs, weights


@dataclass(frozen=True)
class DickeState:
    """Normalized rotated Dicke state, coefficients ordered m = j .. -j."""

    j2: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).copy()
        if c.size != self.j2 + 1:
            raise ConfigError("coefficient count must be 2j+1")
        nrm = np.linalg.norm(c)
        if abs(nrm - 1) > 1e-12:
            raise ConfigError(f"Dicke state norm {nrm!r} deviates from 1")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def j(self) -> float:
        return self.j2 / 2

    @property
    def m_values(self) -> np.ndarray:
        return spin_matrices(self.j2)[0]


def rotate_dicke(j, phi: ComplexPhase) -> DickeState:
    """exp(-i phi Jy)|j,0>, renormalized (the rotation is non-unitary).

    Half-integer j (odd N) has no m = 0 level; the closest-to-equator
    state |j, 1/2> seeds the rotation in that case, and only this dense
    route is available (the Legendre route requires integer j).
    """
    j2 = _j2_of(j)
    _, _, jy, _ = spin_matrices(j2)
    v0 = np.zeros(j2 + 1, dtype=complex)
    v0[j2 // 2] = 1.0
    w = expm(-1j * phi.value * jy) @ v0
    return DickeState(j2, w / np.linalg.norm(w))


def rotated_unnormalized(j, phi: ComplexPhase) -> np.ndarray:
    """Raw exp(-i phi Jy)|j,0> column (the Wigner column W_m0(phi))."""
    j2 = _j2_of(j)
    _, _, jy, _ = spin_matrices(j2)
    v0 = np.zeros(j2 + 1, dtype=complex)
    v0[j2 // 2] = 1.0
    return expm(-1j * phi.value * jy) @ v0


# -- associated Legendre route (integer j) -----------------------------------

def _assoc_legendre_scaled(j: int, m: int, z: complex, s: complex) -> complex:
    """P^m_j(z) * sqrt((j-m)!/(j+m)!) with (1-z^2)^(1/2) := s, m >= 0.

    Upward recurrence in the degree at fixed order; the start value P^m_m
    carries the normalization so intermediates stay at the result's scale.
    """
    log_scale = 0.5 * (math.lgamma(j - m + 1) - math.lgamma(j + m + 1))
    if m > 0:
        # log((2m-1)!!) = log((2m)!) - m log 2 - log(m!)
        log_dfact = math.lgamma(2 * m + 1) - m * math.log(2) - math.lgamma(m + 1)
    else:
        log_dfact = 0.0
    p_mm = (-1) ** m * math.exp(log_dfact + log_scale) * s**m
    if j == m:
        return p_mm
    p_prev, p_curr = p_mm, z * (2 * m + 1) * p_mm
    for ell in range(m + 1, j):
        p_next = ((2 * ell + 1) * z * p_curr - (ell + m) * p_prev) / (ell - m + 1)
        p_prev, p_curr = p_curr, p_next
    return p_curr


def wigner_m0(j, m: int, phi: ComplexPhase) -> complex:
    """W_m0(phi) = P^m_j(cos phi) sqrt((j-m)!/(j+m)!), integer j.

    Negative orders follow from W_{-m,0} = (-1)^m W_{m,0}.
    """
    ji = _require_integer_j(j)
    if abs(m) > ji:
        raise ConfigError(f"|m| = {abs(m)} exceeds j = {ji}")
    z = cmath.cos(phi.value)
    s = cmath.sin(phi.value)
    val = _assoc_legendre_scaled(ji, abs(m), z, s)
    if m < 0:
        val *= (-1) ** (abs(m) % 2)
    return val


def wigner_column(j, phi: ComplexPhase) -> np.ndarray:
    """All W_m0(phi), ordered m = j .. -j, via the Legendre route."""
    ji = _require_integer_j(j)
    z = cmath.cos(phi.value)
    s = cmath.sin(phi.value)
    col = np.zeros(2 * ji + 1, dtype=complex)
    for m in range(0, ji + 1):
        val = _assoc_legendre_scaled(ji, m, z, s)
        col[ji - m] = val
        if m:
            col[ji + m] = (-1) ** (m % 2) * val
    return col


def _w_ratios_imag_axis(j: int, phi2: float) -> tuple[float, float]:
    """(i W10/W00, W20/W00) at argument 2 i phi2, with realness checks.

    W_m0(2 i phi2) is real for even m and purely imaginary for odd m; a
    violation beyond 1e-10 signals a convention bug upstream.
    """
    z = complex(math.cosh(2 * phi2))
    s = 1j * math.sinh(2 * phi2)
    w00 = _assoc_legendre_scaled(j, 0, z, s)
    w10 = _assoc_legendre_scaled(j, 1, z, s)
    r1 = 1j * w10 / w00
    if abs(r1.imag) > 1e-10 * (1 + abs(r1.real)):
        raise ComplexResidueError(f"i W10/W00 residue {r1.imag!r} too large")
    if j >= 2:
        w20 = _assoc_legendre_scaled(j, 2, z, s)
        r2 = w20 / w00
        if abs(r2.imag) > 1e-10 * (1 + abs(r2.real)):
            raise ComplexResidueError(f"W20/W00 residue {r2.imag!r} too large")
        r2 = r2.real
    else:
        r2 = 0.0
    return float(r1.real), float(r2)


# -- Jy sector ----------------------------------------------------------------

def _jy_moments_eigen(j2: int, phi2: float) -> tuple[float, float]:
    """<Jy>, <Jy^2> through the exact Jy eigenbasis (stable at any phi2)."""
    evals, _, weights = _jy_eigensystem(j2)
    expo = 2 * phi2 * evals
    wts = np.exp(expo - expo.max()) * weights
    total = wts.sum()
    m1 = float((evals * wts).sum() / total)
    m2 = float((evals**2 * wts).sum() / total)
    return m1, m2


def jy_moments(j, phi2: float) -> tuple[float, float]:
    """(<Jy>, <Jy^2>) on the rotated state; independent of phi1.

    Closed forms (i W10/W00 ratios with a coth factor) away from phi2 = 0;
    the exact eigenbasis evaluation underneath |phi2| < 1e-4 where the
    closed forms degenerate to 0 * inf.
    """
    ji = _require_integer_j(j)
    if abs(phi2) < SMALL_PHI2:
        return _jy_moments_eigen(2 * ji, phi2)
    r1, _ = _w_ratios_imag_axis(ji, phi2)
    sj = math.sqrt(ji * (ji + 1))
    jy1 = r1 * sj
    jy2 = ji * (ji + 1) - r1 * sj / math.tanh(2 * phi2)
    return float(jy1), float(jy2)


def var_phi2(j, phi2: float) -> float:
    """(Delta phi2)^2 per Jy shot: 1/(4 Var Jy).

    At phi2 = 0 this is exactly the Heisenberg value 2/(N(N+2)).
    """
    m1, m2 = jy_moments(j, phi2)
    return 1.0 / (4.0 * (m2 - m1 * m1))


def heisenberg_limit(n: int) -> float:
    """2/(N(N+2)), the optimal-point variance for both parameters."""
    return 2.0 / (n * (n + 2))


# -- Jz sector ----------------------------------------------------------------

def jz_moments(j, phi: ComplexPhase) -> tuple[float, float]:
    """(<Jz^2>, <Jz^4>) on the rotated state.

    <Jz^2> is evaluated from the closed form (complex sin/cos of the full
    phi times the i W10/W00 ratio); its imaginary residue must stay below
    1e-9 or ComplexResidueError is raised. <Jz^4> is the m^4-weighted sum
    of the Wigner column probabilities. Near phi2 = 0 both moments come
    from the dense rotated state.
    """
    ji = _require_integer_j(j)
    if abs(phi.phi2) < SMALL_PHI2:
        state = rotate_dicke(ji, phi)
        p = np.abs(state.coefficients) ** 2
        ms = state.m_values
        return float((ms**2 * p).sum()), float((ms**4 * p).sum())
    r1, _ = _w_ratios_imag_axis(ji, phi.phi2)
    sj = math.sqrt(ji * (ji + 1))
    sin_phi = cmath.sin(phi.value)
    cos_phi = cmath.cos(phi.value)
    coth = 1.0 / math.tanh(2 * phi.phi2)
    val = r1 * sj * sin_phi * (coth * sin_phi - 1j * cos_phi)
    if abs(val.imag) > 1e-9 * (1 + abs(val.real)):
        raise ComplexResidueError(f"<Jz^2> imaginary residue {val.imag!r}")
    col = wigner_column(ji, phi)
    z = complex(math.cosh(2 * phi.phi2))
    s = 1j * math.sinh(2 * phi.phi2)
    w00_norm = _assoc_legendre_scaled(ji, 0, z, s).real
    ms = spin_matrices(2 * ji)[0]
    jz4 = float((ms**4 * np.abs(col) ** 2).sum() / w00_norm)
    return float(val.real), jz4


def jz2_derivatives(j, phi: ComplexPhase) -> tuple[float, float]:
    """(d<Jz^2>/d phi1, d<Jz^2>/d phi2) in closed form.

    From <Jz^2> = <Jy> H with H = (cosh 2 phi2 - cos 2 phi1)/(2 sinh 2 phi2)
    and the exponential-family identity d<Jy>/d phi2 = 2 Var(Jy):

        d1 = <Jy> sin(2 phi1) / sinh(2 phi2)
        d2 = 2 Var(Jy) H + <Jy> (cos 2 phi1 cosh 2 phi2 - 1)/sinh^2(2 phi2)

    Near phi2 = 0 the phi2-derivative (odd, ->0) is taken by Richardson
    finite differences of the dense moment to dodge the 0*inf cancellation.
    """
    ji = _require_integer_j(j)
    phi2 = phi.phi2
    if abs(phi2) >= SMALL_PHI2:
        m1, m2 = jy_moments(ji, phi2)
        var_y = m2 - m1 * m1
        sh = math.sinh(2 * phi2)
        ch = math.cosh(2 * phi2)
        c1 = math.cos(2 * phi.phi1)
        d1 = m1 * math.sin(2 * phi.phi1) / sh
        H = (ch - c1) / (2 * sh)
        d2 = 2 * var_y * H + m1 * (c1 * ch - 1) / sh**2
        return float(d1), float(d2)
    # phi2 ~ 0: <Jy>/sinh(2 phi2) = mu2 + (2 mu4/3 - 2 mu2^2 - 2 mu2/3) phi2^2
    # + O(phi2^4) in the bare Jy moments mu_k of |j,0>; the quartic tail is
    # below 1e-13 relative inside |phi2| < 1e-4
    evals, _, weights = _jy_eigensystem(2 * ji)
    mu2 = float((evals**2 * weights).sum())
    mu4 = float((evals**4 * weights).sum())
    ratio = mu2 + (2 * mu4 / 3 - 2 * mu2**2 - 2 * mu2 / 3) * phi2 * phi2
    d1 = ratio * math.sin(2 * phi.phi1)

    def jz2_dense(p2: float) -> float:
        state = rotate_dicke(ji, ComplexPhase(phi.phi1, p2))
        p = np.abs(state.coefficients) ** 2
        return float((state.m_values**2 * p).sum())

    h = 1e-3
    d_h = (jz2_dense(phi2 + h) - jz2_dense(phi2 - h)) / (2 * h)
    d_h2 = (jz2_dense(phi2 + h / 2) - jz2_dense(phi2 - h / 2)) / h
    d2 = (4 * d_h2 - d_h) / 3
    return float(d1), float(d2)


def _dense_covariances(state: DickeState) -> tuple[float, float, float, float]:
    """(Var Jz^2, Var Jy, sym cross moment, <Jy>) on a dense state."""
    _, _, jy, jz = spin_matrices(state.j2)
    c = state.coefficients
    p = np.abs(c) ** 2
    ms = state.m_values
    m_jz2 = float((ms**2 * p).sum())
    m_jz4 = float((ms**4 * p).sum())
    jy_c = jy @ c
    m_jy = float(np.real(np.conj(c) @ jy_c))
    m_jy2 = float(np.real(np.conj(jy_c) @ jy_c))
    # (1/2)<{Jz^2, Jy}> = Re <Jz^2 Jy> since both factors are Hermitian
    cross = float(np.real(np.conj(c) @ (ms**2 * jy_c))) - m_jz2 * m_jy
    return m_jz4 - m_jz2**2, m_jy2 - m_jy**2, cross, m_jy


def var_phi1(j, phi: ComplexPhase) -> float:
    """(Delta phi1)^2 per (Jz^2, Jy) shot pair via two-parameter
    error propagation; the Jz^2 variance and the symmetrized cross moment
    come from the dense rotated state.

    At phi = 0 the 0/0 limit is taken by extrapolation (see
    :func:`var_phi1_origin`); at other stationary points of <Jz^2>
    (sin(2 phi1) = 0) the variance diverges.
    """
    ji = _require_integer_j(j)
    if abs(math.sin(2 * phi.phi1)) < SIN_FLOOR:
        if abs(phi.phi1) < 1e-9 and abs(phi.phi2) < 1e-12:
            return var_phi1_origin(ji)
        raise DivergentVarianceError(
            "sin(2 phi1) = 0 away from the origin: <Jz^2> is stationary and "
            "the phi1 variance diverges"
        )
    state = rotate_dicke(ji, phi)
    v11, v22, v12, _ = _dense_covariances(state)
    d1, d2 = jz2_derivatives(ji, phi)
    jac = np.array([[d1, d2], [0.0, 2 * v22]])
    meas = np.array([[v11, v12], [v12, v22]])
    report = invert_error_propagation(jac, meas)
    return report.var_phi1


def var_phi1_covariance(j, phi: ComplexPhase) -> CovarianceReport:
    """Full (phi1, phi2) covariance of the (Jz^2, Jy) readout pair."""
    ji = _require_integer_j(j)
    if abs(math.sin(2 * phi.phi1)) < SIN_FLOOR:
        raise SingularJacobianError("sin(2 phi1) = 0: Jacobian not invertible")
    state = rotate_dicke(ji, phi)
    v11, v22, v12, _ = _dense_covariances(state)
    d1, d2 = jz2_derivatives(ji, phi)
    jac = np.array([[d1, d2], [0.0, 2 * v22]])
    meas = np.array([[v11, v12], [v12, v22]])
    return invert_error_propagation(jac, meas)


_ORIGIN_NODES = (1e-3, 2e-3, 4e-3)


def var_phi1_origin(j) -> float:
    """phi1 -> 0 limit of var_phi1 at phi2 = 0 by quadratic extrapolation.

    1/var is even in phi1, so the fit is quadratic in phi1^2 through the
    nodes {1e-3, 2e-3, 4e-3}; a second fit from halved nodes must agree to
    1e-8 relative or the limit is declared non-convergent. The limit equals
    the Heisenberg value 2/(N(N+2)).
    """
    ji = _require_integer_j(j)

    def extrapolate(nodes) -> float:
        xs = np.array([x * x for x in nodes])
        gs = np.array(
            [1.0 / var_phi1(ji, ComplexPhase(x, 0.0)) for x in nodes]
        )
        coeffs = np.polyfit(xs, gs, 2)
        return float(np.polyval(coeffs, 0.0))

    g_a = extrapolate(_ORIGIN_NODES)
    g_b = extrapolate(tuple(x / 2 for x in _ORIGIN_NODES))
    if abs(g_a - g_b) > 1e-8 * max(abs(g_a), 1.0):
        raise DivergentVarianceError(
            f"origin extrapolations disagree: {g_a!r} vs {g_b!r}"
        )
    return 1.0 / g_b


def inverse_variances(j, phi: ComplexPhase) -> tuple[float, float]:
    """(1/var_phi1, 1/var_phi2) for sweep output.

    Stationary points of <Jz^2> report zero phi1 information instead of
    raising; the exact origin reports the extrapolated Heisenberg value.
    """
    ji = _require_integer_j(j)
    inv2 = 1.0 / var_phi2(ji, phi.phi2)
    try:
        inv1 = 1.0 / var_phi1(ji, phi)
    except DivergentVarianceError:
        inv1 = 0.0
    return inv1, inv2


def legendre_recurrence_check(j, phi2: float) -> float:
    """Relative residual of the three-term W20/W10/W00 identity:

        [sqrt((j+2)!/(j-2)!) W20/W00 + j(j+1)] sin(2 i phi2)
          + 2 sqrt((j+1)!/(j-1)!) (W10/W00) cos(2 i phi2) = 0 .
    """
    ji = _require_integer_j(j)
    if ji < 2:
        raise ConfigError("identity needs j >= 2")
    if phi2 == 0:
        raise ConfigError("identity degenerates at phi2 = 0")
    z = complex(math.cosh(2 * phi2))
    s = 1j * math.sinh(2 * phi2)
    w00 = _assoc_legendre_scaled(ji, 0, z, s)
    w10 = _assoc_legendre_scaled(ji, 1, z, s)
    w20 = _assoc_legendre_scaled(ji, 2, z, s)
    q2 = math.exp(0.5 * (math.lgamma(ji + 3) - math.lgamma(ji - 1)))
    q1 = math.sqrt(ji * (ji + 1))
    term_a = (q2 * w20 / w00 + ji * (ji + 1)) * cmath.sin(2j * phi2)
    term_b = 2 * q1 * (w10 / w00) * cmath.cos(2j * phi2)
    scale = max(abs(term_a), abs(term_b), 1e-300)
    return abs(term_a + term_b) / scale


def estimate_phase_from_moments(j, jy_mean: float, jz2_mean: float) -> ComplexPhase:
    """Invert measured (<Jy>, <Jz^2>) means; phi1 branch in [0, pi/2].

    phi2 comes first from the strictly monotone <Jy>(phi2) by bisection,
    then cos(2 phi1) from the <Jz^2> = <Jy> H relation.
    """
    ji = _require_integer_j(j)
    jmax = float(ji)
    if abs(jy_mean) >= jmax:
        raise OutOfDomainMeanError(f"<Jy> = {jy_mean!r} outside (-j, j)")
    from scipy.optimize import brentq

    def f(p2: float) -> float:
        return _jy_moments_eigen(2 * ji, p2)[0] - jy_mean

    bound = 1.0
    while f(bound) < 0 or f(-bound) > 0:
        bound *= 2
        if bound > 64:
            raise OutOfDomainMeanError("<Jy> inversion failed to bracket")
    phi2 = float(brentq(f, -bound, bound, xtol=1e-13))
    if abs(phi2) > SMALL_PHI2:
        m1 = _jy_moments_eigen(2 * ji, phi2)[0]
        cos_2p1 = math.cosh(2 * phi2) - 2 * math.sinh(2 * phi2) * jz2_mean / m1
    else:
        mu2 = ji * (ji + 1) / 2
        cos_2p1 = 1 - 2 * jz2_mean / mu2
    if abs(cos_2p1) > 1 + 1e-9:
        raise OutOfDomainMeanError(
            f"cos(2 phi1) = {cos_2p1!r} outside [-1, 1]"
        )
    phi1 = 0.5 * math.acos(min(1.0, max(-1.0, cos_2p1)))
    return ComplexPhase(float(phi1), phi2)
