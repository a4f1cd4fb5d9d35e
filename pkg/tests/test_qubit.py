import numpy as np
import pytest

from phasetomo.coupling import (
    AXIS_TRIPLES,
    ComplexPhase,
    CouplingConfig,
    alpha_beta,
    final_pointer_state,
    phase_from_alpha_beta,
)
from phasetomo.errors import ConfigError, SingularThetaError
from phasetomo.qubit import (
    ProbTriple,
    estimate_phase,
    forward_probabilities,
    general_expectations,
    optimal_expectations,
    phase_from_probabilities,
    pointer_input_default,
    reconstruct_eq5,
)
from phasetomo.states import make_state, tilde_psi
from conftest import random_state

THETAS = (np.pi / 8, np.pi / 4, np.pi / 2)


def test_pointer_input_default_moments():
    for axis in ("z", "y"):
        pin = pointer_input_default(axis)
        K, K1, K2 = AXIS_TRIPLES[axis]
        assert np.real(pin.conj() @ K1 @ pin) == pytest.approx(1.0, abs=1e-12)
        assert abs(np.real(pin.conj() @ K2 @ pin)) < 1e-12
        assert abs(np.real(pin.conj() @ K @ pin)) < 1e-12


def test_zero_component_passthrough():
    # psi_x = 0 leaves the pointer in its input state
    s = make_state([1, 0])
    probs = forward_probabilities(s, CouplingConfig(np.pi / 2, 2))
    assert probs.p_k == pytest.approx(0.5, abs=1e-14)
    assert probs.p_k1 == pytest.approx(1.0, abs=1e-14)
    assert probs.p_k2 == pytest.approx(0.5, abs=1e-14)


def test_symmetric_state_strong_coupling():
    # exact state algebra gives (p_K, p_K1, p_K2) = (1/2, 1/2, 1)
    s = make_state([1, 1])
    probs = forward_probabilities(s, CouplingConfig(np.pi, 1))
    assert probs.p_k == pytest.approx(0.5, abs=1e-14)
    assert probs.p_k1 == pytest.approx(0.5, abs=1e-14)
    assert probs.p_k2 == pytest.approx(1.0, abs=1e-14)


def test_probabilities_match_born_rule(rng):
    # cross-check p_M against projector weights on the final state
    for _ in range(20):
        s = random_state(rng, 4)
        cc = CouplingConfig(rng.uniform(0.2, np.pi), int(rng.integers(1, 5)))
        probs = forward_probabilities(s, cc)
        ab = alpha_beta(s, cc)
        fin = final_pointer_state(ab, pointer_input_default(cc.pointer_axis),
                                  cc.pointer_axis)
        for p, M in zip((probs.p_k, probs.p_k1, probs.p_k2),
                        AXIS_TRIPLES[cc.pointer_axis]):
            proj = (np.eye(2) + M) / 2
            born = float(np.real(fin.conj() @ proj @ fin))
            assert p == pytest.approx(born, abs=1e-13)


def test_closed_loop(rng):
    worst = 0.0
    for d in (2, 4, 8):
        for _ in range(5):
            s = random_state(rng, d)
            pt = tilde_psi(s)
            for theta in THETAS:
                for x in range(1, d + 1):
                    probs = forward_probabilities(s, CouplingConfig(theta, x))
                    est = reconstruct_eq5(probs, theta, pt, d)
                    worst = max(worst, abs(est - s.amplitudes[x - 1]))
    assert worst < 1e-10


def test_reconstruct_null_signal():
    probs = ProbTriple(p_k=0.5, p_k1=1.0, p_k2=0.5)
    assert reconstruct_eq5(probs, np.pi / 2, np.sqrt(2), 2) == 0


def test_reconstruct_singular_theta():
    probs = ProbTriple(p_k=0.5, p_k1=0.9, p_k2=0.5)
    for theta in (np.pi, 1e-15):
        with pytest.raises(SingularThetaError):
            reconstruct_eq5(probs, theta, 1.0, 2)


def test_reconstruct_sensitivity_linear(rng):
    # error scales linearly with probability perturbations; the coefficient
    # agrees with the finite-difference Jacobian of the implemented map
    s = random_state(rng, 4)
    theta, x = np.pi / 2, 2
    pt = tilde_psi(s)
    probs = forward_probabilities(s, CouplingConfig(theta, x))
    base = reconstruct_eq5(probs, theta, pt, 4)

    def perturbed(eps):
        p = ProbTriple(probs.p_k + eps, probs.p_k1 - eps, probs.p_k2 + eps)
        return reconstruct_eq5(p, theta, pt, 4)

    err3 = abs(perturbed(1e-3) - base)
    err4 = abs(perturbed(1e-4) - base)
    assert err3 / err4 == pytest.approx(10.0, rel=2e-2)
    jac = abs(perturbed(1e-7) - base) / 1e-7
    assert err4 == pytest.approx(jac * 1e-4, rel=1e-2)


def test_optimal_expectations_identity():
    assert optimal_expectations(ComplexPhase(0.0, 0.0), 1.0) == (1.0, 0.0)


def test_optimal_expectations_quarter_turn():
    k1, k = optimal_expectations(ComplexPhase(np.pi / 2, 0.0), 1.0)
    assert abs(k1) < 1e-16 and k == 0.0


def test_optimal_expectations_hyperbolic():
    k1, k = optimal_expectations(ComplexPhase(0.0, 0.5), 1.0)
    assert k1 == pytest.approx(1 / np.cosh(0.5), abs=1e-15)
    assert k == pytest.approx(np.tanh(0.5), abs=1e-15)
    # cross-check against the general rotation maps
    kf, k1f, k2f = general_expectations(ComplexPhase(0.0, 0.5), 0.0, 1.0, 0.0)
    assert k1f == pytest.approx(k1, abs=1e-15)
    assert kf == pytest.approx(k, abs=1e-15)


def test_general_expectations_real_phase_rotation(rng):
    v = rng.normal(size=3)
    v *= 0.9 / np.linalg.norm(v)
    k, k1, k2 = v
    phi1 = 0.77
    kf, k1f, k2f = general_expectations(ComplexPhase(phi1, 0.0), k, k1, k2)
    assert kf == pytest.approx(k, abs=1e-14)
    rot = np.array([[np.cos(phi1), -np.sin(phi1)], [np.sin(phi1), np.cos(phi1)]])
    assert np.allclose(rot @ [k1, k2], [k1f, k2f], atol=1e-14)


def test_general_expectations_vs_density_matrix_oracle(rng):
    from phasetomo.coupling import SIGMA_X, SIGMA_Y, SIGMA_Z, IDENTITY_2

    for _ in range(100):
        v = rng.normal(size=3)
        v *= rng.uniform(0, 1) ** (1 / 3) / np.linalg.norm(v)
        k1, k2, k = v
        phi = ComplexPhase(rng.uniform(-np.pi, np.pi), rng.uniform(-1.5, 1.5))
        rho = 0.5 * (IDENTITY_2 + k1 * SIGMA_X + k2 * SIGMA_Y + k * SIGMA_Z)
        V = np.cos(phi.value / 2) * IDENTITY_2 - 1j * np.sin(phi.value / 2) * SIGMA_Z
        rho_f = V @ rho @ V.conj().T
        rho_f /= np.trace(rho_f).real
        kf, k1f, k2f = general_expectations(phi, k, k1, k2)
        assert kf == pytest.approx(np.trace(rho_f @ SIGMA_Z).real, abs=1e-12)
        assert k1f == pytest.approx(np.trace(rho_f @ SIGMA_X).real, abs=1e-12)
        assert k2f == pytest.approx(np.trace(rho_f @ SIGMA_Y).real, abs=1e-12)


def test_output_bloch_norm_physical(rng):
    for _ in range(200):
        v = rng.normal(size=3)
        v *= rng.uniform(0, 1) ** (1 / 3) / np.linalg.norm(v)
        phi = ComplexPhase(rng.uniform(-np.pi, np.pi), rng.uniform(-2, 2))
        out = general_expectations(phi, *v)
        assert np.linalg.norm(out) <= 1 + 1e-12


def test_estimate_phase_round_trip():
    phi = ComplexPhase(0.63, -0.21)
    k1f, kf = optimal_expectations(phi, 1.0)
    _, _, k2f = general_expectations(phi, 0.0, 1.0, 0.0)
    est, resolved = estimate_phase(k1f, kf, 1.0, k2f)
    assert resolved
    assert est.phi1 == pytest.approx(phi.phi1, abs=1e-12)
    assert est.phi2 == pytest.approx(phi.phi2, abs=1e-12)


def test_estimate_phase_sign_ambiguity():
    phi = ComplexPhase(-0.63, 0.1)
    k1f, kf = optimal_expectations(phi, 1.0)
    est, resolved = estimate_phase(k1f, kf, 1.0, None)
    assert not resolved
    assert est.phi1 == pytest.approx(abs(phi.phi1), abs=1e-12)


def test_phase_from_probabilities_matches_coupling(rng):
    for _ in range(30):
        s = random_state(rng, 4)
        cc = CouplingConfig(rng.uniform(0.3, np.pi), int(rng.integers(1, 5)))
        probs = forward_probabilities(s, cc)
        phi_probs = phase_from_probabilities(probs)
        phi_ab = phase_from_alpha_beta(alpha_beta(s, cc))
        assert phi_probs.phi1 == pytest.approx(phi_ab.phi1, abs=1e-11)
        assert phi_probs.phi2 == pytest.approx(phi_ab.phi2, abs=1e-11)


def test_prob_triple_validation():
    with pytest.raises(ConfigError):
        ProbTriple(1.2, 0.5, 0.5)
