import numpy as np
import pytest
from scipy.stats import chisquare

from phasetomo.coupling import AlphaBeta, ComplexPhase
from phasetomo.dicke import rotate_dicke, var_phi1_covariance
from phasetomo.errors import ConfigError, UnsupportedRepresentationError
from phasetomo.metrology import cramer_rao_bound, dominates_psd
from phasetomo.noon import (
    noon_expectations,
    noon_final_state_from_phase,
    noon_fisher_per_round,
)
from phasetomo.sampler import (
    MeasurementModel,
    MeasurementRecord,
    ShotPlan,
    dicke_models,
    empirical_phase_estimate,
    noon_models,
    qubit_models,
    sample_observable,
    sample_records,
    stream_generator,
    tr_models,
)
from phasetomo.trscheme import tr_final_state


def test_seed_determinism():
    model = MeasurementModel("M1", np.array([1.0, -1.0]), np.array([0.3, 0.7]))
    plan = ShotPlan(seed=99, shots_per_observable=5000, observables=("M1",))
    a = sample_observable(model, plan, 0)
    b = sample_observable(model, plan, 0)
    assert np.array_equal(a.counts, b.counts)
    c = sample_observable(model, plan, 1)
    assert not np.array_equal(a.counts, c.counts)


def test_stream_generator_is_philox():
    g = stream_generator(5, 0)
    assert type(g.bit_generator).__name__ == "Philox"


def test_eigenstate_single_outcome():
    model = MeasurementModel("K", np.array([1.0, -1.0]), np.array([1.0, 0.0]))
    plan = ShotPlan(seed=1, shots_per_observable=1000, observables=("K",))
    rec = sample_observable(model, plan, 0)
    assert rec.counts[0] == 1000
    assert rec.mean == 1.0
    assert rec.variance == 0.0


def test_noon_real_phase_branch_is_fair_coin():
    state = noon_final_state_from_phase(ComplexPhase(0.7, 0.0), 6)
    m2_model = noon_models(state)[1]
    assert np.allclose(m2_model.probabilities, [0.5, 0.5], atol=1e-12)
    plan = ShotPlan(seed=7, shots_per_observable=100_000, observables=("M2",))
    rec = sample_observable(m2_model, plan, 0)
    # 4 sigma binomial band around 1/2
    sigma = 0.5 / np.sqrt(plan.shots_per_observable)
    assert abs(rec.counts[0] / rec.shots - 0.5) < 4 * sigma


def test_law_of_large_numbers_qubit(rng):
    state = np.array([0.8, 0.6j])
    for model in qubit_models(state):
        plan = ShotPlan(seed=3, shots_per_observable=10**6,
                        observables=(model.label,))
        rec = sample_observable(model, plan, 0)
        exact = float((model.eigenvalues * model.probabilities).sum())
        sigma = np.sqrt(max(rec.variance, 1e-12) / rec.shots)
        assert abs(rec.mean - exact) < 4 * sigma + 1e-6


def test_dicke_chi_square():
    state = rotate_dicke(2, ComplexPhase(0.3, 0.0))
    jz_model = dicke_models(state)[0]
    plan = ShotPlan(seed=11, shots_per_observable=100_000, observables=("Jz",))
    rec = sample_observable(jz_model, plan, 0)
    expected = jz_model.probabilities * rec.shots
    keep = expected > 5
    stat, p = chisquare(rec.counts[keep], expected[keep] * rec.counts[keep].sum()
                        / expected[keep].sum())
    assert p > 0.001


def test_record_invariants():
    model = MeasurementModel("Jz", np.array([1.0, 0.0, -1.0]),
                             np.array([0.2, 0.5, 0.3]))
    plan = ShotPlan(seed=2, shots_per_observable=1234, observables=("Jz",))
    rec = sample_observable(model, plan, 0)
    assert rec.counts.sum() == 1234
    assert model.eigenvalues.min() <= rec.mean <= model.eigenvalues.max()


def test_sample_records_labels():
    state = noon_final_state_from_phase(ComplexPhase(0.2, 0.1), 4)
    models = noon_models(state)
    plan = ShotPlan(seed=5, shots_per_observable=100, observables=("M1", "M2"))
    recs = sample_records(models, plan)
    assert set(recs) == {"M1", "M2"}
    with pytest.raises(ConfigError):
        sample_records(models, ShotPlan(5, 10, ("M1", "bogus")))


def test_unsupported_representation():
    with pytest.raises(UnsupportedRepresentationError):
        qubit_models(np.array([1.0, 0.0, 0.0]))


def test_noiseless_inversion_noon():
    # exact probabilities injected: estimator recovers phi to 1e-12
    n, phi = 8, ComplexPhase(0.11, 0.03)
    state = noon_final_state_from_phase(phi, n)
    models = noon_models(state)
    recs = {}
    shots = 10**6
    for m in models:
        # build a record whose counts match the exact distribution
        counts = np.round(m.probabilities * shots).astype(int)
        counts[-1] = shots - counts[:-1].sum()
        recs[m.label] = MeasurementRecord(m.label, m.eigenvalues, counts, shots)
    est, rep = empirical_phase_estimate(recs, "noon", n)
    exact_m1, exact_m2 = noon_expectations(phi, n)
    drift = max(abs(recs["M1"].mean - exact_m1), abs(recs["M2"].mean - exact_m2))
    assert est.phi1 == pytest.approx(phi.phi1, abs=10 * drift + 1e-12)
    assert est.phi2 == pytest.approx(phi.phi2, abs=10 * drift + 1e-12)
    assert rep.source == "monte-carlo"


def test_shot_noise_scaling():
    # estimator variance over repetitions scales like 1/shots
    n, phi = 10, ComplexPhase(np.pi / 20, 0.0)
    state = noon_final_state_from_phase(phi, n)
    models = noon_models(state)
    reps = 150
    variances = []
    shot_counts = (100, 1000, 10000, 100000)
    stream = 0
    for shots in shot_counts:
        est1 = []
        for _ in range(reps):
            plan = ShotPlan(seed=31, shots_per_observable=shots,
                            observables=("M1", "M2"))
            recs = {}
            for m in models:
                recs[m.label] = sample_observable(m, plan, stream)
                stream += 1
            est, _ = empirical_phase_estimate(recs, "noon", n)
            est1.append(est.phi1)
        variances.append(np.var(est1, ddof=1))
    slope = np.polyfit(np.log(shot_counts), np.log(variances), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.05)


def test_mc_covariance_dominates_crb():
    # empirical covariance respects the per-round bound within 3 SE
    n, phi = 6, ComplexPhase(np.pi / 12, 0.04)
    state = noon_final_state_from_phase(phi, n)
    models = noon_models(state)
    shots, reps = 2000, 400
    ests = []
    stream = 0
    for _ in range(reps):
        plan = ShotPlan(seed=77, shots_per_observable=shots,
                        observables=("M1", "M2"))
        recs = {}
        for m in models:
            recs[m.label] = sample_observable(m, plan, stream)
            stream += 1
        est, _ = empirical_phase_estimate(recs, "noon", n)
        ests.append([est.phi1, est.phi2])
    emp = np.cov(np.array(ests).T, ddof=1) * shots
    bound = cramer_rao_bound(noon_fisher_per_round(phi, n)).matrix
    se = np.abs(emp).max() * np.sqrt(2 / (reps - 1))
    assert dominates_psd(emp, bound, slack=3 * se)


def test_dicke_unbiased_imaginary_part():
    n, phi = 8, ComplexPhase(0.3, 0.05)
    j = n / 2
    state = rotate_dicke(j, phi)
    models = dicke_models(state)
    reps, shots = 200, 10**4
    est2 = []
    stream = 0
    for _ in range(reps):
        plan = ShotPlan(seed=13, shots_per_observable=shots,
                        observables=("Jz", "Jy"))
        recs = {}
        for m in models:
            recs[m.label] = sample_observable(m, plan, stream)
            stream += 1
        est, _ = empirical_phase_estimate(recs, "dicke", n)
        est2.append(est.phi2)
    an = var_phi1_covariance(j, phi).matrix[1, 1] / shots
    bias = np.mean(est2) - phi.phi2
    assert abs(bias) < 3 * np.sqrt(an / reps)


def test_records_to_csv():
    from phasetomo.sampler import records_to_csv

    state = noon_final_state_from_phase(ComplexPhase(0.2, 0.1), 4)
    plan = ShotPlan(seed=5, shots_per_observable=100, observables=("M1", "M2"))
    recs = sample_records(noon_models(state), plan)
    csv = records_to_csv(recs, "noon", plan.seed)
    lines = csv.splitlines()
    assert lines[0] == "scheme,observable,eigenvalue,count,seed"
    assert len(lines) == 5
    assert all(l.startswith("noon,M") and l.endswith(",5") for l in lines[1:])
    # eigenvalue cells must be plain parseable decimals
    assert {l.split(",")[2] for l in lines[1:]} == {"1.0", "-1.0"}
    counts = [int(l.split(",")[3]) for l in lines[1:]]
    assert sum(counts) == 200


def test_tr_records_and_estimate():
    # working point inside the single-fringe branch [0, pi/(2N)]
    import cmath

    phi1_true = 0.1
    half = complex(phi1_true, 0.08) / 2
    ab = AlphaBeta(cmath.cos(half), cmath.sin(half))
    state = tr_final_state(ab, 5)
    model = tr_models(state)[0]
    plan = ShotPlan(seed=21, shots_per_observable=10**5,
                    observables=("parity2N",))
    rec = sample_observable(model, plan, 0)
    est, rep = empirical_phase_estimate({"parity2N": rec}, "tr", 5)
    assert est.phi1 == pytest.approx(phi1_true, abs=5e-3)
    assert rep.matrix[0, 0] == pytest.approx(1 / (4 * 25) / 10**5, rel=1e-12)
