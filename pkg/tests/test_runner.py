import json

import numpy as np
import pytest

from phasetomo.errors import ConfigError, SingularThetaError
from phasetomo.runner import (
    AxisGrid,
    RunConfig,
    config_hash,
    fmt_number,
    load_config,
    run_fisher,
    run_mc,
    run_reconstruct,
    run_scan,
)


def cfg_of(**kw) -> RunConfig:
    return load_config(json.dumps(kw))


def rows_of(csv: str) -> list[list[str]]:
    lines = [l for l in csv.splitlines() if l and not l.startswith("#")]
    return [l.split(",") for l in lines[1:]]


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        load_config('{"scheme": "noon", "n": 4, "bogus": 1}')
    with pytest.raises(ConfigError):
        load_config('{"scheme": "noon", "grid": {"phi1": {"start": 0, "stop": 1, "step": 0.5, "oops": 2}, "phi2": {"start": 0, "stop": 0, "step": 1}}, "n": 2}')


def test_invalid_json_rejected():
    with pytest.raises(ConfigError):
        load_config("{not json")


def test_axis_grid_values():
    g = AxisGrid(start=-0.5, stop=0.5, step=0.02)
    vals = g.values()
    assert len(vals) == 51
    assert vals[0] == -0.5 and vals[-1] == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ConfigError):
        AxisGrid(start=0.0, stop=1.0, step=0.3).values()


def test_fmt_number():
    assert fmt_number(0.5) == "0.5"
    assert fmt_number(float("nan")) == "nan"
    assert fmt_number(1 / 3) == "0.333333333333333"
    assert len(fmt_number(np.pi).replace(".", "").lstrip("-0")) <= 15


def test_reconstruct_exact_uniform():
    cfg = cfg_of(scheme="qubit", state={"preset": "uniform-4"},
                 theta=np.pi / 2)
    csv = run_reconstruct(cfg)
    rows = rows_of(csv)
    assert len(rows) == 4
    assert max(float(r[5]) for r in rows) < 1e-10


def test_reconstruct_exact_random_amplitudes():
    amps = [[0.3, 0.1], [0.2, -0.4], [0.5, 0.0], [0.1, 0.2]]
    cfg = cfg_of(scheme="qubit", state={"amplitudes": amps}, theta=np.pi / 4)
    rows = rows_of(run_reconstruct(cfg))
    assert max(float(r[5]) for r in rows) < 1e-10


def test_reconstruct_mc_shot_noise():
    from phasetomo.qubit import ProbTriple, forward_probabilities, reconstruct_eq5
    from phasetomo.states import preset_state, tilde_psi
    from phasetomo.coupling import CouplingConfig

    shots = 100_000
    cfg = cfg_of(scheme="qubit", state={"preset": "ramp-4"}, theta=np.pi / 2,
                 mode="mc",
                 shots={"seed": 4242, "shots_per_observable": shots})
    rows = rows_of(run_reconstruct(cfg))
    state = preset_state("ramp-4")
    pt = tilde_psi(state)
    eps = 1e-6
    for r in rows:
        x = int(r[0])
        probs = forward_probabilities(state, CouplingConfig(np.pi / 2, x))
        base = reconstruct_eq5(probs, np.pi / 2, pt, 4)
        # delta method: propagate binomial noise through the implemented map
        var = 0.0
        for field in ("p_k", "p_k1", "p_k2"):
            vals = {f: getattr(probs, f) for f in ("p_k", "p_k1", "p_k2")}
            vals[field] += eps
            shifted = reconstruct_eq5(ProbTriple(**vals), np.pi / 2, pt, 4)
            sens = abs(shifted - base) / eps
            p = getattr(probs, field)
            var += sens**2 * p * (1 - p) / shots
        assert float(r[5]) < 4 * np.sqrt(var)


def test_reconstruct_singular_theta():
    cfg = cfg_of(scheme="qubit", state={"preset": "uniform-4"}, theta=np.pi)
    with pytest.raises(SingularThetaError) as err:
        run_reconstruct(cfg)
    assert "sin(theta)" in str(err.value)


def test_reconstruct_wrong_scheme():
    with pytest.raises(ConfigError):
        run_reconstruct(cfg_of(scheme="noon", n=4, phases=[[0.1, 0.0]]))


def test_scan_noon_curve():
    cfg = cfg_of(scheme="noon", n=10,
                 grid={"phi1": {"start": 0.1, "stop": 0.1, "step": 1.0},
                       "phi2": {"start": -0.3, "stop": 0.3, "step": 0.1}})
    rows = rows_of(run_scan(cfg))
    assert len(rows) == 7
    for r in rows:
        phi2 = float(r[3])
        expected = 100 / np.cosh(10 * phi2) ** 2
        assert float(r[5]) == pytest.approx(expected, rel=1e-12)
        assert float(r[4]) == pytest.approx(expected, rel=1e-12)


def test_scan_dicke_phi2_zero_row_matches_p1():
    cfg = cfg_of(scheme="dicke", n=10,
                 grid={"phi1": {"start": 0.1, "stop": 0.5, "step": 0.2},
                       "phi2": {"start": 0.0, "stop": 0.0, "step": 1.0}})
    rows = rows_of(run_scan(cfg))
    j = 5
    for r in rows:
        phi1 = float(r[2])
        p1 = 8 * j * (j + 1) / ((j * j + j - 2) * np.tan(phi1) ** 2 + 4)
        assert float(r[4]) == pytest.approx(p1, rel=1e-9)


def test_scan_dicke_requires_even_n():
    cfg = cfg_of(scheme="dicke", n=7, phases=[[0.1, 0.0]])
    from phasetomo.errors import HalfIntegerJError

    with pytest.raises(HalfIntegerJError):
        run_scan(cfg)


def test_scan_threads_match_serial():
    base = dict(scheme="dicke", n=4,
                grid={"phi1": {"start": -0.2, "stop": 0.2, "step": 0.1},
                      "phi2": {"start": -0.1, "stop": 0.1, "step": 0.1}})
    serial = run_scan(cfg_of(**base))
    threaded = run_scan(cfg_of(**base, threads=3))
    # identical rows; header differs only through the config hash
    assert serial.splitlines()[1:] == [
        l for l in threaded.splitlines()[1:]
    ]


def test_mc_threads_match_serial():
    base = dict(scheme="noon", n=6, phases=[[0.2, 0.0], [0.15, 0.05], [0.1, -0.05]],
                shots={"seed": 88, "shots_per_observable": 500,
                       "repetitions": 20})
    serial = run_mc(cfg_of(**base))
    pooled = run_mc(cfg_of(**base, threads=2))
    assert serial.splitlines()[1:] == pooled.splitlines()[1:]


def test_byte_identical_reruns():
    cfg = cfg_of(scheme="noon", n=10, phases=[[0.16, 0.0]],
                 shots={"seed": 77, "shots_per_observable": 2000,
                        "repetitions": 50})
    assert run_mc(cfg) == run_mc(cfg)


def test_header_carries_hash_and_seed():
    cfg = cfg_of(scheme="noon", n=4, phases=[[0.3, 0.0]],
                 shots={"seed": 123, "shots_per_observable": 100,
                        "repetitions": 5})
    head = run_mc(cfg).splitlines()[0]
    assert head.startswith("# phasetomo v")
    assert f"config_sha256={config_hash(cfg)}" in head
    assert "seed=123" in head


def test_mc_noon_band():
    cfg = cfg_of(scheme="noon", n=10, phases=[[np.pi / 20, 0.0]],
                 shots={"seed": 20240817, "shots_per_observable": 10_000,
                        "repetitions": 200})
    rows = rows_of(run_mc(cfg))
    assert len(rows) == 1
    ratio1, ratio2 = float(rows[0][9]), float(rows[0][10])
    assert 0.7 < ratio1 < 1.4
    assert 0.7 < ratio2 < 1.4
    assert float(rows[0][7]) == pytest.approx(1e-6, rel=1e-12)


def test_mc_dicke_band():
    cfg = cfg_of(scheme="dicke", n=8, phases=[[0.3, 0.05]],
                 shots={"seed": 31, "shots_per_observable": 10_000,
                        "repetitions": 200})
    rows = rows_of(run_mc(cfg))
    ratio1, ratio2 = float(rows[0][9]), float(rows[0][10])
    assert 0.7 < ratio1 < 1.4
    assert 0.7 < ratio2 < 1.4


def test_mc_tr_band():
    cfg = cfg_of(scheme="tr", n=5, phases=[[0.1, 0.05]],
                 shots={"seed": 5150, "shots_per_observable": 10_000,
                        "repetitions": 200})
    rows = rows_of(run_mc(cfg))
    ratio1, ratio2 = float(rows[0][9]), float(rows[0][10])
    assert 0.7 < ratio1 < 1.4
    assert 0.7 < ratio2 < 1.4


def test_mc_qubit_rows():
    cfg = cfg_of(scheme="qubit", state={"preset": "uniform-2"},
                 theta=np.pi / 2, target_x=1,
                 shots={"seed": 6, "shots_per_observable": 5000,
                        "repetitions": 100})
    rows = rows_of(run_mc(cfg))
    assert len(rows) == 1
    assert 0.6 < float(rows[0][9]) < 1.5


def test_fisher_csv_and_fit():
    cfg = cfg_of(scheme="noon", gamma_abs=[1.0], n_values=[4, 8, 12])
    csv = run_fisher(cfg)
    rows = rows_of(csv)
    assert len(rows) == 3
    for r in rows:
        n = int(r[0])
        assert float(r[5]) == pytest.approx(1 / n**2, rel=1e-6)
    fit_lines = [l for l in csv.splitlines() if l.startswith("# fit")]
    assert len(fit_lines) == 1
    slope = float(fit_lines[0].split("slope_log_n2_crb11=")[1])
    assert abs(slope) < 1e-6


def test_fisher_requires_inputs():
    with pytest.raises(ConfigError):
        run_fisher(cfg_of(scheme="noon", gamma_abs=[1.0]))
    with pytest.raises(ConfigError):
        run_fisher(cfg_of(scheme="dicke", gamma_abs=[1.0], n_values=[4]))


def test_phases_and_grid_exclusive():
    cfg = cfg_of(scheme="noon", n=4, phases=[[0.1, 0.0]],
                 grid={"phi1": {"start": 0, "stop": 0, "step": 1},
                       "phi2": {"start": 0, "stop": 0, "step": 1}})
    with pytest.raises(ConfigError):
        cfg.phase_points()
