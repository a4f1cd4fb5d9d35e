import json
import subprocess
import sys
import threading

import numpy as np

from phasetomo.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main


def write_cfg(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_reconstruct_to_file(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"scheme": "qubit",
                               "state": {"preset": "uniform-4"},
                               "theta": np.pi / 2})
    out = tmp_path / "out.csv"
    code = main(["reconstruct", "--config", cfg, "--out", str(out)])
    assert code == EXIT_OK
    text = out.read_text()
    assert text.splitlines()[1].startswith("x,")


def test_stdout_default(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"scheme": "noon", "n": 4,
                               "phases": [[0.2, 0.0]]})
    code = main(["scan", "--config", cfg])
    assert code == EXIT_OK
    captured = capsys.readouterr()
    assert "scheme,N,phi1,phi2" in captured.out


def test_config_error_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"scheme": "noon", "n": 4, "bogus": True})
    assert main(["scan", "--config", cfg]) == EXIT_CONFIG
    assert main(["scan", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_numeric_error_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"scheme": "qubit",
                               "state": {"preset": "uniform-4"},
                               "theta": np.pi})
    assert main(["reconstruct", "--config", cfg]) == EXIT_NUMERIC


def test_seed_override_changes_output(tmp_path, capsys):
    payload = {"scheme": "noon", "n": 4, "phases": [[0.3, 0.0]],
               "shots": {"seed": 1, "shots_per_observable": 500,
                         "repetitions": 10}}
    cfg = write_cfg(tmp_path, payload)
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert main(["mc", "--config", cfg, "--out", str(a)]) == EXIT_OK
    assert main(["mc", "--config", cfg, "--out", str(b), "--seed", "2"]) == EXIT_OK
    assert main(["mc", "--config", cfg, "--out", str(c), "--seed", "1"]) == EXIT_OK
    assert a.read_text() != b.read_text()
    assert a.read_text() == c.read_text()
    assert "seed=2" in b.read_text().splitlines()[0]


def test_entry_point_installed():
    proc = subprocess.run([sys.executable, "-m", "phasetomo.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("reconstruct", "scan", "fisher", "mc", "serve"):
        assert sub in proc.stdout


def test_server_mode(tmp_path):
    # run the CLI against a live service instance
    import uvicorn

    from phasetomo.service import app

    config = uvicorn.Config(app, host="127.0.0.1", port=8731, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    import time

    for _ in range(100):
        if server.started:
            break
        time.sleep(0.05)
    assert server.started
    try:
        cfg = write_cfg(tmp_path, {"scheme": "noon", "n": 4,
                                   "phases": [[0.2, 0.0]]})
        out = tmp_path / "remote.csv"
        code = main(["scan", "--config", cfg, "--out", str(out),
                     "--server", "http://127.0.0.1:8731"])
        assert code == EXIT_OK
        assert "inv_var_phi1" in out.read_text()
        # numeric-domain error propagates as exit 3 over HTTP too
        bad = write_cfg(tmp_path, {"scheme": "qubit",
                                   "state": {"preset": "uniform-4"},
                                   "theta": np.pi}, name="bad.json")
        assert main(["reconstruct", "--config", bad,
                     "--server", "http://127.0.0.1:8731"]) == EXIT_NUMERIC
    finally:
        server.should_exit = True
        thread.join(timeout=5)
