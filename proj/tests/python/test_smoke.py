import json
import math
import os
import subprocess
from pathlib import Path

import jsonschema
import numpy as np
import pytest

import plyap

ROOT = Path(__file__).resolve().parents[2]
SCHEMA = json.loads(Path(os.environ.get("PLYAP_SCHEMA", ROOT / "schemas" / "summary.schema.json")).read_text())


def test_distances():
    e1 = np.array([1, 0], dtype=complex)
    e2 = np.array([0, 1], dtype=complex)
    assert plyap.fubini_study_distance(e1, e2) == pytest.approx(math.pi)
    assert plyap.fubini_study_distance(e1, 3j * e1) == pytest.approx(0.0, abs=1e-7)
    assert plyap.hilbert_distance(e1, e2) == pytest.approx(math.sqrt(2))
    d = 0.7
    assert plyap.classical_divergence(plyap.bounded_euclidean_distance(d)) == pytest.approx(d)
    with pytest.raises(plyap.ContractError):
        plyap.fubini_study_distance(e1, np.ones(3, dtype=complex))


def test_linear_exponent():
    lo = plyap.linear_analytic_log_overlaps(1.0, 3.0, 40)
    res = plyap.analyze_log_overlaps(list(range(41)), lo, threshold=1e-9, window=(10, None))
    assert res["estimate"]["asymptotic_value"] == pytest.approx(math.log(3) / 2, rel=0.01)
    assert res["classification"] == "unstable"


def test_ingest_and_errors():
    t = np.arange(0, 401.0)
    res = plyap.analyze_overlaps(t, np.exp(-2 * 0.017 * t), convention="probability")
    assert res["classification"] == "unstable"
    assert res["exponent"] == pytest.approx(0.017, rel=0.05)
    res = plyap.analyze_overlaps(t, 1 - 0.5 * np.sin(0.05 * t) ** 2)
    assert res["classification"] == "stable"
    with pytest.raises(plyap.DataError):
        plyap.analyze_overlaps([0, 1, 2], [1.0, 1.2, 0.5])


def test_trajectory_and_transfer():
    direct, via = plyap.trajectory_lyapunov("baker")
    assert direct == pytest.approx(math.log(2), abs=1e-6)
    assert via == pytest.approx(direct, abs=1e-6)
    rho = np.zeros((64, 64))
    rho[:, :32] = 2.0
    out = plyap.baker_transfer(rho)
    assert out.mean() == pytest.approx(1.0, abs=1e-14)
    assert out[:32, :].min() == pytest.approx(2.0)


def test_quantum():
    b = plyap.bvs_baker(8)
    assert np.abs(b.conj().T @ b - np.eye(8)).max() < 1e-12
    assert plyap.gaussian_autocorrelation("barrier", 2.0, 1.0, 5.0) == pytest.approx(0.0085229037057832356715, rel=1e-12)
    split = plyap.split_operator_autocorrelation("barrier", 2.0, 1.0, 0.005, 10, 10)
    exact = [plyap.gaussian_autocorrelation("barrier", 2.0, 1.0, 0.05 * k) for k in range(11)]
    assert np.allclose(split, exact, rtol=1e-3)
    with pytest.raises(plyap.DomainError):
        plyap.bvs_coherent_state(7, 0.1, 0.1, 1.0)


def test_run_writes_schema_valid_summary(tmp_path):
    summary = plyap.run({"system": "linear", "id": "py_lin", "r": 2}, str(tmp_path / "lin"))
    jsonschema.validate(summary, SCHEMA)
    on_disk = json.loads((tmp_path / "lin" / "summary.json").read_text())
    jsonschema.validate(on_disk, SCHEMA)
    assert on_disk["estimate"]["asymptotic_value"] == pytest.approx(math.log(2) / 2, rel=0.01)
    for name in ("distance.csv", "divergence.csv", "lambda_t.csv"):
        assert (tmp_path / "lin" / name).read_text().startswith("# config_hash=" + summary["config_hash"])


def test_config_error_names_field():
    with pytest.raises(plyap.ConfigError, match="'steps'"):
        plyap.evaluate({"system": "linear", "steps": "many"})


def test_summaries_of_every_system_validate():
    for cfg in ({"system": "oscillator"}, {"system": "barrier"}, {"system": "r_adic", "steps": 12},
                {"system": "baker_classical", "grid_m": 6}, {"system": "baker_koopman", "grid_m": 6},
                {"system": "bvs_baker", "N": 128, "steps": 10}):
        jsonschema.validate(plyap.evaluate(cfg), SCHEMA)


@pytest.mark.skipif("PLYAP_EXE" not in os.environ, reason="CLI path not provided")
def test_cli_figure_and_ingest(tmp_path):
    exe = os.environ["PLYAP_EXE"]
    subprocess.run([exe, "figure", "fig1b", "--out", str(tmp_path)], check=True, capture_output=True)
    svg = (tmp_path / "fig1b.svg").read_text()
    assert svg.startswith("<svg") and "http" not in svg.replace("http://www.w3.org/2000/svg", "")
    for summary in tmp_path.glob("fig1b/*/summary.json"):
        jsonschema.validate(json.loads(summary.read_text()), SCHEMA)
    csv = tmp_path / "bad.csv"
    csv.write_text("t,overlap\n0,1\n1,2\n")
    proc = subprocess.run([exe, "ingest", str(csv), "--convention", "amplitude", "--out", str(tmp_path / "x")],
                          capture_output=True, text=True)
    assert proc.returncode == 3
    assert "line 3" in proc.stderr
