import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from evboot.cli import main

FIXTURE = Path(__file__).parent / "fixtures" / "case4_n100.csv"

runner = CliRunner()


def _run(*args):
    return runner.invoke(main, [str(a) for a in args])


def test_analyze_stdout_json(tmp_path):
    result = _run(
        "analyze", "--input", FIXTURE, "--reference", "x1,x2",
        "--alternative", "x2,x3", "--B", 400, "--seed", 1,
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert doc["schema_version"] == 1
    assert doc["n"] == 100
    assert set(doc["results"]) == {"global", "local"}
    for kind in ("global", "local"):
        block = doc["results"][kind]
        for lvl in ("0.95", "0.9"):
            lo, hi = block["intervals"][lvl]
            assert lo <= hi
            assert block["security"][lvl] in {"SV", "SS", "SI", "PS", "PI", "WI"}
    assert doc["evidence_category"] in {
        "StrongRef", "PrognosticRef", "Weak", "PrognosticAlt", "StrongAlt"
    }


def test_analyze_local_interval_narrower_on_fixture(tmp_path):
    out = tmp_path / "report.json"
    result = _run(
        "analyze", "--input", FIXTURE, "--reference", "x1,x2",
        "--alternative", "x2,x3", "--B", 1000, "--seed", 4, "--output", out,
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(out.read_text())
    lg = doc["results"]["global"]["intervals"]["0.95"]
    ll = doc["results"]["local"]["intervals"]["0.95"]
    assert (ll[1] - ll[0]) < (lg[1] - lg[0])


def test_analyze_is_byte_identical_across_runs(tmp_path):
    out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
    args = (
        "analyze", "--input", FIXTURE, "--reference", "x1,x2",
        "--alternative", "x2,x3", "--B", 300, "--seed", 9, "--threads", 2,
    )
    assert _run(*args, "--output", out_a).exit_code == 0
    assert _run(*args, "--output", out_b).exit_code == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_analyze_identical_spaces_warns(tmp_path):
    out = tmp_path / "same.json"
    result = _run(
        "analyze", "--input", FIXTURE, "--reference", "x1,x2",
        "--alternative", "x1,x2", "--B", 200, "--output", out,
    )
    assert result.exit_code == 0
    doc = json.loads(out.read_text())
    assert "identical" in doc["warning"]
    assert doc["results"]["global"]["point"] == 0.0


def test_analyze_unknown_response_column_exits_2():
    result = _run(
        "analyze", "--input", FIXTURE, "--response", "outcome",
        "--reference", "x1", "--alternative", "x2",
    )
    assert result.exit_code == 2
    assert "outcome" in result.output


def test_analyze_rejects_tiny_b():
    result = _run(
        "analyze", "--input", FIXTURE, "--reference", "x1",
        "--alternative", "x2", "--B", 50,
    )
    assert result.exit_code == 2
    assert "B >= 100" in result.output


def test_analyze_figures_written(tmp_path):
    figs = tmp_path / "figs"
    result = _run(
        "analyze", "--input", FIXTURE, "--reference", "x1,x2",
        "--alternative", "x2,x3", "--B", 200, "--output", tmp_path / "r.json",
        "--figures", figs,
    )
    assert result.exit_code == 0, result.output
    assert (figs / "evidence_densities.png").stat().st_size > 0


def test_simulate_outputs_and_bad_case(tmp_path):
    csv_path, json_path = tmp_path / "cov.csv", tmp_path / "cov.json"
    result = _run(
        "simulate", "--case", 4, "--n", 40, "--trials", 3, "--B", 200,
        "--csv", csv_path, "--json", json_path,
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(json_path.read_text())
    assert set(doc["cells"]) == {"global:0.95", "global:0.9", "local:0.95", "local:0.9"}
    header = csv_path.read_text().splitlines()[0]
    assert header.startswith("schema_version,case,n,trials,B,seed,kind,level,coverage")

    bad = _run("simulate", "--case", 15, "--trials", 2, "--B", 200)
    assert bad.exit_code == 2
    assert "case must be 1..14" in bad.output


def test_ratio_sweep_outputs(tmp_path):
    json_path = tmp_path / "ratios.json"
    result = _run(
        "ratio-sweep", "--case", 4, "--n", 30, "--n", 60, "--trials", 3,
        "--B", 200, "--csv", tmp_path / "ratios.csv", "--json", json_path,
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(json_path.read_text())
    assert set(doc["summary"]) == {"30", "60"}
    assert doc["summary"]["30"]["trials"] == 3


def test_security_outputs(tmp_path):
    json_path = tmp_path / "sec.json"
    result = _run(
        "security", "--n", 50, "--trials", 4, "--B", 200,
        "--csv", tmp_path / "sec.csv", "--json", json_path,
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(json_path.read_text())
    assert doc["true_sign"] in (-1, 1)
    for kind in ("global", "local"):
        assert sum(doc["proportions"][kind].values()) == pytest.approx(1.0)


def test_lp_reports_point_estimate(tmp_path):
    json_path = tmp_path / "lp.json"
    result = _run(
        "lp", "--m", 221, "--n2", 131, "--x", 116, "--B", 10_000,
        "--csv", tmp_path / "lp.csv", "--json", json_path,
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(json_path.read_text())
    assert doc["estimate"] == 249
    assert doc["capture_prob"] == pytest.approx(0.5261044, abs=5e-7)
    widths = {
        s: doc["intervals"][s]["upper"] - doc["intervals"][s]["lower"]
        for s in ("both_fixed", "m_fixed", "none_fixed")
    }
    assert widths["both_fixed"] < widths["m_fixed"] < widths["none_fixed"]


def test_lp_zero_recaptures_exits_3(tmp_path):
    result = _run(
        "lp", "--m", 10, "--n2", 10, "--x", 0,
        "--csv", tmp_path / "lp.csv", "--json", tmp_path / "lp.json",
    )
    assert result.exit_code == 3


def test_profile_normal_family(tmp_path):
    rng = np.random.default_rng(1)
    sample_csv = tmp_path / "sample.csv"
    lines = ["y"] + [repr(float(v)) for v in rng.normal(5.0, 2.0, 20)]
    sample_csv.write_text("\n".join(lines) + "\n")
    json_path = tmp_path / "profile.json"
    result = _run(
        "profile", "--input", sample_csv, "--B", 300, "--points", 11,
        "--csv", tmp_path / "profile.csv", "--json", json_path,
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(json_path.read_text())
    assert doc["gamma_hat"] == pytest.approx(5.0, abs=2.0)
    # with mean and variance both unknown, the implied divisor falls below n
    assert doc["implied_variance_divisor"] < 20.0
    rows = (tmp_path / "profile.csv").read_text().splitlines()
    assert rows[0] == "gamma,profile,adjusted,et_adjusted"
    assert len(rows) == 12


def test_profile_regression_requires_covariate(tmp_path):
    result = _run(
        "profile", "--family", "regression", "--input", FIXTURE,
        "--csv", tmp_path / "p.csv", "--json", tmp_path / "p.json",
    )
    assert result.exit_code == 2
    assert "covariate" in result.output
