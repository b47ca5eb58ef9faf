"""Command-line interface: schemas, subcommand output, config precedence,
and exit codes."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

import _closed_forms as cf
from rumorbd.cli import main
from rumorbd import growth


def _run(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def _rows(out):
    """Parse `# schema` CSV text into (schema_line, header, list-of-row-lists)."""
    lines = out.strip().splitlines()
    return lines[0], lines[1].split(","), [ln.split(",") for ln in lines[2:]]


def _write_logistic_csv(path, n_points=40, horizon=8.0):
    curve = growth.Logistic(c=10.0, r=1.2, j=1, rho=2.0)
    t = np.linspace(0.0, horizon, n_points)
    lines = ["t,count"] + [f"{ti},{yi}" for ti, yi in zip(t, curve.mean_array(t))]
    path.write_text("\n".join(lines) + "\n")
    return curve


# ===== moments =================================================================


def test_moments_schema_and_closed_values(capsys):
    rc, out, err = _run(
        capsys, ["moments", "--rates", "constant:1,1", "--j", "1", "--grid", "0:5:100"]
    )
    assert rc == 0 and err == ""
    schema, header, rows = _rows(out)
    assert schema == "# schema: rumorbd.moments.v1"
    assert header == [
        "t", "m_x", "var_x", "m_y", "var_y", "m2_y", "m_xy", "cov", "corr",
        "fano_x", "fano_y", "cv_x", "cv_y", "r_index",
    ]
    assert len(rows) == 100  # half-open grid: endpoint excluded
    assert float(rows[-1][0]) == pytest.approx(4.95)
    at_one = next(r for r in rows if abs(float(r[0]) - 1.0) < 1e-12)
    assert float(at_one[9]) == pytest.approx(2.0, rel=1e-9)  # critical Fano factor
    assert float(at_one[1]) == pytest.approx(cf.mean_x(1, 1, 1, 1.0), rel=1e-9)
    assert float(at_one[4]) == pytest.approx(cf.var_y(1, 1, 1, 1.0), rel=1e-9)


def test_moments_requires_rates(capsys):
    rc, out, err = _run(capsys, ["moments", "--j", "1", "--grid", "0:1:4"])
    assert rc == 4
    assert "rates" in err


# ===== absorb ==================================================================


def test_absorb_matches_closed_absorption(capsys):
    rc, out, err = _run(
        capsys, ["absorb", "--rates", "constant:2,1", "--j", "3", "--grid", "0:20:50"]
    )
    assert rc == 0
    schema, header, rows = _rows(out)
    assert schema == "# schema: rumorbd.absorb.v1"
    assert header == ["t", "absorption_prob"]
    assert len(rows) == 50
    assert float(rows[0][1]) == 0.0
    t_last = float(rows[-1][0])
    assert float(rows[-1][1]) == pytest.approx(cf.absorption(2, 1, 3, t_last), rel=1e-9)
    assert float(rows[-1][1]) == pytest.approx(0.125, abs=1e-6)  # (mu/lam)^j


# ===== simulate ================================================================


def test_simulate_ensemble_csv(capsys):
    argv = [
        "simulate", "--rates", "constant:1,1", "--j", "2", "--horizon", "1",
        "--replicates", "300", "--seed", "3", "--grid", "0:1:4",
    ]
    rc, out, err = _run(capsys, argv)
    assert rc == 0
    schema, header, rows = _rows(out)
    assert schema == "# schema: rumorbd.ensemble.v1"
    assert header == [
        "t", "mean_x", "var_x", "mean_y", "var_y", "cov", "corr",
        "absorbed_frac", "se_x", "se_y", "cap_frac",
    ]
    assert len(rows) == 4
    first = [float(v) for v in rows[0]]
    assert first[0] == 0.0 and first[1] == 2.0 and first[2] == 0.0
    assert first[7] == 0.0 and first[10] == 0.0
    assert math.isnan(first[6])  # zero variance at t = 0: correlation undefined
    # deterministic: a second identical invocation prints identical bytes
    rc2, out2, _ = _run(capsys, argv)
    assert rc2 == 0 and out2 == out


def test_simulate_trajectory_csv(capsys):
    rc, out, err = _run(
        capsys,
        ["simulate", "--trajectory", "--rates", "constant:1.2,0.8", "--j", "2",
         "--horizon", "2", "--seed", "1"],
    )
    assert rc == 0
    schema, header, rows = _rows(out)
    assert schema == "# schema: rumorbd.trajectory.v1"
    assert header == ["time", "event", "n", "k"]
    n, k, prev_t = 2, 0, 0.0
    for row in rows:
        t, kind = float(row[0]), row[1]
        assert t > prev_t
        prev_t = t
        if kind == "spread":
            n += 1
        else:
            assert kind == "forget"
            n, k = n - 1, k + 1
        assert int(row[2]) == n and int(row[3]) == k


# ===== oracle ==================================================================


def test_oracle_probability_table(capsys):
    rc, out, err = _run(
        capsys,
        ["oracle", "--rates", "constant:1,2", "--j", "1", "--t", "0.5",
         "--n-max", "25", "--k-max", "25"],
    )
    assert rc == 0
    schema, header, rows = _rows(out)
    assert schema == "# schema: rumorbd.oracle.v1"
    assert header == ["n", "k", "p"]
    assert len(rows) == 26 * 26
    table = {(int(r[0]), int(r[1])): float(r[2]) for r in rows}
    assert sum(table.values()) == pytest.approx(1.0, abs=1e-4)
    assert table[(0, 1)] == pytest.approx(cf.p01(1, 2, 0.5), abs=1e-8)
    assert table[(1, 0)] > 0.1  # still alive with decent probability


def test_oracle_leak_failure_exits_3(capsys):
    rc, out, err = _run(
        capsys,
        ["oracle", "--rates", "constant:2,1", "--j", "1", "--t", "3",
         "--n-max", "8", "--k-max", "8"],
    )
    assert rc == 3
    assert "numeric failure" in err


# ===== fit and reconstruct-y ===================================================


def test_fit_writes_csv_and_json(tmp_path, capsys):
    data = tmp_path / "cascade.csv"
    _write_logistic_csv(data)
    prefix = tmp_path / "fitout"
    rc, out, err = _run(
        capsys,
        ["fit", "--data", str(data), "--families", "logistic,gompertz",
         "--budget", "800", "--restarts", "3", "--seed", "0",
         "--out", str(prefix)],
    )
    assert rc == 0
    csv_text = (tmp_path / "fitout.csv").read_text()
    schema, header, rows = _rows(csv_text)
    assert schema == "# schema: rumorbd.fit.v1"
    assert header == ["family", "objective", "value", "converged", "n_evals",
                      "restarts", "params"]
    assert [r[0] for r in rows] == ["logistic", "gompertz"]
    report = json.loads((tmp_path / "fitout.json").read_text())
    assert report["winner"] == "logistic"
    assert report["dataset"] == "cascade"
    logi = report["results"][0]
    assert logi["family"] == "logistic"
    assert logi["params"]["c"] == pytest.approx(10.0, rel=1e-4)
    assert logi["params"]["r"] == pytest.approx(1.2, rel=1e-4)
    assert logi["value"] < 1e-12


def test_fit_stdout_mode_emits_csv_then_json(tmp_path, capsys):
    data = tmp_path / "cascade.csv"
    _write_logistic_csv(data, n_points=25, horizon=6.0)
    rc, out, err = _run(
        capsys,
        ["fit", "--data", str(data), "--families", "logistic",
         "--budget", "400", "--restarts", "2"],
    )
    assert rc == 0
    assert out.startswith("# schema: rumorbd.fit.v1\n")
    report = json.loads(out[out.index("{"):])
    assert report["winner"] == "logistic"


def test_fit_missing_data_file_exits_4(tmp_path, capsys):
    rc, out, err = _run(capsys, ["fit", "--data", str(tmp_path / "absent.csv")])
    assert rc == 4
    assert "data error" in err


def test_reconstruct_y_csv(tmp_path, capsys):
    data = tmp_path / "cascade.csv"
    _write_logistic_csv(data)
    rc, out, err = _run(
        capsys,
        ["reconstruct-y", "--data", str(data), "--family", "logistic",
         "--rho-values", "2.0,1.5", "--grid", "0:5:10",
         "--budget", "600", "--restarts", "2"],
    )
    assert rc == 0
    schema, header, rows = _rows(out)
    assert schema == "# schema: rumorbd.reconstruction.v1"
    assert header == ["t", "rho", "m_y"]
    assert len(rows) == 20  # 2 rho values x 10 grid points
    by_rho_t = {(float(r[1]), float(r[0])): float(r[2]) for r in rows}
    assert by_rho_t[(2.0, 0.0)] == 0.0  # nothing forgotten at t = 0
    # rho = 1.5 scales the spreader gap by 1/(rho-1) = 2x relative to rho = 2
    t_probe = next(t for (rho, t) in by_rho_t if rho == 2.0 and t > 1.0)
    assert by_rho_t[(1.5, t_probe)] == pytest.approx(
        2.0 * by_rho_t[(2.0, t_probe)], rel=1e-9
    )


# ===== config file and precedence =============================================


def test_config_file_supplies_options_and_flags_win(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps(
        {"rates": {"kind": "constant", "lam": 1.0, "mu": 1.0},
         "j": 1, "grid": "0:2:4"}
    ))
    rc, out, _ = _run(capsys, ["moments", "--config", str(cfg)])
    assert rc == 0
    assert len(_rows(out)[2]) == 4  # grid from the config file
    rc, out, _ = _run(capsys, ["moments", "--config", str(cfg), "--grid", "0:2:8"])
    assert rc == 0
    assert len(_rows(out)[2]) == 8  # flag overrides the file


def test_config_file_must_be_a_json_object(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("[1, 2, 3]")
    rc, _, err = _run(capsys, ["moments", "--config", str(cfg), "--j", "1"])
    assert rc == 4
    cfg.write_text("{not json")
    rc, _, err = _run(capsys, ["moments", "--config", str(cfg), "--j", "1"])
    assert rc == 4


def test_output_file_mode_writes_schema_line(tmp_path, capsys):
    out_path = tmp_path / "mom.csv"
    rc, out, _ = _run(
        capsys,
        ["moments", "--rates", "constant:1,1", "--j", "1", "--grid", "0:1:4",
         "--out", str(out_path)],
    )
    assert rc == 0
    assert out == ""  # nothing on stdout when a file is requested
    assert out_path.read_text().startswith("# schema: rumorbd.moments.v1\n")


# ===== argument and domain failures ===========================================


@pytest.mark.parametrize(
    "argv,code",
    [
        (["moments", "--rates", "constant:1,1", "--j", "0", "--grid", "0:1:4"], 2),
        (["moments", "--rates", "constant:1,1", "--j", "1", "--grid", "5"], 4),
        (["moments", "--rates", "constant:1,1", "--j", "1", "--grid", "3:1:5"], 4),
        (["moments", "--rates", "constant:1,1", "--j", "1", "--grid", "0:1:1"], 4),
        (["moments", "--rates", "gibberish", "--j", "1", "--grid", "0:1:4"], 4),
        (["moments", "--rates", "constant:1", "--j", "1", "--grid", "0:1:4"], 4),
        (["simulate", "--rates", "constant:1,1", "--j", "1", "--horizon", "-2",
          "--grid", "0:1:4"], 2),
    ],
)
def test_exit_codes_for_bad_usage(capsys, argv, code):
    rc, out, err = _run(capsys, argv)
    assert rc == code
    assert err != ""


def test_installed_script_round_trip(tmp_path):
    """The console entry point wires argv and exit codes correctly."""
    res = subprocess.run(
        [sys.executable, "-m", "rumorbd.cli", "absorb", "--rates", "constant:1,1",
         "--j", "1", "--grid", "0:2:4"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0
    assert res.stdout.startswith("# schema: rumorbd.absorb.v1\n")
    res = subprocess.run(
        [sys.executable, "-m", "rumorbd.cli", "absorb", "--rates", "constant:1,1",
         "--j", "0", "--grid", "0:2:4"],
        capture_output=True, text=True,
    )
    assert res.returncode == 2
