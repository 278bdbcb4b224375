import json


from hotloop.cli import main


def test_validate_default(capsys):
    assert main(["validate"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["tank"]["mass"] == 800.0


def test_validate_errors(tmp_path, capsys):
    assert main(["validate", "--set", "circuits.rack_flow=-1"]) == 2
    assert "circuits.rack_flow" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text('{"chiller": {"unknown_knob": 1}}')
    assert main(["validate", "--config", str(bad)]) == 2
    assert "chiller.unknown_knob" in capsys.readouterr().err
    bad.write_text("{broken")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert main(["validate", "--config", str(tmp_path / "missing.json")]) == 2


def test_equilibrate_exit_codes(capsys):
    assert main(["equilibrate"]) == 0
    assert "T_eq" in capsys.readouterr().out
    assert main(["equilibrate", "--set", "chiller.capacity_scale=0.2"]) == 4
    assert "runaway" in capsys.readouterr().out
    assert main(["equilibrate", "--set", "site.load_fraction=0"]) == 4
    assert "subcritical" in capsys.readouterr().out


def test_run_writes_files(tmp_path):
    out = tmp_path / "run"
    assert main(["run", "--out", str(out), "--duration", "600", "--dt", "2"]) == 0
    assert {p.name for p in out.iterdir()} == {"timeseries_true.csv", "timeseries_noisy.csv", "run.json"}
    summary = json.loads((out / "run.json").read_text())
    assert summary["samples"] == 300 and summary["max_audit_residual"] < 1e-6
    before = (out / "timeseries_true.csv").read_bytes()
    assert main(["run", "--out", str(out), "--duration", "20"]) == 5
    assert (out / "timeseries_true.csv").read_bytes() == before
    assert main(["run", "--out", str(out), "--duration", "20", "--force"]) == 0


def test_run_scenario_central_support(tmp_path):
    from hotloop.telemetry import read_timeseries

    sc = tmp_path / "sc.json"
    sc.write_text('[{"at": 3600, "action": "disable_chiller"}]')
    out = tmp_path / "o"
    assert main(["run", "--out", str(out), "--duration", "7200", "--dt", "5",
                 "--scenario", str(sc)]) == 0
    ts = read_timeseries((out / "timeseries_true.csv").read_bytes())
    q, tp = ts["q_central_W"], ts["t_primary_C"]
    assert q[-1] > 0.0
    # support engages only once the primary supply is above 20 degC
    assert all(tp[i - 1] > 20.0 for i in range(1, len(q)) if q[i] > 0.0)


def test_audit_failure_exit(monkeypatch, tmp_path):
    import hotloop.cli as cli

    monkeypatch.setattr(cli, "AUDIT_TOL", 0.0)
    assert cli.main(["run", "--out", str(tmp_path), "--duration", "10"]) == 3


def test_sweep_and_env_outdir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HOTLOOP_OUT", str(tmp_path / "env"))
    assert main(["sweep", "--setpoints", "50:70:5"]) == 0
    lines = (tmp_path / "env" / "sweep.csv").read_text().splitlines()
    assert len(lines) == 6
    hiw = [float(l.split(",")[8]) for l in lines[1:]]
    assert all(b < a for a, b in zip(hiw, hiw[1:]))
    assert main(["sweep", "--setpoints", "50,x"]) == 2


def test_reproduce_conflict(tmp_path):
    out = tmp_path / "b"
    assert main(["reproduce", "--out", str(out)]) == 0
    assert len(list(out.iterdir())) == 8
    assert main(["reproduce", "--out", str(out)]) == 5


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "hotloop", "equilibrate"], capture_output=True, text=True)
    assert r.returncode == 0 and "T_eq" in r.stdout
