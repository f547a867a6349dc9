import json
import math
import subprocess
import sys

import pytest

from ccarray.cli import EXIT_IO, EXIT_PARAM, EXIT_USAGE, glue_negative_values, main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_reflect_lambda_sweep_command(capsys):
    code, out, _ = run(["reflect", "--mode", "single", "--k", "pi/2", "--lambda-sweep", "-1:3:401"], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("schema_version,swept_variable")
    assert len(lines) == 402


def test_reflect_k_list_and_k_sweep(capsys):
    code, out, _ = run(["reflect", "--k", "0.01,pi/8,pi/4,pi/2", "--lambda-sweep=-1:3:5"], capsys)
    assert code == 0 and len(out.strip().split("\n")) == 1 + 4 * 5
    code, out, _ = run(["reflect", "--mode", "double", "--k-sweep", "0:pi:9", "--lambda", "0.2", "--d", "5"], capsys)
    assert code == 0 and len(out.strip().split("\n")) == 10


def test_double_bound_command(capsys):
    code, out, _ = run(["bound", "--mode", "double", "--lambda0", "-0.2", "--d", "5"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    decays = sorted(s["decay"] for s in doc["states"])
    assert abs(decays[0] - 2.998) < 1e-3 and abs(decays[1] - decays[0]) < 1e-6
    assert {s["parity"] for s in doc["states"]} == {"odd", "even"}


def test_resonant_odd_command(capsys):
    code, out, _ = run(["resonant", "--d", "5", "--m", "2", "--parity", "odd"], capsys)
    st = json.loads(out)["states"][0]
    assert code == 0 and abs(st["x"] - 2 * math.pi / 5) < 1e-15
    assert all(p["prob"] == 0 for p in st["profile"] if abs(p["j"]) >= 5)


def test_band_pole_command(capsys):
    code, out, _ = run(["bound", "--mode", "band-pole", "--lambda", "0.2", "--samples", "11", "--format", "csv"], capsys)
    rows = [line.split(",") for line in out.strip().split("\n")[1:]]
    roots = [float(r[2]) for r in rows if r[1] == "root"]
    assert code == 0 and sum(r > 1.02 for r in roots) == 1


def test_oracle_commands(capsys):
    code, out, _ = run(["oracle", "spectrum", "--mode", "double", "--lambda0", "-0.2"], capsys)
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(["oracle", "packet", "--lambda", "0.1"], capsys)
    doc = json.loads(out)
    assert code == 0 and abs(doc["T_measured"] - doc["T_stationary"]) < 0.02


def test_hardware_commands(capsys):
    code, out, _ = run(["hardware", "detuning"], capsys)
    doc = json.loads(out)
    assert code == 0 and (doc["lambda_min"], doc["lambda_max"]) == (0.0, 0.2)
    code, out, _ = run(["hardware", "detuning", "--omega-ref", "2pi*4.8GHz"], capsys)
    assert json.loads(out)["lambda_exact"] == ["-1/6", "0"]
    code, out, _ = run(["hardware", "dispersion", "--flux-sweep", "0:0.45:4"], capsys)
    assert code == 0 and out.startswith("schema_version,flux_quanta,f,ej_f,load,u1")
    code, out, _ = run(["hardware", "inductance", "--flux-sweep", "0:0.4:3"], capsys)
    assert code == 0 and len(out.strip().split("\n")) == 1 + 3 * 3


def test_outputs_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["bound", "--mode", "double", "--lambda0", "-0.2", "-o", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("CCARRAY_OUTPUT_DIR", str(tmp_path))
    assert main(["reflect", "-o", "sweep.csv"]) == 0
    assert (tmp_path / "sweep.csv").read_text().startswith("schema_version")


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# double-cavity slice\nmode = double\nk = 0.2pi\nlambda-sweep = -0.2:0.2:5\nd = 5\n")
    code, out, _ = run(["--config", str(cfg), "reflect"], capsys)
    assert code == 0 and len(out.strip().split("\n")) == 6
    code, out, _ = run(["--config", str(cfg), "reflect", "--lambda-sweep", "0:0.2:3"], capsys)
    assert len(out.strip().split("\n")) == 4


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(["--config", str(cfg), "reflect"], capsys)
    assert code == EXIT_USAGE and json.loads(err)["error"] == "usage"


def test_unknown_flag(capsys):
    code, _, _ = run(["reflect", "--bogus"], capsys)
    assert code == EXIT_USAGE


@pytest.mark.parametrize(
    "args",
    [["reflect", "--lambda-sweep", "3:1:5"], ["bound", "--lambda", "0"], ["resonant", "--m", "5", "--d", "5"],
     ["hardware", "inductance", "--flux-sweep", "0:0.5:3"], ["bound", "--mode", "band-pole", "--n", "20"]],
)
def test_invalid_parameters(args, capsys):
    code, _, err = run(args, capsys)
    assert code == EXIT_PARAM
    assert json.loads(err)["exit_code"] == EXIT_PARAM


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run(["reflect", "-o", str(tmp_path / "missing" / "x.csv")], capsys)
    assert code == EXIT_IO and json.loads(err)["error"] == "output"


def test_glue_negative_values():
    assert glue_negative_values(["--lambda0", "-0.2", "-o", "x"]) == ["--lambda0=-0.2", "-o", "x"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ccarray", "hardware", "detuning"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["lambda_max"] == 0.2
