import json
import subprocess
import sys

import pytest

from casimir_spectra.cli import main
from casimir_spectra.config import (
    ConfigError,
    RunConfig,
    load_presets,
    parse_frequency,
    parse_gaps,
    parse_length,
    read_config_file,
)
from casimir_spectra.materials import Model, ev_to_angular_frequency
from casimir_spectra.output import fmt, to_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---- config -----------------------------------------------------------------

def test_parse_length_units():
    assert parse_length("162nm") == pytest.approx(162e-9)
    assert parse_length("1.5 um") == pytest.approx(1.5e-6)
    assert parse_length("2e-7") == 2e-7
    with pytest.raises(ConfigError) as info:
        parse_length("3 furlongs")
    assert info.value.field == "gap"


def test_parse_frequency():
    assert parse_frequency("9eV", "omega_p") == ev_to_angular_frequency(9.0)
    assert parse_frequency("5.32e13rad/s", "nu") == 5.32e13
    with pytest.raises(ConfigError):
        parse_frequency("3 Hz", "nu")


def test_parse_gaps():
    assert parse_gaps("162nm,400nm") == pytest.approx((162e-9, 400e-9))
    g = parse_gaps("100nm..500nm", 5)
    assert g == pytest.approx((100e-9, 200e-9, 300e-9, 400e-9, 500e-9))
    for bad in ("400nm,162nm", "500nm..100nm", "-5nm"):
        with pytest.raises(ConfigError):
            parse_gaps(bad)


def test_presets():
    p = load_presets()
    assert set(p) >= {"Au-paper", "Au-low-loss", "Au-plasma"}
    assert p["Au-paper"].relaxation == 5.32e13
    assert p["Au-low-loss"].relaxation == 1e10
    assert p["Au-plasma"].model is Model.PLASMA


def test_run_config_material_sources():
    with pytest.raises(ConfigError):
        RunConfig.from_raw({"gap": "162nm"})
    with pytest.raises(ConfigError):
        RunConfig.from_raw({"gap": "162nm", "preset": "Au-paper", "epsilon": "vacuum"})
    inline = RunConfig.from_raw({"gap": "162nm", "model": "drude", "omega_p": "9eV", "nu": "1e13"})
    assert inline.material.relaxation == 1e13
    with pytest.raises(ConfigError) as info:
        RunConfig.from_raw({"gap": "162nm", "preset": "Au-paper", "colour": "red"})
    assert info.value.field == "colour"


def test_config_file_formats(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("# comment\npreset = Au-paper\ngap = 162nm\nrel-tol = 1e-6\n")
    assert read_config_file(f) == {"preset": "Au-paper", "gap": "162nm", "rel_tol": "1e-6"}
    j = tmp_path / "run.json"
    j.write_text(json.dumps({"config": {"preset": "Au-paper", "gap": "400nm"}, "x": [1]}))
    assert read_config_file(j) == {"preset": "Au-paper", "gap": "400nm"}


def test_output_formatting():
    assert fmt(1.0) == "1.00000000000e+00"
    assert to_json({"a": [1.5, float("inf")], "b": True}) == '{\n  "a": [1.50000000000e+00, "inf"],\n  "b": true\n}'
    json.loads(to_json({"x": [0.1, 2], "y": {"z": None}}))


# ---- exit codes ---------------------------------------------------------------

@pytest.mark.parametrize("argv,field", [
    (["force", "--preset", "Au-paper", "--gap", "162 parsecs"], "gap"),
    (["force", "--preset", "Nope", "--gap", "162nm"], "preset"),
    (["force", "--gap", "162nm"], "preset"),
    (["force", "--preset", "Au-paper"], "gap"),
    (["force", "--preset", "Au-paper", "--gap", "162nm", "--temp=-3K"], "temp"),
    (["force", "--model", "drude", "--omega-p", "0eV", "--gap", "162nm"], "omega_p"),
    (["spectrum", "--preset", "Au-paper", "--gap", "162nm", "--fraction", "1.2"], "fraction"),
    (["spectrum", "--preset", "Au-paper", "--gap", "162nm,400nm"], "gap"),
    (["spectrum", "--preset", "Au-paper", "--gap", "162nm", "--var", "w"], "var"),
    (["applicability", "--preset", "Au-paper", "--gap", "162nm"], "radius"),
    (["applicability", "--preset", "Au-paper", "--gap", "200um", "--radius", "150um"], "gap"),
])
def test_input_errors_exit_1_and_name_field(capsys, argv, field):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == ""
    assert field in err


def test_negative_gap(capsys):
    code, _, err = run(capsys, "force", "--preset", "Au-paper", "--gap", "-5nm")
    assert code == 1 and "--gap" in err
    code, _, err = run(capsys, "force", "--preset", "Au-paper", "--gap=-5nm")
    assert code == 1 and "gap" in err


def test_gap_close_to_radius(capsys):
    code, out, _ = run(capsys, "applicability", "--preset", "Au-paper", "--radius", "1um", "--gap", "900nm")
    assert code == 0 and "l = 900 nm" in out
    code, _, err = run(capsys, "applicability", "--preset", "Au-paper", "--radius", "1um", "--gap", "1.2um")
    assert code == 1 and "gap" in err


def test_unknown_subcommand(capsys):
    code, _, _ = run(capsys, "wobble")
    assert code == 1


def test_help_exits_cleanly(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0 and "force" in out


def test_non_convergence_exit_2(capsys):
    code, out, _ = run(capsys, "force", "--preset", "Au-paper", "--gap", "162nm", "--temp", "1K",
                       "--verify", "--format", "csv")
    assert code == 2
    header, row = out.strip().splitlines()[-2:]
    assert dict(zip(header.split(","), row.split(",")))["oracle_converged"] == "false"


def test_lossless_spectrum_rejected(capsys):
    code, _, err = run(capsys, "spectrum", "--preset", "Au-plasma", "--gap", "162nm")
    assert code == 1 and "Drude" in err


# ---- commands -----------------------------------------------------------------

def test_force_pretty(capsys):
    code, out, _ = run(capsys, "force", "--preset", "Au-paper", "--gap", "162nm")
    assert code == 0
    for name in ("TM-propagating", "TM-evanescent", "TE-propagating", "TE-evanescent", "total"):
        assert name in out


def test_force_vacuum_zero(capsys):
    code, out, _ = run(capsys, "force", "--epsilon", "vacuum", "--gap", "162nm", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["results"][0]["total_Pa"] == 0.0


def test_force_plasma_warns(capsys):
    code, _, err = run(capsys, "force", "--preset", "Au-plasma", "--gap", "162nm")
    assert code == 0 and "warning" in err


def test_force_verify_json(capsys):
    code, out, _ = run(capsys, "force", "--preset", "Au-paper", "--gap", "162nm", "--verify",
                       "--format", "json")
    rec = json.loads(out)["results"][0]
    assert code == 0
    assert rec["oracle_relative_difference"] < 5e-3
    assert set(rec["channels"]) == {"TM-propagating", "TM-evanescent", "TE-propagating", "TE-evanescent"}


def test_spectrum_csv_schema(capsys):
    code, out, _ = run(capsys, "spectrum", "--preset", "Au-paper", "--gap", "162nm", "--grid", "20",
                       "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    assert lines[:len(meta)] == meta
    keys = {ln[2:].split("=", 1)[0] for ln in meta}
    assert {"range_equal_tail_lo", "range_equal_tail_hi", "range_minimal_width_lo",
            "range_minimal_width_hi", "normalization"} <= keys
    assert body[0] == "x,density,cumulative"
    rows = [list(map(float, ln.split(","))) for ln in body[1:]]
    assert all(len(r) == 3 for r in rows)
    assert rows[0][2] == 0.0 and rows[-1][2] == 1.0


def _range(out):
    meta = dict(ln[2:].split("=", 1) for ln in out.splitlines() if ln.startswith("#"))
    return float(meta["range_equal_tail_lo"]), float(meta["range_equal_tail_hi"])


def test_spectrum_grid_doubling_stable(capsys):
    base = ["spectrum", "--preset", "Au-paper", "--gap", "162nm", "--var", "v", "--format", "csv"]
    _, out10, _ = run(capsys, *base, "--grid", "10")
    _, out20, _ = run(capsys, *base, "--grid", "20")
    (a_lo, a_hi), (b_lo, b_hi) = _range(out10), _range(out20)
    assert b_lo == pytest.approx(a_lo, rel=0.01) and b_hi == pytest.approx(a_hi, rel=0.01)


@pytest.mark.parametrize("var", ["u", "omega", "k_perp"])
def test_spectrum_other_variables(capsys, var):
    code, out, _ = run(capsys, "spectrum", "--preset", "Au-paper", "--gap", "162nm", "--grid", "20",
                       "--var", var, "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["metadata"]["variable"] == var
    assert len(doc["x"]) == len(doc["density"]) == len(doc["cumulative"])


def test_json_round_trip(capsys, tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    code, _, _ = run(capsys, "spectrum", "--preset", "Au-paper", "--gap", "162nm", "--grid", "15",
                     "--format", "json", "-o", str(first))
    assert code == 0
    code, _, _ = run(capsys, "spectrum", "--config", str(first), "-o", str(second))
    assert code == 0
    assert first.read_bytes() == second.read_bytes()


def test_command_line_overrides_config(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("preset = Au-paper\ngap = 162nm\nradius = 150um\nformat = json\n")
    code, out, _ = run(capsys, "applicability", "--config", str(cfg), "--gap", "400nm")
    assert code == 0
    assert json.loads(out)["reports"][0]["l"] == pytest.approx(400e-9)


def test_applicability_sweep(capsys):
    code, out, _ = run(capsys, "applicability", "--preset", "Au-paper", "--radius", "150um",
                       "--gap", "162nm..750nm")
    assert code == 0
    verdicts = [ln for ln in out.splitlines() if ln.startswith("l = ")]
    assert len(verdicts) == 5
    assert all("-> applicable" in ln for ln in verdicts)
    assert "30.4 um" in out and "35.41 um" in out


def test_deterministic_output_across_threads(tmp_path):
    outputs = []
    for threads in ("1", "3"):
        env = {"CASIMIR_SPECTRA_THREADS": threads, "PATH": "/usr/bin:/bin"}
        res = subprocess.run([sys.executable, "-m", "casimir_spectra", "force", "--preset", "Au-paper",
                              "--gap", "162nm,400nm,750nm", "--format", "csv", "--rel-tol", "1e-5"],
                             capture_output=True, env=env, check=True)
        outputs.append(res.stdout)
    assert outputs[0] == outputs[1]
