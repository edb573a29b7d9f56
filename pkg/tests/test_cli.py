import json

import pytest

from optocausal.cli import main
from optocausal.errors import ValidationError
from optocausal.io import build_run_config, fmt, load_config_mapping


def test_fig2_writes_artifacts(tmp_path):
    out = tmp_path / "results"
    assert main(["fig2", "--out", str(out), "--grid-points", "21"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["fig2a.csv", "fig2b.csv", "report.json"]
    header = (out / "fig2a.csv").read_text().splitlines()[0]
    assert header == "g,re_root1,im_root1,re_root2,im_root2,re_root3,im_root3,max_imag,verdict"
    assert (out / "fig2b.csv").read_text().splitlines()[0] == "g,theta_opt,e_n,dgcz,stable"
    rep = json.loads((out / "report.json").read_text())
    assert {"g_crt_cls", "g_crt_ncls", "g_formula", "ratio", "rwa_note", "params"} <= set(rep)


def test_missing_config_is_validation_error(tmp_path, capsys):
    assert main(["roots", "--config", str(tmp_path / "nope.toml")]) == 2
    assert "not found" in capsys.readouterr().err


def test_bad_value_exit_code(tmp_path):
    assert main(["steady", "--gamma-c", "-1", "--out", str(tmp_path)]) == 2


def test_numerical_failure_exit_code(tmp_path):
    # explicit window whose edge cuts through the mechanical resonance
    assert main(["kernel", "--g", "1e-3", "--window", "0", "1.0000001", "--out", str(tmp_path)]) == 3


def test_red_side_critical_has_null_onset(tmp_path):
    assert main(["critical", "--delta", "-1", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["nonclassical_onset"] is None
    assert rep["g_crt_cls"] == pytest.approx(4.47e-4, rel=0.1)


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('gamma_m = 1e-6\ngamma_c = 0.1\nsidedness = "two_sided"\ndelta = 1.0\n'
                   'g_mag = 2e-3\ntheta = 0.0\ngrid_min = 0.0\ngrid_max = 0.01\n'
                   f'grid_points = 11\nout_dir = "{tmp_path / "o"}"\n')
    assert main(["roots", "--config", str(cfg)]) == 0
    assert len((tmp_path / "o" / "roots.csv").read_text().splitlines()) == 12
    assert main(["en", "--config", str(cfg), "--g", "5e-3"]) == 0
    doc = json.loads((tmp_path / "o" / "en.json").read_text())
    assert doc["g"] == 5e-3 and doc["stable"]


@pytest.mark.parametrize("cmd", [
    ["response", "--g", "3e-3", "--dp-points", "21"],
    ["kernel", "--g", "2e-3", "--samples", "4096"],
    ["steady", "--g", "3e-3", "--method", "integral"],
    ["en", "--g", "3e-3", "--fixed-theta"],
    ["sweep", "--grid-points", "5"],
])
def test_subcommands_succeed(tmp_path, cmd):
    assert main(cmd + ["--out", str(tmp_path)]) == 0


def test_json_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"gamma_m": 2e-6, "delta": -1.0, "grid_points": 3}))
    cfg = build_run_config(load_config_mapping(p))
    assert cfg.params.gamma_m == 2e-6 and cfg.grid_points == 3


def test_config_rejects_unknown_keys(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("gama_m = 1e-6\n")
    with pytest.raises(ValidationError):
        load_config_mapping(p)


def test_bad_grid():
    with pytest.raises(ValidationError):
        build_run_config({"grid_min": 0.1, "grid_max": 0.05})


def test_number_format_round_trips():
    x = 0.1 + 0.2
    assert float(fmt(x)) == x
    assert fmt(True) == "true" and fmt(float("nan")) == "nan"
