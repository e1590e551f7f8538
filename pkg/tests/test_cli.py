import os

import pytest

import secrate.cli as cli
import secrate.optimizer as opt
from secrate.errors import ConfigError

BASE_CFG = """\
# antenna-sweep scenario at N=6
n_antennas=6
k_passive=1
m_active=1
var_ab_db=10
var_aea_db=3
var_aek_db=3
var_eab_db=3
var_jb_db=2
var_jea_db=7
var_jek_db=7
p_max_db=40
p_ea_db=10
r_b=8
delta=0.1
epsilon=0.01
"""


def _write(tmp_path, text, name="scenario.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_config_values_and_db():
    cfg = cli.parse_config("r_b = 8\nvar_ab_db=10 # comment\n\n# full line\ntheta=0.25\n")
    assert cfg == {"r_b": 8.0, "var_ab": 10.0, "theta": 0.25}


def test_parse_config_errors_name_key_and_line():
    with pytest.raises(ConfigError, match="line 2.*'bogus_key'"):
        cli.parse_config("r_b=8\nbogus_key=3\n")
    with pytest.raises(ConfigError, match="line 1.*integer"):
        cli.parse_config("n_antennas=4.5\n")
    with pytest.raises(ConfigError, match="line 3.*duplicate"):
        cli.parse_config("r_b=8\nvar_ab=1\nr_b=9\n")
    with pytest.raises(ConfigError, match="line 1.*key=value"):
        cli.parse_config("what even is this\n")


def test_missing_required_key_exits_2(tmp_path, capsys):
    path = _write(tmp_path, "n_antennas=6\nr_b=8\n")
    code, out, err = _run(["eval", "--config", path], capsys)
    assert code == 2
    assert "missing required" in err


def test_eval_deterministic_and_matches_library(tmp_path, capsys):
    path = _write(tmp_path, BASE_CFG + "p_a=242\ntheta=0.3\nr_s=4\n")
    code1, out1, _ = _run(["eval", "--config", path], capsys)
    code2, out2, _ = _run(["eval", "--config", path], capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    header, row = out1.strip().split("\n")
    assert header.split(",") == cli.EVAL_HEADER
    values = dict(zip(header.split(","), row.split(",")))
    assert float(values["p_a"]) == 242.0
    cfg = cli.load_config(path)
    params = cli.build_params(cfg)
    import secrate.closedform as cf
    from secrate.model import make_split
    split = make_split(params, 242.0, 0.3)
    assert float(values["p_so1"]) == pytest.approx(
        float(cf.sop_active(params, split, 4.0)), rel=1e-11)
    assert float(values["p_so2"]) == pytest.approx(
        float(cf.sop_passive(params, split, 4.0)), rel=1e-11)


def test_optimize_matches_library_row(tmp_path, capsys):
    path = _write(tmp_path, BASE_CFG)
    code, out, _ = _run(["optimize", "--config", path,
                         "--pa-mode", "noise_limited"], capsys)
    assert code == 0
    cfg = cli.load_config(path)
    params = cli.build_params(cfg)
    result = opt.maximize_for(params, pa_mode="noise_limited")
    expected = cli._csv(cli.OPTIMIZE_HEADER,
                        [[result.feasible, result.r_s_star, result.theta_star,
                          result.p_a_star, result.steps, result.infeasibility_reason]])
    assert out == expected


def test_optimize_infeasible_exit_3(tmp_path, capsys):
    text = BASE_CFG.replace("delta=0.1", "delta=0.000001").replace(
        "p_max_db=40", "p_max_db=20")
    path = _write(tmp_path, text)
    code, out, _ = _run(["optimize", "--config", path,
                         "--pa-mode", "noise_limited"], capsys)
    assert code == 3
    assert "PA_EXCEEDS_PMAX" in out


def test_optimize_pa_mode_changes_power(tmp_path, capsys):
    path = _write(tmp_path, BASE_CFG)
    rows = {}
    for mode in ("noise_limited", "interference_limited"):
        code, out, _ = _run(["optimize", "--config", path, "--pa-mode", mode], capsys)
        assert code == 0
        rows[mode] = out.strip().split("\n")[1].split(",")
    p_a_col = cli.OPTIMIZE_HEADER.index("p_a_star")
    assert rows["noise_limited"][p_a_col] != rows["interference_limited"][p_a_col]


def test_sweep_output_shape_and_order(tmp_path, capsys):
    text = BASE_CFG + "axis=n_antennas\nvalues=4,6,8\noverlay=epsilon:0.1,0.01\n"
    path = _write(tmp_path, text)
    code, out, _ = _run(["sweep", "--config", path, "--pa-mode", "noise_limited"],
                        capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].split(",") == cli.SWEEP_HEADER
    assert len(lines) == 1 + 3 * 2
    firsts = [line.split(",")[1] for line in lines[1:4]]
    assert firsts == ["4", "6", "8"]
    overlay_vals = [line.split(",")[3] for line in lines[1:]]
    assert overlay_vals == ["0.1"] * 3 + ["0.01"] * 3


def test_sweep_requires_sorted_values(tmp_path, capsys):
    path = _write(tmp_path, BASE_CFG + "axis=n_antennas\nvalues=6,4\n")
    code, _, err = _run(["sweep", "--config", path], capsys)
    assert code == 2
    assert "sorted" in err


def test_verify_exit_codes_and_seed_env(tmp_path, capsys, monkeypatch):
    path = _write(tmp_path, BASE_CFG + "p_a=242\ntheta=0.3\nr_s=6.5\n")
    code, out1, _ = _run(["verify", "--config", path, "--trials", "20000",
                          "--seed", "5"], capsys)
    assert code == 0
    assert out1.startswith(",".join(cli.VERIFY_HEADER))
    monkeypatch.setenv("SECRATE_SEED", "5")
    code, out2, _ = _run(["verify", "--config", path, "--trials", "20000",
                          "--seed", "12345"], capsys)
    assert code == 0
    assert out2 == out1  # env seed overrides the flag
    monkeypatch.delenv("SECRATE_SEED")
    monkeypatch.setenv("SECRATE_CORRUPT", "sop_passive")
    code, out3, _ = _run(["verify", "--config", path, "--trials", "20000",
                          "--seed", "5"], capsys)
    assert code == 4
    assert "false" in out3


def test_verify_trial_floor(tmp_path, capsys):
    path = _write(tmp_path, BASE_CFG)
    code, _, err = _run(["verify", "--config", path, "--trials", "500"], capsys)
    assert code == 2
    assert "10000" in err


def test_out_file_written_with_lf(tmp_path, capsys):
    path = _write(tmp_path, BASE_CFG + "p_a=242\ntheta=0.3\nr_s=4\n")
    out_path = tmp_path / "result.csv"
    code, stdout, _ = _run(["eval", "--config", path, "--out", str(out_path)], capsys)
    assert code == 0
    assert stdout == ""
    data = out_path.read_bytes()
    assert b"\r" not in data
    assert data.endswith(b"\n")


def test_eval_default_theta_sits_at_passive_stationary_point(capsys):
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    code, out, _ = _run(["eval", "--config",
                         os.path.join(here, "configs", "sweep_active_gain_bob_estimate.cfg")], capsys)
    assert code == 0
    header, row = out.strip().split("\n")
    values = dict(zip(header.split(","), row.split(",")))
    assert float(values["theta"]) == 0.2  # 1/(N-1) default at N=6
    assert abs(float(values["dsop_passive_dtheta"])) <= 1e-9


def test_shipped_figure_configs_parse():
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    for name in ("sweep_antennas", "sweep_passive_gain_targets", "sweep_bob_estimate",
                 "sweep_active_gain_bob_estimate", "sweep_passive_gain_estimates",
                 "sweep_active_gain_estimates", "sweep_an_ratio_passive_gain"):
        cfg = cli.load_config(os.path.join(here, "configs", f"{name}.cfg"))
        params = cli.build_params(cfg)
        assert params.r_b == 8.0
        assert "axis" in cfg and "values" in cfg
        values = cli._parse_values(cfg["values"], "values")
        assert values == sorted(values)
