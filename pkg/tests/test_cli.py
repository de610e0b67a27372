import subprocess
import sys

import pytest

from starce.channel import SystemConfig
from starce.cli import (
    ConfigError,
    DEFAULT_CONFIG_TEXT,
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_USAGE,
    load_config,
    parse_config_text,
    run_command,
)
from starce.simulator import CSV_HEADER


def write_config(tmp_path, name="conf.txt", **overrides):
    lines = []
    for line in DEFAULT_CONFIG_TEXT.splitlines():
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key = body.split("=", 1)[0].strip()
        if key in overrides:
            lines.append(f"{key} = {overrides.pop(key)}")
        else:
            lines.append(body)
    for key, value in overrides.items():
        lines.append(f"{key} = {value}")
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return str(path)


# ---------------------------------------------------------------- config parsing


def test_default_config_matches_dataclass_defaults():
    cfg = load_config("default")
    ref = SystemConfig()
    assert cfg.num_elements == ref.num_elements
    assert cfg.num_subsurfaces == ref.num_subsurfaces
    assert cfg.power_w == pytest.approx(ref.power_w, rel=1e-12)
    assert cfg.noise_power_w == pytest.approx(ref.noise_power_w, rel=1e-12)
    assert cfg.rician_k == pytest.approx(ref.rician_k, rel=1e-12)
    assert cfg.ref_pathloss == pytest.approx(ref.ref_pathloss, rel=1e-12)
    assert cfg.bs_pos_m == ref.bs_pos_m
    assert cfg.t_user_pos_m == ref.t_user_pos_m
    assert cfg.exponent_bs_ris == ref.exponent_bs_ris


def test_config_file_roundtrip(tmp_path):
    path = write_config(tmp_path, num_subsurfaces=10, power_dbm=20)
    cfg = load_config(path)
    assert cfg.num_subsurfaces == 10
    assert cfg.power_w == pytest.approx(0.1, rel=1e-12)


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_config_text(DEFAULT_CONFIG_TEXT + "bananas = 7\n")


def test_config_rejects_missing_key():
    text = "\n".join(
        line for line in DEFAULT_CONFIG_TEXT.splitlines() if not line.startswith("power_dbm")
    )
    with pytest.raises(ConfigError, match="missing keys: power_dbm"):
        parse_config_text(text)


def test_config_rejects_duplicate_key():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text(DEFAULT_CONFIG_TEXT + "power_dbm = 20\n")


def test_config_rejects_bad_number():
    with pytest.raises(ConfigError, match="cannot parse"):
        parse_config_text(DEFAULT_CONFIG_TEXT.replace("power_dbm = 30", "power_dbm = loud"))


def test_config_rejects_bad_pair():
    with pytest.raises(ConfigError, match="expected 'x,y'"):
        parse_config_text(DEFAULT_CONFIG_TEXT.replace("ris_pos_m = 50,0", "ris_pos_m = 50"))


def test_config_rejects_invariant_violation():
    with pytest.raises(ConfigError, match="invalid configuration"):
        parse_config_text(DEFAULT_CONFIG_TEXT.replace("num_subsurfaces = 20", "num_subsurfaces = 7"))


def test_config_missing_file():
    with pytest.raises(ConfigError, match="cannot read config"):
        load_config("/no/such/file.conf")


def test_config_comments_and_blanks_ignored():
    cfg = parse_config_text("# comment\n\n" + DEFAULT_CONFIG_TEXT)
    assert cfg.num_elements == 80


# ---------------------------------------------------------------- validate


def test_validate_default(capsys):
    code = run_command(["validate"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "validate: PASS" in out
    assert "ts: PASS" in out
    assert "es-ideal[dft]: PASS" in out
    assert "es-coupled[dft]: PASS" in out
    # 2M+2 = 42 is not a power of two at the default size
    assert "es-ideal[hadamard]: SKIP" in out
    assert "onoff: PASS" in out
    assert "two-phase: PASS" in out


def test_validate_power_of_two_order(tmp_path, capsys):
    path = write_config(tmp_path, num_elements=12, num_subsurfaces=3)
    code = run_command(["validate", "--config", path])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "es-ideal[hadamard]: PASS" in out
    assert "es-coupled[hadamard]: INFO infeasible as expected" in out
    assert "validate: PASS" in out


# ---------------------------------------------------------------- mse-table


def test_mse_table_reference_values(capsys):
    code = run_command(["mse-table"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "M=20" in out
    assert "2.000000e-14" in out  # ts
    assert "3.904762e-14" in out  # both ES variants
    assert "8.200000e-13" in out  # onoff
    assert "1.000000e-13" in out  # two-phase
    assert out.count("3.904762e-14") == 2


def test_mse_table_sigma2_override(capsys):
    code = run_command(["mse-table", "--sigma2", "0"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "0.000000e+00" in out


# ---------------------------------------------------------------- sweeps


def sweep_args(tmp_path, name, extra=()):
    out = tmp_path / name
    return [
        "--out", str(out), "--trials", "2", "--seed", "1",
        "--grid-start", "30", "--grid-stop", "30", "--grid-step", "5",
        *extra,
    ], out


def test_sweep_power_writes_csv(tmp_path, capsys):
    args, out = sweep_args(tmp_path, "p.csv", ("--schemes", "ts,es-coupled"))
    code = run_command(["sweep-power", *args])
    stdout = capsys.readouterr().out
    assert code == EXIT_OK
    assert f"wrote 2 rows to {out}" in stdout
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    assert lines[1].startswith("power_dbm,30.0,ts,")


def test_sweep_power_noiseless_nmse(tmp_path):
    args, out = sweep_args(tmp_path, "n.csv", ("--schemes", "ts,es-ideal,es-coupled"))
    code = run_command(["sweep-power", *args, "--sigma2", "0", "--trials", "1"])
    assert code == EXIT_OK
    for line in out.read_text().splitlines()[1:]:
        nmse = float(line.split(",")[3])
        assert nmse <= 1e-18


def test_sweep_csv_bytes_identical_on_rerun(tmp_path):
    argv = [
        "sweep-m", "--trials", "5", "--seed", "3",
        "--grid-start", "2", "--grid-stop", "4", "--grid-step", "2",
        "--schemes", "ts,onoff",
        "--config", write_config(tmp_path, num_elements=8, num_subsurfaces=4),
    ]
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run_command(argv + ["--out", str(a)]) == EXIT_OK
    assert run_command(argv + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_sweep_beta_default_grid_size(tmp_path, capsys):
    path = write_config(tmp_path, num_elements=8, num_subsurfaces=2)
    out = tmp_path / "beta.csv"
    code = run_command([
        "sweep-beta", "--config", path, "--trials", "2", "--seed", "1", "--out", str(out),
    ])
    stdout = capsys.readouterr().out
    assert code == EXIT_OK
    # 19 default grid points times 5 rows each
    assert "wrote 95 rows" in stdout
    assert len(out.read_text().splitlines()) == 96


def test_sweep_m_grid(tmp_path, capsys):
    path = write_config(tmp_path, num_elements=8, num_subsurfaces=2)
    out = tmp_path / "m.csv"
    code = run_command([
        "sweep-m", "--config", path, "--trials", "2", "--seed", "1",
        "--grid-start", "2", "--grid-stop", "6", "--grid-step", "2",
        "--schemes", "ts", "--out", str(out),
    ])
    assert code == EXIT_OK
    values = [float(line.split(",")[1]) for line in out.read_text().splitlines()[1:]]
    assert values == [2.0, 4.0, 6.0]
    assert capsys.readouterr().out.startswith("wrote 3 rows")


# ---------------------------------------------------------------- exit codes


def test_exit_usage_on_missing_command(capsys):
    assert run_command([]) == EXIT_USAGE
    assert "a command is required" in capsys.readouterr().err


def test_exit_usage_on_unknown_command(capsys):
    assert run_command(["frobnicate"]) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_exit_usage_on_bad_scheme(tmp_path, capsys):
    args, _ = sweep_args(tmp_path, "x.csv", ("--schemes", "ts,warp-drive"))
    assert run_command(["sweep-power", *args]) == EXIT_USAGE
    assert "unknown scheme 'warp-drive'" in capsys.readouterr().err


def test_exit_usage_on_bad_grid(tmp_path, capsys):
    args, _ = sweep_args(tmp_path, "x.csv")
    bad_step = [a if a != "5" else "0" for a in args]
    assert run_command(["sweep-power", *bad_step]) == EXIT_USAGE
    assert "--grid-step" in capsys.readouterr().err


def test_exit_usage_on_beta_grid_outside_range(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code = run_command([
        "sweep-beta", "--trials", "1", "--out", str(out),
        "--grid-start", "0.0", "--grid-stop", "0.5", "--grid-step", "0.25",
    ])
    assert code == EXIT_USAGE
    assert "inside (0, 1)" in capsys.readouterr().err


def test_exit_usage_on_fractional_m_grid(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code = run_command([
        "sweep-m", "--trials", "1", "--out", str(out),
        "--grid-start", "2", "--grid-stop", "7", "--grid-step", "2.5",
    ])
    assert code == EXIT_USAGE
    assert "positive integers" in capsys.readouterr().err


def test_exit_config_on_bad_file(tmp_path, capsys):
    path = write_config(tmp_path, num_subsurfaces=7)
    assert run_command(["validate", "--config", path]) == EXIT_CONFIG
    assert "invalid configuration" in capsys.readouterr().err


def test_exit_config_on_unknown_key(tmp_path, capsys):
    path = write_config(tmp_path, spam="eggs")
    assert run_command(["validate", "--config", path]) == EXIT_CONFIG
    assert "unknown keys: spam" in capsys.readouterr().err


def test_exit_config_on_missing_path(capsys):
    assert run_command(["validate", "--config", "/no/such.conf"]) == EXIT_CONFIG
    capsys.readouterr()


def test_exit_config_on_negative_sigma2(capsys):
    assert run_command(["mse-table", "--sigma2", "-1"]) == EXIT_CONFIG
    assert "--sigma2" in capsys.readouterr().err


def test_exit_infeasible_on_coupled_hadamard(tmp_path, capsys):
    # order 8 is a valid Hadamard size, but the coupled pilot column
    # collides with a pattern column, so the run must refuse
    path = write_config(tmp_path, num_elements=12, num_subsurfaces=3)
    args, _ = sweep_args(tmp_path, "h.csv", ("--schemes", "es-coupled-hadamard"))
    code = run_command(["sweep-power", *args, "--config", path])
    assert code == EXIT_INFEASIBLE
    assert "infeasible design" in capsys.readouterr().err


def test_exit_infeasible_on_unsupported_hadamard_order(tmp_path, capsys):
    # default M=20 gives order 42, which has no Hadamard matrix here
    args, _ = sweep_args(tmp_path, "h.csv", ("--schemes", "es-ideal-hadamard"))
    code = run_command(["sweep-power", *args])
    assert code == EXIT_INFEASIBLE
    assert "infeasible design" in capsys.readouterr().err


def test_help_exits_ok(capsys):
    assert run_command(["--help"]) == EXIT_OK
    assert "usage" in capsys.readouterr().out.lower()


# ---------------------------------------------------------------- entry point


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "starce", "mse-table"],
        capture_output=True, text=True, cwd=tmp_path,
    )
    assert proc.returncode == 0
    assert "2.000000e-14" in proc.stdout
