import json
import subprocess
import sys

import jsonschema
import pytest

from trmetro import time_loop
from trmetro.cli import main
from trmetro.harness import ConfigError, run, validate
from trmetro.harness.config import OUT_ENV, PROTOCOLS, SCHEMA, default_config
from trmetro.harness.runner import atomic_write, to_csv


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestConfig:
    def test_empty_grid(self):
        with pytest.raises(ConfigError) as exc:
            validate({"protocol": "agnostic", "grid": {}})
        assert exc.value.path == "grid"

    def test_empty_values(self):
        with pytest.raises(ConfigError) as exc:
            validate({"protocol": "agnostic", "grid": {"alpha": {"values": []}}})
        assert exc.value.path == "grid.alpha"

    def test_unknown_protocol(self):
        with pytest.raises(ConfigError) as exc:
            validate({"protocol": "teleport", "grid": {"alpha": {"values": [1]}}})
        assert exc.value.path == "protocol"

    def test_precondition_range(self):
        with pytest.raises(ConfigError) as exc:
            validate({"protocol": "ico-seq-vs-switch", "grid": {"r": {"start": 0.5, "stop": 1.5, "num": 3}}})
        assert exc.value.path == "grid.r"

    def test_unknown_axis(self):
        with pytest.raises(ConfigError) as exc:
            validate({"protocol": "naive", "grid": {"beta": {"values": [1]}}})
        assert exc.value.path == "grid.beta"

    def test_bad_shots(self):
        with pytest.raises(ConfigError) as exc:
            validate({"protocol": "naive", "grid": {"alpha": {"values": [1]}}, "shots": 0})
        assert exc.value.path == "shots"

    def test_grid_expansion_order(self):
        conf = validate({"protocol": "hindsight",
                         "grid": {"alpha": {"values": [0.1, 0.2]}, "theta": {"start": 0, "stop": 1, "num": 3}}})
        pts = conf.points()
        assert len(pts) == 6
        assert pts[0] == {"alpha": 0.1, "theta": 0.0}
        assert pts[1] == {"alpha": 0.1, "theta": 0.5}

    def test_defaults_are_valid(self):
        for p in PROTOCOLS:
            jsonschema.validate(default_config(p).as_dict(), SCHEMA)


def test_agnostic_sweep(tmp_path):
    conf = validate({"protocol": "agnostic", "grid": {"alpha": {"start": 0.1, "stop": 1.5, "num": 15}}})
    out = run(conf, out=str(tmp_path))
    assert out.ok
    assert len(out.records) == 15
    for rec in out.records:
        assert rec["fi"] == pytest.approx(1.0, abs=1e-6)
    assert (tmp_path / "agnostic.csv").exists()
    prov = json.loads((tmp_path / "agnostic.provenance.json").read_text())
    assert prov["n_points"] == 15
    assert "sld_cutoff" in prov["tolerances"]


def test_records_reproducible_from_module(tmp_path):
    conf = validate({"protocol": "positronium", "grid": {"alpha": {"values": [0.3, 1.2]}},
                     "params": {"direction": [0, 1, 0]}})
    out = run(conf, write=False)
    for rec in out.records:
        direct = time_loop.positronium(time_loop.FieldSpec([0.0, 1.0, 0.0], rec["point"]["alpha"]))
        assert rec["fi"] == direct.fi
        assert rec["distribution"] == list(direct.distribution)


def test_identical_runs_are_byte_identical(tmp_path):
    conf = validate({"protocol": "echo", "grid": {"alpha": {"values": [0.01, 0.5]}},
                     "params": {"preset": "random", "qubits": 2}, "seed": 7, "shots": 500})
    run(conf, out=str(tmp_path / "a"))
    run(conf, out=str(tmp_path / "b"), jobs=2)
    for name in ("echo.csv", "echo.provenance.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sampling_is_seeded():
    base = {"protocol": "agnostic", "grid": {"alpha": {"values": [0.5, 1.0]}}, "shots": 1000}
    a = run(validate({**base, "seed": 1}), write=False).records
    b = run(validate({**base, "seed": 1}), write=False).records
    c = run(validate({**base, "seed": 2}), write=False).records
    assert [r["counts"] for r in a] == [r["counts"] for r in b]
    assert [r["counts"] for r in a] != [r["counts"] for r in c]
    assert all(sum(r["counts"]) == 1000 for r in a)


def test_exact_mode_has_no_counts_column():
    out = run(default_config("naive"), write=False)
    assert "counts" not in to_csv(out).splitlines()[0]


def test_per_point_errors_do_not_abort(tmp_path):
    conf = validate({"protocol": "paramp", "grid": {"r": {"values": [0.5, 3.0, 0.25]}},
                     "params": {"fock_dim": 20}})
    out = run(conf, out=str(tmp_path))
    assert [r["error"] is None for r in out.records] == [True, False, True]
    assert "TruncationError" in out.records[1]["error"]
    assert out.provenance["n_errors"] == 1
    assert out.ok


def test_ico_gain_column(tmp_path):
    out = run(default_config("ico-seq-vs-switch"), write=False)
    gains = [r["extra"]["relative_gain"] for r in out.records]
    rs = [r["point"]["r"] for r in out.records]
    assert rs == sorted(rs)
    # monotone in r on this grid (increasing)
    assert all(a < b for a, b in zip(gains, gains[1:]))


def test_out_dir_precedence(tmp_path, monkeypatch):
    cfg = write_config(tmp_path, {"protocol": "naive", "grid": {"alpha": {"values": [1.0]}},
                                  "output": str(tmp_path / "from_config")})
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "from_env"))
    assert main(["naive", "--config", cfg]) == 0
    assert (tmp_path / "from_env" / "naive.csv").exists()
    assert main(["naive", "--config", cfg, "--out", str(tmp_path / "from_flag")]) == 0
    assert (tmp_path / "from_flag" / "naive.csv").exists()
    monkeypatch.delenv(OUT_ENV)
    assert main(["naive", "--config", cfg]) == 0
    assert (tmp_path / "from_config" / "naive.csv").exists()


def test_atomic_write_leaves_no_temp_files(tmp_path):
    atomic_write(tmp_path / "x.txt", "one\n")
    atomic_write(tmp_path / "x.txt", "two\n")
    assert (tmp_path / "x.txt").read_text() == "two\n"
    assert [p.name for p in tmp_path.iterdir()] == ["x.txt"]


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, {"protocol": "agnostic", "grid": {}})
    assert main(["agnostic", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "grid" in capsys.readouterr().err


def test_cli_protocol_mismatch(tmp_path):
    cfg = write_config(tmp_path, {"protocol": "naive", "grid": {"alpha": {"values": [1.0]}}})
    assert main(["agnostic", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_cli_seed_and_shots_override(tmp_path):
    assert main(["agnostic", "--out", str(tmp_path), "--seed", "5", "--shots", "100"]) == 0
    prov = json.loads((tmp_path / "agnostic.provenance.json").read_text())
    assert prov["config"]["seed"] == 5
    assert prov["config"]["shots"] == 100


def test_schema_subcommand(capsys):
    assert main(["schema"]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed == json.loads(json.dumps(SCHEMA))


@pytest.mark.parametrize("protocol", PROTOCOLS)
def test_every_protocol_runs_clean(protocol, tmp_path):
    out = run(default_config(protocol), out=str(tmp_path))
    assert out.ok, out.provenance["violations"]
    assert out.n_errors == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "trmetro", "naive", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "0.666667" in proc.stdout
