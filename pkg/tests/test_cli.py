"""Command-line surface: artifact formats, determinism, and exit codes."""

import json
import math

import pytest

from semsec import DISABLED, ValidationError, config_hash, dump_config, load_config
from semsec.cli import main
from semsec.config import RunConfig, get_preset, preset_names, validate_config

PRESETS = (
    "binary-tradeoff-fig5",
    "gaussian-converse-fig3",
    "gaussian-inner-nosecrecy",
    "gaussian-inner-semantic",
)


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestPresets:
    def test_list(self, capsys):
        code, out, _ = run_cli(["preset", "list"], capsys)
        assert code == 0
        listed = [line.strip() for line in out.strip().splitlines()]
        for name in PRESETS:
            assert any(name in line for line in listed)

    def test_show_round_trips(self, capsys):
        for name in PRESETS:
            code, out, _ = run_cli(["preset", "show", name], capsys)
            assert code == 0
            loaded = load_config(out)
            assert config_hash(loaded) == config_hash(get_preset(name))

    def test_show_unknown(self, capsys):
        code, _, err = run_cli(["preset", "show", "nope"], capsys)
        assert code == 2
        assert "nope" in err

    def test_show_missing_name(self, capsys):
        code, _, _ = run_cli(["preset", "show"], capsys)
        assert code == 2


class TestRdfCommand:
    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            ["rdf", "--model", "gaussian", "--d-s", "0.5", "--d-u", "0.6"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "# semsec-artifact v1"
        assert lines[1].startswith("# config-hash=")
        assert "seed=" in lines[1]
        assert lines[2] == "case,D_s,D_u,feasible,R_s,R_u,R_joint"
        fields = lines[3].split(",")
        assert fields[0] == "2" and fields[3] == "1"
        assert float(fields[6]) == pytest.approx(0.3848939535930074, abs=1e-11)

    def test_infeasible_point_exit3(self, capsys):
        code, out, _ = run_cli(
            ["rdf", "--model", "binary", "--case", "1",
             "--d-s", "0.2", "--d-u", "0.25"], capsys
        )
        assert code == 3
        row = out.strip().splitlines()[-1].split(",")
        assert row[3] == "0"
        assert row[4] == row[5] == row[6] == ""

    def test_missing_point_exit2(self, capsys):
        code, _, err = run_cli(["rdf", "--model", "gaussian"], capsys)
        assert code == 2
        assert "--d-s" in err


class TestConverseCommand:
    def test_small_grid(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": "gaussian", "mode": "converse", "cases": [1, 2],
            "delta_s": "-inf", "delta_u": "-inf", "delta_su": "-inf",
            "d_s_grid": 4, "d_u_grid": 4,
        }))
        code, out, _ = run_cli(["converse", "--config", str(cfg)], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[2] == "case,D_s,D_u,r_min,feasible,capped,samples"
        data = [line.split(",") for line in lines[3:]]
        assert len(data) == 2 * 16
        assert "nan" not in out and "inf" not in out
        for row in data:
            if row[4] == "1":
                assert float(row[3]) >= 0.0

    def test_infeasible_everywhere_exit3(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": "gaussian", "mode": "converse", "cases": [2],
            "channel": {"P": 1.0, "P_N1": 0.1, "P_N2": 0.0},
            "delta_s": 1.7, "delta_u": "-inf", "delta_su": "-inf",
            "d_s_grid": 2, "d_u_grid": 2,
        }))
        out_file = tmp_path / "surface.csv"
        code, _, _ = run_cli(
            ["converse", "--config", str(cfg), "--out", str(out_file)], capsys
        )
        assert code == 3
        body = out_file.read_text()
        rows = [line.split(",") for line in body.strip().splitlines()[3:]]
        assert rows and all(row[4] == "0" for row in rows)
        assert all(row[3] == "" for row in rows)

    def test_case_filter_and_seed_override(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": "gaussian", "mode": "converse",
            "cases": [1, 2], "d_s_grid": 3, "d_u_grid": 3,
            "delta_s": "-inf", "delta_u": "-inf", "delta_su": "-inf",
        }))
        code, out, _ = run_cli(
            ["converse", "--config", str(cfg), "--case", "1", "--seed", "9"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert "seed=9" in lines[1]
        assert all(line.split(",")[0] == "1" for line in lines[3:])


class TestCurveCommand:
    def test_variant_files_and_determinism(self, tmp_path, capsys):
        out_a = tmp_path / "a" / "fig5.csv"
        out_a.parent.mkdir()
        code, _, _ = run_cli(
            ["curve", "--preset", "binary-tradeoff-fig5", "--out", str(out_a)], capsys
        )
        assert code == 0
        expected = [
            out_a.with_name(f"fig5_case{case}_rk{rk:g}.csv")
            for case in (1, 2) for rk in (0.0, 0.1)
        ]
        for path in expected:
            assert path.exists(), path.name
        out_b = tmp_path / "b" / "fig5.csv"
        out_b.parent.mkdir()
        code, _, _ = run_cli(
            ["curve", "--preset", "binary-tradeoff-fig5", "--out", str(out_b)], capsys
        )
        assert code == 0
        for path in expected:
            twin = out_b.parent / path.name
            assert path.read_bytes() == twin.read_bytes()

    def test_curve_schema(self, capsys):
        code, out, _ = run_cli(
            ["curve", "--preset", "binary-tradeoff-fig5", "--case", "1"], capsys
        )
        assert code == 0
        # Two key-rate variants are concatenated on stdout.
        headers = [l for l in out.splitlines() if l.startswith("D_s,")]
        assert headers and all(h == "D_s,delta_s_max,capped" for h in headers)


class TestInnerCommand:
    def test_byte_identical_reruns(self, tmp_path, capsys):
        args = ["inner", "--preset", "gaussian-inner-nosecrecy",
                "--case", "2", "--samples", "3000"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(args + ["--out", str(a)], capsys)[0] == 0
        assert run_cli(args + ["--out", str(b)], capsys)[0] == 0
        blob = a.read_bytes()
        assert blob == b.read_bytes()
        assert b"nan" not in blob and b"inf" not in blob

    def test_json_format(self, tmp_path, capsys):
        code, out, _ = run_cli(
            ["inner", "--preset", "gaussian-inner-nosecrecy", "--case", "2",
             "--samples", "2000", "--format", "json"], capsys
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["artifact"] == "semsec-artifact v1"
        assert doc["rows"]
        samples_col = doc["columns"].index("samples")
        accepted = sum(row[samples_col] for row in doc["rows"])
        assert accepted > 0


class TestExitCodes:
    def test_bad_config_exit2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"model": "gaussian", "mystery_knob": 3}))
        code, _, err = run_cli(["converse", "--config", str(cfg)], capsys)
        assert code == 2
        assert "mystery_knob" in err

    def test_preset_and_config_conflict(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "gaussian"}))
        code, _, _ = run_cli(
            ["converse", "--config", str(cfg),
             "--preset", "gaussian-converse-fig3"], capsys
        )
        assert code == 2

    def test_mode_mismatch_exit2(self, capsys):
        code, _, _ = run_cli(
            ["inner", "--preset", "binary-tradeoff-fig5"], capsys
        )
        assert code == 2

    def test_verify_exit0(self, capsys):
        code, out, _ = run_cli(["verify"], capsys)
        assert code == 0
        assert "pass" in out.lower()


class TestConfigModule:
    def test_round_trip_with_disabled_targets(self, tmp_path):
        cfg = RunConfig(model="gaussian", mode="converse", delta_s=1.2)
        path = tmp_path / "cfg.json"
        path.write_text(dump_config(cfg))
        again = load_config(path)
        assert again.delta_s == 1.2
        assert again.delta_u == DISABLED
        assert config_hash(again) == config_hash(cfg)

    def test_dump_rejects_nan(self):
        with pytest.raises(Exception):
            dump_config(RunConfig(delta_s=float("nan")))

    def test_hash_ignores_key_order(self):
        a = load_config('{"model": "gaussian", "seed": 7}')
        b = load_config('{"seed": 7, "model": "gaussian"}')
        assert config_hash(a) == config_hash(b)

    def test_mode_model_coupling(self):
        with pytest.raises(ValidationError):
            RunConfig(model="binary", mode="inner")
        with pytest.raises(ValidationError):
            RunConfig(model="gaussian", mode="curve")
        with pytest.raises(ValidationError):
            RunConfig(model="gaussian", mode="inner", R_k=0.5)

    def test_channel_key_whitelist(self):
        with pytest.raises(ValidationError):
            RunConfig(model="binary", mode="converse", channel={"P_N1": 0.1})

    def test_preset_names_sorted(self):
        names = preset_names()
        assert list(names) == sorted(names)
        assert set(PRESETS) <= set(names)
