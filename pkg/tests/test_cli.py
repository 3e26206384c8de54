import json

import numpy as np
import pytest

from almostconv.cli import (
    EXIT_CONVERGES,
    EXIT_DIVERGES,
    EXIT_ERROR,
    EXIT_INCONCLUSIVE,
    EXIT_USAGE,
    main,
)
from almostconv.corpus import GeneratorSpec, generate
from almostconv.core import write_sequence
from almostconv.seminorms import read_curve_csv


@pytest.fixture()
def alt_file(tmp_path):
    x = generate(GeneratorSpec("alternating", 4096)).sample
    path = tmp_path / "alt.jsonl"
    write_sequence(x, path)
    return str(path)


@pytest.fixture()
def spec_file(tmp_path):
    spec = {"kind": "alternating", "length": 2048}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    return str(path)


class TestAnalyze:
    def test_exit_converges(self, alt_file, tmp_path):
        report = tmp_path / "rep.json"
        code = main([
            "analyze", "--input", alt_file, "--window", "512",
            "--tol", "0.005", "--out-report", str(report),
        ])
        assert code == EXIT_CONVERGES
        blob = json.loads(report.read_text())
        assert blob["command"] == "analyze"
        assert blob["candidate"] == pytest.approx([0.5])
        assert blob["verdicts"]["strong"]["status"] == "converges"
        assert blob["verdicts"]["quasi"]["status"] == "converges"
        assert blob["verdicts"]["weak"]["status"] == "converges"
        eff = blob["effective"]
        assert eff["window"] == 512
        assert eff["horizon"] == 4096
        assert eff["tolerance"] == 0.005
        assert eff["norm"] == "l2"
        assert eff["dim"] == 1
        assert eff["threads"] == 1

    def test_curve_export(self, alt_file, tmp_path):
        curve = tmp_path / "curve.csv"
        code = main([
            "analyze", "--input", alt_file, "--window", "64",
            "--out-curve", str(curve),
        ])
        assert code == EXIT_CONVERGES
        cols = read_curve_csv(curve)
        assert len(cols["c_sliding"]) == 64
        assert len(cols["residual_sliding"]) == 64
        # alternating against 1/2: even windows read exactly zero residual
        assert cols["residual_sliding"][1] == 0.0

    def test_spec_input(self, spec_file):
        code = main(["analyze", "--spec", spec_file, "--tol", "0.005"])
        assert code == EXIT_CONVERGES

    def test_default_window_cap(self, spec_file, tmp_path, capsys):
        report = tmp_path / "rep.json"
        main(["analyze", "--spec", spec_file, "--out-report", str(report)])
        blob = json.loads(report.read_text())
        assert blob["effective"]["window"] == 1024  # min(M//2, 4096)

    def test_inconclusive_exit(self, tmp_path):
        # alternating at an odd window: strong residual 1/(2n), between
        # tol and the 10x floor
        x = generate(GeneratorSpec("alternating", 64)).sample
        path = tmp_path / "short.jsonl"
        write_sequence(x, path)
        code = main([
            "analyze", "--input", str(path), "--window", "31",
            "--tol", "0.01",
        ])
        assert code == EXIT_INCONCLUSIVE

    def test_missing_input(self):
        assert main(["analyze"]) == EXIT_ERROR
        assert main(["analyze", "--input", "/no/such/file"]) == EXIT_ERROR


class TestCheck:
    def test_right_and_wrong_limits(self, alt_file):
        good = main([
            "check", "--input", alt_file, "--check-limit", "0.5",
            "--window", "512", "--tol", "0.005",
        ])
        bad = main([
            "check", "--input", alt_file, "--check-limit", "0.9",
            "--window", "512", "--tol", "0.005",
        ])
        assert good == EXIT_CONVERGES
        assert bad == EXIT_DIVERGES

    def test_vector_limit_parsing(self, tmp_path):
        spec = GeneratorSpec(
            "convergent", 2048, dim=2,
            params={"limit": [0.25, -0.75], "decay": [0.1, 0.1]},
        )
        path = tmp_path / "conv.jsonl"
        write_sequence(generate(spec).sample, path)
        code = main([
            "check", "--input", str(path), "--check-limit", "0.25,-0.75",
            "--window", "512", "--tol", "0.01",
        ])
        assert code == EXIT_CONVERGES

    def test_requires_limit(self, alt_file):
        assert main(["check", "--input", alt_file]) == EXIT_ERROR

    def test_dimension_mismatch(self, alt_file):
        code = main([
            "check", "--input", alt_file, "--check-limit", "0.5,0.5",
        ])
        assert code == EXIT_ERROR

    def test_malformed_limit(self, alt_file):
        code = main([
            "check", "--input", alt_file, "--check-limit", "a,b",
        ])
        assert code == EXIT_ERROR


class TestGenerate:
    def test_writes_sequence(self, spec_file, tmp_path):
        out = tmp_path / "data.jsonl"
        report = tmp_path / "gen.json"
        code = main([
            "generate", "--spec", spec_file,
            "--out-data", str(out), "--out-report", str(report),
        ])
        assert code == 0
        blob = json.loads(report.read_text())
        assert blob["truth"] == pytest.approx([0.5])
        assert blob["data_file"] == str(out)
        # the emitted file round-trips through analyze
        assert main(["analyze", "--input", str(out), "--tol", "0.005"]) == 0

    def test_writes_function(self, tmp_path):
        spec = {
            "kind": "square_wave",
            "params": {"period": 2.0, "duration": 100.0, "step": 0.05},
        }
        spec_path = tmp_path / "fspec.json"
        spec_path.write_text(json.dumps(spec))
        out = tmp_path / "fn.jsonl"
        code = main(["generate", "--spec", str(spec_path), "--out-data", str(out)])
        assert code == 0
        assert main([
            "continuous", "--input", str(out), "--tol", "0.02",
        ]) == EXIT_CONVERGES

    def test_seed_override_changes_data(self, tmp_path):
        spec = {"kind": "random_bounded", "length": 200, "dim": 2,
                "params": {"bound": 1.0}}
        spec_path = tmp_path / "rspec.json"
        spec_path.write_text(json.dumps(spec))
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        main(["generate", "--spec", str(spec_path), "--out-data", str(a)])
        main(["generate", "--spec", str(spec_path), "--out-data", str(b),
              "--seed", "99"])
        assert a.read_text() != b.read_text()

    def test_requires_out_data(self, spec_file):
        assert main(["generate", "--spec", spec_file]) == EXIT_ERROR

    def test_bad_spec_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["generate", "--spec", str(path), "--out-data", "x"]) \
            == EXIT_ERROR


class TestFekete:
    def test_sequence_input_clean(self, alt_file):
        code = main(["fekete", "--input", alt_file, "--window", "128"])
        assert code == 0

    def test_curve_csv_input_clean(self, alt_file, tmp_path):
        curve = tmp_path / "curve.csv"
        main(["analyze", "--input", alt_file, "--window", "64",
              "--out-curve", str(curve)])
        assert main(["fekete", "--input", str(curve)]) == 0

    def test_corrupted_curve_flagged(self, alt_file, tmp_path):
        curve = tmp_path / "curve.csv"
        main(["analyze", "--input", alt_file, "--window", "64",
              "--out-curve", str(curve)])
        lines = curve.read_text().splitlines()
        # inflate one c_sliding entry; subadditivity must now fail
        cells = lines[40].split(",")
        cells[1] = repr(float(cells[1]) * 5.0 + 1.0)
        lines[40] = ",".join(cells)
        curve.write_text("\n".join(lines) + "\n")
        report = tmp_path / "fek.json"
        code = main(["fekete", "--input", str(curve),
                     "--out-report", str(report)])
        assert code == EXIT_DIVERGES
        blob = json.loads(report.read_text())
        assert blob["violation_count"] > 0
        first = blob["violations"][0]
        assert first["slack"] > 0

    def test_needs_input(self):
        assert main(["fekete"]) == EXIT_ERROR


class TestContinuous:
    @pytest.fixture()
    def sine_file(self, tmp_path):
        h = 0.01
        grid = np.arange(0.0, 200.0 + h / 2, h)
        from almostconv.continuous import SampledFunction, write_function

        f = SampledFunction(np.sin(grid)[:, None], h, 1.0, "l2")
        path = tmp_path / "sine.jsonl"
        write_function(f, path)
        return str(path)

    def test_estimated_candidate(self, sine_file, tmp_path):
        report = tmp_path / "rep.json"
        code = main([
            "continuous", "--input", sine_file, "--tol", "0.05",
            "--out-report", str(report),
        ])
        assert code == EXIT_CONVERGES
        blob = json.loads(report.read_text())
        assert blob["candidate_source"] == "estimated"
        assert abs(blob["candidate"][0]) < 0.05
        assert blob["effective"]["step"] == 0.01

    def test_explicit_candidate_and_window(self, sine_file):
        code = main([
            "continuous", "--input", sine_file, "--check-limit", "0",
            "--window", "100", "--tol", "0.05",
        ])
        assert code == EXIT_CONVERGES
        code = main([
            "continuous", "--input", sine_file, "--check-limit", "0.8",
            "--window", "100", "--tol", "0.05",
        ])
        assert code == EXIT_DIVERGES

    def test_sequence_file_rejected(self, alt_file):
        assert main(["continuous", "--input", alt_file]) == EXIT_ERROR

    def test_offgrid_window_rejected(self, sine_file):
        code = main([
            "continuous", "--input", sine_file, "--window", "0.005",
        ])
        assert code == EXIT_ERROR


class TestConfigAndUsage:
    def test_config_file_supplies_defaults(self, alt_file, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "input": alt_file, "window": 512, "tol": 0.005,
        }))
        assert main(["analyze", "--config", str(cfg)]) == EXIT_CONVERGES

    def test_flags_beat_config(self, alt_file, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "input": alt_file, "window": 512, "tol": 0.005,
            "check_limit": "0.9",
        }))
        # flag overrides the config's wrong limit
        code = main(["check", "--config", str(cfg), "--check-limit", "0.5"])
        assert code == EXIT_CONVERGES

    def test_unknown_config_key(self, alt_file, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"input": alt_file, "bogus": 1}))
        assert main(["analyze", "--config", str(cfg)]) == EXIT_ERROR

    def test_usage_errors_exit_4(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bogus-command"])
        assert exc.value.code == EXIT_USAGE
        with pytest.raises(SystemExit) as exc:
            main(["analyze", "--window", "not-a-number"])
        assert exc.value.code == EXIT_USAGE
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == EXIT_USAGE
        capsys.readouterr()

    def test_threads_env(self, alt_file, tmp_path, monkeypatch):
        report = tmp_path / "rep.json"
        monkeypatch.setenv("ALMOSTCONV_THREADS", "4")
        code = main(["analyze", "--input", alt_file, "--window", "64",
                     "--tol", "0.005", "--out-report", str(report)])
        assert code == EXIT_CONVERGES
        assert json.loads(report.read_text())["effective"]["threads"] == 4

    def test_threads_env_invalid(self, alt_file, monkeypatch):
        monkeypatch.setenv("ALMOSTCONV_THREADS", "zero")
        assert main(["analyze", "--input", alt_file]) == EXIT_ERROR
        monkeypatch.setenv("ALMOSTCONV_THREADS", "0")
        assert main(["analyze", "--input", alt_file]) == EXIT_ERROR

    def test_norm_override_rebinds(self, tmp_path):
        spec = GeneratorSpec("random_bounded", 300, dim=2, seed=3,
                             params={"bound": 1.0})
        path = tmp_path / "r.jsonl"
        write_sequence(generate(spec).sample, path)
        report = tmp_path / "rep.json"
        main(["analyze", "--input", str(path), "--norm", "linf",
              "--out-report", str(report)])
        assert json.loads(report.read_text())["effective"]["norm"] == "linf"

    def test_window_must_be_integral_for_sequences(self, alt_file):
        assert main(["analyze", "--input", alt_file,
                     "--window", "10.5"]) == EXIT_ERROR
        assert main(["analyze", "--input", alt_file,
                     "--window", "999999"]) == EXIT_ERROR
