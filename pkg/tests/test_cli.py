import csv
import io
import json

import numpy as np
import pytest

from hsvrkit import cli, hsvr, runner, signals


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestExitCodes:
    def test_scales_fft(self, capsys):
        code, out, _ = run(["scales", "sin-20pi-x", "--method", "fft"], capsys)
        assert code == 0
        assert len(json.loads(out)["scales"]) == 1

    def test_dmd_on_exponential(self, capsys):
        code, _, err = run(["scales", "e-x", "--method", "dmd"], capsys)
        assert code == 2
        assert "scales" in err

    def test_impossible_threshold(self, capsys):
        assert run(["scales", "sin-20pi-x", "--threshold", "1.1"], capsys)[0] == 2

    def test_empty_suite(self, capsys, tmp_path):
        assert run(["bench", "--suite", "", "--out", tmp_path], capsys)[0] == 64

    def test_no_command(self, capsys):
        assert run([], capsys)[0] == 64

    def test_unknown_input(self, capsys):
        assert run(["scales", "no-such-signal"], capsys)[0] == 64

    def test_bad_flag_value(self, capsys):
        assert run(["sweep", "sin-2pi-x", "--layers", "0"], capsys)[0] == 64

    def test_bad_csv_is_internal(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n0,zz\n")
        code, _, err = run(["scales", path], capsys)
        assert code == 1 and "line 2" in err


class TestTrain:
    def test_sine(self, capsys, tmp_path):
        model = tmp_path / "m.json"
        layers = tmp_path / "layers.csv"
        code, out, _ = run(["train", "sin-2pi-x", "--out", model, "--report", layers], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["predicted_layers"] == 1
        assert report["final_error"] <= 0.03
        assert report["error_over_epsilon"] == pytest.approx(report["final_error"] / report["epsilon"], rel=1e-12)
        assert layers.read_text().splitlines()[0] == ",".join(hsvr.LAYER_REPORT_FIELDS)
        m = hsvr.HsvrModel.from_json(model.read_text())
        train, test = runner.resolve_input("sin-2pi-x")
        assert hsvr.layerwise_errors(m, test.x, test.y)[-1] == report["final_error"]

    def test_lorenz_x(self, capsys):
        code, out, _ = run(["train", "lorenz-x"], capsys)
        assert code == 0
        assert abs(json.loads(out)["predicted_layers"] - 6) <= 1

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert run(["train", "cos-20pi-x-sin-15pi-x", "--out", path], capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_scales_file(self, capsys, tmp_path):
        sfile = tmp_path / "s.json"
        sfile.write_text("[0.5, 0.1]")
        code, out, _ = run(["train", "sin-2pi-x", "--scales", sfile], capsys)
        assert code == 0 and json.loads(out)["scales"] == [0.5, 0.1]

    def test_csv_input(self, capsys, tmp_path):
        path = tmp_path / "sig.csv"
        signals.save_csv(signals.generate_named("sin-20pi-x"), path)
        code, out, _ = run(["train", path], capsys)
        assert code == 0 and json.loads(out)["predicted_layers"] == 1


class TestSweep:
    def test_chirp_has_large_error_range(self, capsys, tmp_path):
        out = tmp_path / "sweep.csv"
        assert run(["sweep", "sin-2pi-x4-plus-x", "--layers", "14", "--out", out], capsys)[0] == 0
        rows = list(csv.DictReader(out.open()))
        assert list(rows[0]) == ["sigma", "error"]
        err = np.array([float(r["error"]) for r in rows])
        assert len(rows) == 14
        assert np.all(err >= 0)
        assert err.max() / err.min() >= 10

    def test_single_layer(self, capsys):
        code, out, _ = run(["sweep", "sin-2pi-x", "--layers", "1"], capsys)
        assert code == 0 and len(out.strip().splitlines()) == 2


class TestBenchAndBatch:
    def test_lorenz_suite(self, capsys, tmp_path):
        code, out, _ = run(["bench", "--suite", "lorenz", "--method", "fft", "--out", tmp_path], capsys)
        assert code == 0
        summary = (tmp_path / "summary.csv").read_text()
        assert summary == out
        assert summary.splitlines()[0] == "function,epsilon,layers_fft,error_fft,layers_dmd,error_dmd"
        rows = list(csv.DictReader(io.StringIO(summary)))
        for row, ref in zip(rows, (0.314, 0.408, 0.468)):
            assert float(row["epsilon"]) == pytest.approx(ref, rel=0.05)
            assert row["layers_dmd"] == ""
        assert sorted(p.name for p in tmp_path.glob("*.json")) == ["lorenz-x_fft.json", "lorenz-y_fft.json",
                                                                   "lorenz-z_fft.json"]

    def test_batch_parallel_matches_serial(self, capsys, tmp_path):
        data = tmp_path / "series"
        data.mkdir()
        for seed in range(3):
            signals.save_csv(runner.surrogate_series(seed, n_samples=401), data / f"s{seed}.csv")
        signals.save_csv(signals.make_signal(np.arange(8.0), np.full(8, 2.0)), data / "flat.csv")
        par, ser = tmp_path / "par.csv", tmp_path / "ser.csv"
        assert run(["batch", data, "--jobs", "2", "--out", par], capsys)[0] == 0
        assert run(["batch", data, "--jobs", "1", "--out", ser], capsys)[0] == 0
        rows = list(csv.DictReader(par.open()))
        assert list(rows[0]) == list(runner.BATCH_FIELDS)
        assert [r["series"] for r in rows] == ["flat", "s0", "s1", "s2"]
        assert rows[0]["status"] == "no-support"
        assert par.read_text() == ser.read_text()


class TestConfig:
    def test_values_apply(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# spectral options\nthreshold = 1.1\n")
        assert run(["--config", cfg, "scales", "sin-20pi-x"], capsys)[0] == 2

    def test_flag_overrides_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("threshold = 1.1\n")
        assert run(["--config", cfg, "scales", "sin-20pi-x", "--threshold", "0.01"], capsys)[0] == 0

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("colour = blue\n")
        assert run(["--config", cfg, "scales", "sin-20pi-x"], capsys)[0] == 64

    def test_missing_file(self, capsys, tmp_path):
        assert run(["--config", tmp_path / "nope.cfg", "scales", "sin-2pi-x"], capsys)[0] == 64
