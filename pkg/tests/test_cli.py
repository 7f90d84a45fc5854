import csv
import json

import numpy as np
import pytest

from hidetify import ContaminationSpec, RammParams, contaminate, detect, generate_clean
from hidetify.cli import main
from hidetify.dataio import (
    REPORT_COLUMNS,
    load_dataset,
    meta_path,
    read_truth,
    write_dataset,
    write_truth,
)


@pytest.fixture(scope="module")
def swamped_csv(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    clean = generate_clean(60, 40, seed=21)
    sample = contaminate(clean, ContaminationSpec(model="II", mu=10.0, fraction=0.15, seed=22))
    path = root / "swamped.csv"
    write_dataset(path, sample.data)
    write_truth(root / "swamped_truth.txt", sample.truth)
    return path, sample


def read_report(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestDataIO:
    def test_round_trip(self, tmp_path):
        clean = generate_clean(20, 12, seed=1)
        path = tmp_path / "d.csv"
        write_dataset(path, clean.data)
        data, names, response = load_dataset(path)
        assert response == "y"
        assert names == [f"x{j}" for j in range(1, 13)]
        assert np.array_equal(data.values, clean.data.values)
        assert np.array_equal(data.response, clean.data.response)

    def test_response_by_index(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b,c\n1,2,3\n4,5,6\n7,8,9\n1,1,1\n")
        data, names, response = load_dataset(path, response="1")
        assert response == "b"
        assert names == ["a", "c"]
        assert data.response.tolist() == [2.0, 5.0, 8.0, 1.0]

    def test_truth_sidecar_round_trip(self, tmp_path):
        path = tmp_path / "truth.txt"
        write_truth(path, (4, 0, 2))
        assert path.read_text() == "1\n3\n5\n"
        assert read_truth(path) == (0, 2, 4)

    def test_nan_cell_names_row_and_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x1,y\n1.0,2.0\nnan,3.0\n4.0,5.0\n6.0,7.0\n")
        with pytest.raises(Exception) as err:
            load_dataset(path)
        assert "row 2" in str(err.value)
        assert "'x1'" in str(err.value)

    def test_malformed_row_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x1,y\n1.0,2.0\n3.0\n")
        with pytest.raises(Exception) as err:
            load_dataset(path)
        assert "line 3" in str(err.value)

    def test_missing_response_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x1,x2\n1,2\n3,4\n5,6\n7,8\n")
        with pytest.raises(Exception) as err:
            load_dataset(path)
        assert "'y'" in str(err.value)


class TestDetectCommand:
    def test_report_shape_and_flags(self, swamped_csv, tmp_path):
        path, sample = swamped_csv
        out = tmp_path / "report.csv"
        code = main(["detect", "--input", str(path), "--out", str(out), "--seed", "5"])
        assert code == 0
        rows = read_report(out)
        assert len(rows) == 60
        assert list(rows[0].keys()) == list(REPORT_COLUMNS)
        flagged = {int(r["row"]) - 1 for r in rows if r["influential"] == "1"}
        confirmed_have_steps = all(r["step_flagged"] for r in rows if r["influential"] == "1")
        assert confirmed_have_steps
        truth = set(sample.truth)
        assert len(flagged & truth) / len(truth) >= 0.9
        meta = json.loads(meta_path(out).read_text())
        assert meta["detector"] == "asymMIP"
        assert meta["params"]["seed"] == 5
        assert "timestamp" not in json.dumps(meta).lower()

    def test_matches_library_detection(self, swamped_csv, tmp_path):
        path, sample = swamped_csv
        out = tmp_path / "report.csv"
        main(["detect", "--input", str(path), "--out", str(out), "--seed", "9"])
        rows = read_report(out)
        file_flags = tuple(sorted(int(r["row"]) - 1 for r in rows if r["influential"] == "1"))
        result = detect(sample.data, RammParams(seed=9))
        assert file_flags == result.influential

    def test_exit_2_on_nan_cell(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("x1,y\n1.0,2.0\nnan,3.0\n4.0,5.0\n6.0,7.0\n")
        code = main(["detect", "--input", str(path), "--out", str(tmp_path / "r.csv")])
        assert code == 2
        err = capsys.readouterr().err
        assert "row 2" in err and "x1" in err

    def test_exit_3_on_constant_column(self, tmp_path, capsys):
        rng = np.random.default_rng(3)
        path = tmp_path / "const.csv"
        lines = ["x1,x2,y"]
        for i in range(30):
            lines.append(f"{rng.standard_normal()},7.0,{rng.standard_normal()}")
        path.write_text("\n".join(lines) + "\n")
        code = main(["detect", "--input", str(path), "--out", str(tmp_path / "r.csv")])
        assert code == 3
        assert "column" in capsys.readouterr().err

    def test_drop_degenerate_flag(self, tmp_path, capsys):
        rng = np.random.default_rng(4)
        path = tmp_path / "const.csv"
        lines = ["x1,x2,x3,y"]
        for i in range(30):
            x = rng.standard_normal(2)
            lines.append(f"{x[0]},7.0,{x[1]},{rng.standard_normal()}")
        path.write_text("\n".join(lines) + "\n")
        out = tmp_path / "r.csv"
        code = main(["detect", "--input", str(path), "--out", str(out), "--drop-degenerate"])
        assert code == 0
        assert "x2" in capsys.readouterr().err
        meta = json.loads(meta_path(out).read_text())
        assert meta["dropped_columns"] == ["x2"]
        assert meta["p"] == 2

    def test_reduction_identity_mip(self, swamped_csv, tmp_path):
        path, _ = swamped_csv
        out_mip = tmp_path / "mip.csv"
        out_half = tmp_path / "half.csv"
        main(["detect", "--input", str(path), "--out", str(out_mip), "--detector", "MIP", "--seed", "3"])
        main(
            ["detect", "--input", str(path), "--out", str(out_half), "--detector", "asymMIP", "--taus", "0.5", "--seed", "3"]
        )
        flags = lambda rows: [r["influential"] for r in rows]
        assert flags(read_report(out_mip)) == flags(read_report(out_half))

    def test_byte_identical_across_threads(self, swamped_csv, tmp_path):
        path, _ = swamped_csv
        out1 = tmp_path / "r1.csv"
        out2 = tmp_path / "r2.csv"
        main(["detect", "--input", str(path), "--out", str(out1), "--seed", "7", "--threads", "1"])
        main(["detect", "--input", str(path), "--out", str(out2), "--seed", "7", "--threads", "4"])
        assert out1.read_bytes() == out2.read_bytes()
        assert meta_path(out1).read_bytes() == meta_path(out2).read_bytes()

    def test_clean_data_confirms_few(self, tmp_path):
        clean = generate_clean(60, 100, seed=33)
        path = tmp_path / "clean.csv"
        write_dataset(path, clean.data)
        out = tmp_path / "r.csv"
        assert main(["detect", "--input", str(path), "--out", str(out), "--seed", "1"]) == 0
        rows = read_report(out)
        assert sum(r["influential"] == "1" for r in rows) <= 0.05 * 60


class TestConfigPrecedence:
    def test_config_file_applies(self, swamped_csv, tmp_path):
        path, _ = swamped_csv
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seed": 11, "m": 3, "taus": [0.3, 0.5, 0.7]}))
        out = tmp_path / "r.csv"
        main(["detect", "--input", str(path), "--out", str(out), "--config", str(cfg)])
        meta = json.loads(meta_path(out).read_text())
        assert meta["params"]["seed"] == 11
        assert meta["params"]["m"] == 3
        assert meta["params"]["taus"] == [0.3, 0.5, 0.7]

    def test_flag_beats_config(self, swamped_csv, tmp_path):
        path, _ = swamped_csv
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seed": 11}))
        out = tmp_path / "r.csv"
        main(["detect", "--input", str(path), "--out", str(out), "--config", str(cfg), "--seed", "12"])
        assert json.loads(meta_path(out).read_text())["params"]["seed"] == 12

    def test_env_seed_fallback(self, swamped_csv, tmp_path, monkeypatch):
        path, _ = swamped_csv
        monkeypatch.setenv("HIDETIFY_SEED", "77")
        out = tmp_path / "r.csv"
        main(["detect", "--input", str(path), "--out", str(out)])
        assert json.loads(meta_path(out).read_text())["params"]["seed"] == 77

    def test_unknown_config_key_rejected(self, swamped_csv, tmp_path, capsys):
        path, _ = swamped_csv
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        code = main(["detect", "--input", str(path), "--out", str(tmp_path / "r.csv"), "--config", str(cfg)])
        assert code == 2
        assert "bogus" in capsys.readouterr().err


class TestSimulateCommand:
    def test_one_row_per_detector_metric(self, tmp_path):
        out = tmp_path / "bench.csv"
        code = main(
            [
                "simulate", "--model", "II", "--mu", "10", "--n", "60", "--p", "40",
                "--replications", "1", "--detectors", "asymMIP,MIP", "--seed", "2",
                "--out", str(out),
            ]
        )
        assert code == 0
        rows = read_report(out)
        assert len(rows) == 4  # 2 detectors x (tpr_inf, fpr_inf)
        assert {(r["method"], r["metric"]) for r in rows} == {
            ("asymMIP", "tpr_inf"),
            ("asymMIP", "fpr_inf"),
            ("MIP", "tpr_inf"),
            ("MIP", "fpr_inf"),
        }

    def test_byte_identical_reruns(self, tmp_path):
        args = [
            "simulate", "--model", "I", "--mu", "6", "--n", "40", "--p", "30",
            "--replications", "2", "--seed", "5",
        ]
        out1, out2 = tmp_path / "b1.csv", tmp_path / "b2.csv"
        main(args + ["--out", str(out1)])
        main(args + ["--out", str(out2), "--threads", "3"])
        assert out1.read_bytes() == out2.read_bytes()


class TestCompareCommand:
    def test_smoke_within_time_budget(self, tmp_path):
        import time

        out = tmp_path / "cmp.csv"
        start = time.perf_counter()
        code = main(
            [
                "compare", "--model", "II", "--mu", "10", "--n", "60", "--p", "100",
                "--replications", "1", "--methods", "RawData,asymMIP", "--folds", "3",
                "--seed", "4", "--out", str(out),
            ]
        )
        assert code == 0
        assert time.perf_counter() - start < 300
        rows = read_report(out)
        methods = {r["method"] for r in rows}
        assert methods == {"RawData", "asymMIP"}


class TestSweepTrend:
    def test_power_non_decreasing_in_mu(self, tmp_path):
        # qualitative power trend, measured where the detector has power
        # (swamping); allows one small inversion across the mu grid
        means = []
        for mu in (4.0, 7.0, 10.0):
            out = tmp_path / f"sweep_{mu:g}.csv"
            main(
                [
                    "simulate", "--model", "II", "--mu", f"{mu:g}", "--n", "60", "--p", "40",
                    "--replications", "6", "--seed", "8", "--out", str(out),
                ]
            )
            rows = read_report(out)
            tprs = [float(r["value"]) for r in rows if r["metric"] == "tpr_inf"]
            means.append(float(np.mean(tprs)))
        assert all(b >= a - 0.05 for a, b in zip(means, means[1:])), means
        assert means[-1] > means[0]
