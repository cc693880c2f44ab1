import json
import math
from pathlib import Path

import pytest

from remenu.cli import main

LN11 = math.log(1.1)
ALPHA_LO = 0.049787068367863944  # e^-3
ALPHA_HI = 0.1353352832366127  # e^-2


def write_config(path: Path, **overrides) -> Path:
    cfg = {
        "cost": {"theta": 0.1, "distortion": {"kind": "identity"}},
        "loss": {"family": "exponential"},
        "types": {
            "variant": "product_uniform",
            "k_dist": {"lo": 5000, "hi": 25000},
            "alpha_dist": {"lo": ALPHA_LO, "hi": ALPHA_HI},
        },
        "solver": {"class": "stop_loss", "grid_points": 2001, "refine_tol": 1e-6},
        "seed": 0,
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return path


@pytest.fixture()
def config(tmp_path):
    return write_config(tmp_path / "config.json")


@pytest.fixture()
def degenerate_config(tmp_path):
    return write_config(
        tmp_path / "deg.json",
        types={
            "variant": "degenerate_alpha",
            "k_dist": {"lo": 5000, "hi": 25000},
            "alpha_dist": {"value": ALPHA_LO},
        },
    )


class TestSolve:
    def test_degenerate_summary_values(self, degenerate_config, tmp_path):
        out = tmp_path / "out"
        assert main(["solve", "--config", str(degenerate_config), "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["tau_star"] == pytest.approx(225000.0 / (5.0 - LN11), rel=1e-5)
        assert summary["assumption_holds"] is True

    def test_product_summary_values(self, config, tmp_path):
        out = tmp_path / "out"
        assert main(["solve", "--config", str(config), "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["L"] == 10000.0
        assert summary["sup_theta_star"] == pytest.approx(25000.0 * LN11, abs=1e-6)
        assert summary["tau_star"] == pytest.approx(38861.6, rel=0.01)
        header = (out / "menu.csv").read_text().splitlines()[0]
        assert header == "a,k,contract_class,lambda,deductible,premium,risk_reduction"

    def test_unparseable_config_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["solve", "--config", str(bad), "--out", str(tmp_path)]) == 2

    def test_unknown_key_exits_2(self, tmp_path):
        cfg = write_config(tmp_path / "c.json")
        raw = json.loads(cfg.read_text())
        raw["extra"] = 1
        cfg.write_text(json.dumps(raw))
        assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == 2

    def test_empty_type_support_exits_2(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.json",
            types={
                "variant": "product_uniform",
                "k_dist": {"lo": 25000, "hi": 5000},
                "alpha_dist": {"lo": ALPHA_LO, "hi": ALPHA_HI},
            },
        )
        assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == 2

    def test_assumption_violation_exits_3(self, tmp_path):
        cfg = write_config(tmp_path / "c.json")
        raw = json.loads(cfg.read_text())
        raw["cost"]["theta"] = 10.0
        raw["solver"]["class"] = "change_loss"
        cfg.write_text(json.dumps(raw))
        assert main(["solve", "--config", str(cfg), "--out", str(tmp_path)]) == 3

    def test_determinism(self, config, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["solve", "--config", str(config), "--out", str(out1)])
        main(["solve", "--config", str(config), "--out", str(out2)])
        assert (out1 / "menu.csv").read_bytes() == (out2 / "menu.csv").read_bytes()
        assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()


class TestCurve:
    def test_two_point_curve(self, config, tmp_path):
        out = tmp_path / "out"
        assert (
            main(
                [
                    "curve",
                    "--config",
                    str(config),
                    "--out",
                    str(out),
                    "--t-lo",
                    "20000",
                    "--t-hi",
                    "30000",
                    "--n",
                    "2",
                ]
            )
            == 0
        )
        rows = (out / "curve.csv").read_text().splitlines()
        assert len(rows) == 3  # header + 2

    def test_beyond_support_is_zero(self, config, tmp_path):
        out = tmp_path / "out"
        main(
            [
                "curve",
                "--config",
                str(config),
                "--out",
                str(out),
                "--t-lo",
                "80000",
                "--t-hi",
                "90000",
                "--n",
                "3",
            ]
        )
        rows = (out / "curve.csv").read_text().splitlines()[1:]
        assert all(float(r.split(",")[1]) == 0.0 for r in rows)

    def test_bad_range_exits_2(self, config, tmp_path):
        assert (
            main(
                [
                    "curve",
                    "--config",
                    str(config),
                    "--out",
                    str(tmp_path),
                    "--t-lo",
                    "30000",
                    "--t-hi",
                    "20000",
                ]
            )
            == 2
        )


class TestVerify:
    def test_round_trip_passes(self, config, tmp_path):
        out = tmp_path / "out"
        main(["solve", "--config", str(config), "--out", str(out)])
        code = main(
            ["verify", "--config", str(config), "--out", str(out), "--menu", str(out / "menu.csv")]
        )
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["passed"] is True

    def test_corrupted_premium_fails(self, config, tmp_path):
        out = tmp_path / "out"
        main(["solve", "--config", str(config), "--out", str(out)])
        lines = (out / "menu.csv").read_text().splitlines()
        # Double the premium of the last (served) row: IR must now fail.
        cols = lines[-1].split(",")
        cols[5] = str(2.0 * float(cols[5]) + 10000.0)
        lines[-1] = ",".join(cols)
        bad = out / "bad.csv"
        bad.write_text("\n".join(lines) + "\n")
        assert main(["verify", "--config", str(config), "--out", str(out), "--menu", str(bad)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["passed"] is False

    def test_empty_menu_exits_2(self, config, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("a,k,contract_class,lambda,deductible,premium,risk_reduction\n")
        assert (
            main(["verify", "--config", str(config), "--out", str(tmp_path), "--menu", str(empty)])
            == 2
        )

    def test_malformed_menu_exits_2(self, config, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,k\n1,2\n")
        assert (
            main(["verify", "--config", str(config), "--out", str(tmp_path), "--menu", str(bad)])
            == 2
        )


class TestFirstBest:
    def test_report_written(self, config, tmp_path):
        out = tmp_path / "out"
        code = main(
            [
                "first-best",
                "--config",
                str(config),
                "--out",
                str(out),
                "--pair",
                "45000,15000,30000,15000",
            ]
        )
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["pairs"][0]["mimic_gain"] == pytest.approx(15000.0)
        assert report["pairs"][0]["profit_inequality_holds"] is True

    def test_missing_pair_exits_2(self, config, tmp_path):
        assert main(["first-best", "--config", str(config), "--out", str(tmp_path)]) == 2

    def test_bad_order_exits_2(self, config, tmp_path):
        assert (
            main(
                [
                    "first-best",
                    "--config",
                    str(config),
                    "--out",
                    str(tmp_path),
                    "--pair",
                    "30000,15000,45000,15000",
                ]
            )
            == 2
        )


class TestSimulate:
    def test_estimate_close_to_objective(self, config, tmp_path):
        out = tmp_path / "out"
        code = main(
            ["simulate", "--config", str(config), "--out", str(out), "--n", "50000", "--seed", "42"]
        )
        assert code == 0
        est = json.loads((out / "estimate.json").read_text())
        assert abs(est["estimate"] - est["analytic_objective"]) <= 4.0 * est["std_error"]

    def test_bad_n_exits_2(self, config, tmp_path):
        assert (
            main(["simulate", "--config", str(config), "--out", str(tmp_path), "--n", "0"]) == 2
        )
