"""End-to-end tests of the command-line interface, exercised in-process."""

import csv
import json

import pytest

from rcmtools import cli, oracle, rates

THETA_MAX_3_2 = 0.85855963664011037
LAMBDA_C_4 = 3.2958368660043291


def run(argv):
    return cli.main(argv)


class TestRate:
    def test_writes_curve_and_phase_point(self, tmp_path, capsys):
        out = tmp_path / "rate.csv"
        code = run(
            ["rate", "--lambda", "3", "--q", "2", "--grid-size", "1024",
             "--out", str(out)]
        )
        assert code == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["theta", "phi"]
        assert len(rows) == 1026
        values = [(float(t), float(v)) for t, v in rows[1:]]
        argmax_theta = max(values, key=lambda tv: tv[1])[0]
        assert abs(argmax_theta - THETA_MAX_3_2) <= 1.5 / 1024
        point = json.loads((tmp_path / "rate.csv.phase.json").read_text())
        assert float(point["theta_star"]) == pytest.approx(
            THETA_MAX_3_2, abs=1e-9
        )
        assert point["manifest"] == str(out) + ".manifest.json"
        manifest = json.loads((tmp_path / "rate.csv.manifest.json").read_text())
        assert manifest["subcommand"] == "rate"
        assert str(out) in manifest["outputs"]

    def test_percolation_sup_is_zero(self, tmp_path):
        # lambda=1 is exactly critical for q=1 and is refused, so the
        # percolation normalisation is demonstrated just off criticality
        out = tmp_path / "p.csv"
        assert run(["rate", "--lambda", "1.5", "--q", "1", "--grid-size", "1024",
                    "--out", str(out)]) == 0
        rows = list(csv.reader(out.open()))[1:]
        sup = max(float(v) for _, v in rows)
        assert abs(sup) <= 1e-6

    def test_exactly_critical_percolation_refused(self, tmp_path):
        assert run(["rate", "--lambda", "1", "--q", "1",
                    "--out", str(tmp_path / "c.csv")]) == 3

    def test_subcritical_argmax_at_origin(self, tmp_path):
        out = tmp_path / "s.csv"
        assert run(["rate", "--lambda", "0.5", "--q", "2", "--grid-size", "512",
                    "--out", str(out)]) == 0
        rows = [(float(t), float(v)) for t, v in list(csv.reader(out.open()))[1:]]
        assert max(rows, key=lambda tv: tv[1])[0] == 0.0

    def test_critical_point_exits_3(self, tmp_path, capsys):
        code = run(["rate", "--lambda", "2", "--q", "2",
                    "--out", str(tmp_path / "x.csv")])
        assert code == 3
        assert "critical" in capsys.readouterr().err


class TestPhase:
    def test_table_locates_transition(self, tmp_path):
        out = tmp_path / "phase.csv"
        code = run(
            ["phase", "--q", "4", "--lambda-min", "3.205", "--lambda-max", "3.405",
             "--lambda-step", "0.01", "--out", str(out)]
        )
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        onset = next(
            float(r["lambda"]) for r in rows if float(r["theta_star"]) > 0.0
        )
        assert abs(onset - LAMBDA_C_4) <= 0.01

    def test_percolation_free_energy_column_vanishes(self, tmp_path):
        out = tmp_path / "p.csv"
        assert run(
            ["phase", "--q", "1", "--lambda-min", "0.5", "--lambda-max", "2.5",
             "--lambda-step", "0.2", "--out", str(out)]
        ) == 0
        rows = list(csv.DictReader(out.open()))
        assert all(abs(float(r["free_energy"])) <= 1e-6 for r in rows)

    def test_theta_star_jump_across_critical(self, tmp_path):
        out = tmp_path / "j.csv"
        assert run(
            ["phase", "--q", "2", "--lambda-min", "1.9", "--lambda-max", "2.1",
             "--lambda-step", "0.2", "--out", str(out)]
        ) == 0
        rows = list(csv.DictReader(out.open()))
        assert float(rows[0]["theta_star"]) == 0.0
        assert float(rows[1]["theta_star"]) > 0.0


class TestExact:
    def test_report_matches_library(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(
            ["exact", "--n", "5", "--lambda", "1.5", "--q", "2", "--r", "2", "3",
             "--eps", "0.4", "--out", str(out)]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        rep = oracle.enumerate_report(
            oracle.ModelParams(5, 1.5, 2.0), r_list=[2, 3], eps_list=[0.4]
        )
        assert float(doc["Z"]) == rep.z
        assert float(doc["Z_Br"]["2"]) == rep.z_bounded[2]

    def test_data_output_reproducible(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert run(["exact", "--n", "4", "--lambda", "1", "--q", "3",
                        "--r", "2", "--out", str(out)]) == 0
        da, db = json.loads(a.read_text()), json.loads(b.read_text())
        da.pop("manifest"), db.pop("manifest")
        assert da == db

    def test_size_refusal_exits_3(self, tmp_path, capsys):
        code = run(["exact", "--n", "7", "--lambda", "1", "--q", "2",
                    "--out", str(tmp_path / "x.json")])
        assert code == 3
        assert "allow-large" in capsys.readouterr().err.replace("_", "-")


class TestSample:
    def test_csv_and_summary(self, tmp_path):
        out = tmp_path / "samples.csv"
        code = run(
            ["sample", "--n", "40", "--lambda", "3", "--q", "2", "--seed", "5",
             "--burnin", "10", "--sweeps", "40", "--thin", "2",
             "--eps", "0.2", "--out", str(out)]
        )
        assert code == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == [
            "sweep", "largest_fraction", "k_over_n", "acyclic", "connected",
            "v_eps_fraction",
        ]
        assert len(rows) == 21
        summary = json.loads((tmp_path / "samples.csv.summary.json").read_text())
        assert "largest_fraction" in summary
        assert summary["v_eps_fraction"][0]["eps"].startswith("0.2")

    def test_byte_reproducible_for_fixed_seed(self, tmp_path):
        texts = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            assert run(
                ["sample", "--n", "30", "--lambda", "2.5", "--q", "1.5",
                 "--seed", "123", "--burnin", "5", "--sweeps", "30",
                 "--out", str(out)]
            ) == 0
            texts.append(out.read_bytes())
        assert texts[0] == texts[1]


class TestSaddle:
    def test_json_keys(self, capsys):
        assert run(["saddle", "--alpha", "0.5", "--r", "100"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert set(doc) == {
            "r", "alpha", "s_r", "theta_r", "value",
            "s_limit", "theta_limit", "value_limit",
        }
        assert float(doc["theta_r"]) == pytest.approx(0.75, abs=1e-4)

    def test_discrete_block_present_with_n(self, capsys):
        assert run(["saddle", "--alpha", "0.5", "--r", "20", "--n", "100"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert {"s_rn", "theta_rn", "value_n"} <= set(doc)


class TestConfigFile:
    def test_config_supplies_defaults_and_flags_override(self, tmp_path, capsys):
        cfg = tmp_path / "defaults.cfg"
        cfg.write_text("# sweep defaults\nr = 100\nalpha = 9.9\n")
        assert run(["saddle", "--alpha", "0.5", "--config", str(cfg)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["r"] == 100  # from config (parser default is 200)
        assert float(doc["alpha"]) == 0.5  # flag wins over config


class TestValidateCommand:
    def test_quick_report(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = run(["validate", "--level", "quick", "--out", str(out)])
        captured = capsys.readouterr().out
        assert "criterion 1" in captured
        doc = json.loads(out.read_text())
        assert doc["level"] == "quick"
        assert code == (0 if doc["passed"] else 1)
        for crit in doc["criteria"]:
            assert {"id", "name", "passed", "details"} <= set(crit)

    def test_reports_byte_identical_across_runs(self, tmp_path):
        texts = []
        for name in ("r1.json", "r2.json"):
            out = tmp_path / name
            run(["validate", "--level", "quick", "--out", str(out)])
            doc = json.loads(out.read_text())
            doc.pop("manifest")
            texts.append(json.dumps(doc, sort_keys=True))
        assert texts[0] == texts[1]
