"""End-to-end tests for the command-line interface."""

import csv
import json
import math

import numpy as np
import pytest

from tailwright import DiscretePowerLaw, EventSeries, parse_events, write_events
from tailwright.cli import main


def series_from_gaps(pair_side, gaps):
    ts = np.cumsum(np.asarray(gaps, dtype=np.int64))
    return EventSeries(
        pair_side=pair_side, timestamps=ts, session_length=int(ts[-1])
    )


def write_gap_csv(path, pair_side, gaps):
    write_events(path, series_from_gaps(pair_side, gaps))
    return str(path)


def lognormal_gaps(n=4000, seed=0):
    rng = np.random.default_rng(seed)
    return np.ceil(rng.lognormal(mean=0.826, sigma=0.912, size=n)).astype(
        np.int64
    )


def spliced_powerlaw_gaps(n_body=1500, n_tail=1000, seed=3):
    rng = np.random.default_rng(seed)
    body = rng.integers(1, 30, size=n_body)
    tail = DiscretePowerLaw(alpha=3.5, tau_min=30).sample(n_tail, rng)
    return np.concatenate([body, tail])


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def read_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestSimulate:
    def test_round_trip_and_determinism(self, tmp_path, capsys):
        out = tmp_path / "events.csv"
        argv = [
            "simulate", "--output", str(out),
            "--steps", "20000", "--seed", "5",
        ]
        assert main(argv) == 0
        assert "events ->" in capsys.readouterr().out
        (series,) = parse_events(out)
        assert series.pair_side == "sim"
        assert series.timestamps.size > 0

        again = tmp_path / "again.csv"
        assert main(argv[:2] + [str(again)] + argv[3:]) == 0
        assert out.read_bytes() == again.read_bytes()

    def test_invalid_steps_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["simulate", "--output", str(tmp_path / "x.csv"),
                  "--steps", "0"])
        assert err.value.code == 2

    def test_inert_offer_warns_but_succeeds(self, tmp_path):
        out = tmp_path / "inert.csv"
        with pytest.warns(RuntimeWarning, match="never change"):
            rc = main([
                "simulate", "--output", str(out), "--steps", "2000",
                "--agents", "2", "--offer", "2", "--seed", "1",
            ])
        assert rc == 0
        assert out.read_text().strip() == "pair_side,timestamp"


class TestFit:
    def test_lognormal_input_ranks_lognormal_first(self, tmp_path):
        src = write_gap_csv(tmp_path / "ln.csv", "EURUSDbid", lognormal_gaps())
        outdir = tmp_path / "fit"
        assert main(["fit", "--input", src, "--output", str(outdir)]) == 0
        doc = read_json(outdir / "EURUSDbid_fit.json")
        assert doc["kind"] == "fit" and doc["schema_version"] == "1"
        kl = {tag: doc["models"][tag]["kl_divergence"]
              for tag in ("exponential", "weibull", "lognormal")}
        assert kl["lognormal"] < kl["weibull"]
        assert kl["lognormal"] < kl["exponential"]

    def test_diagnostic_points_exist_and_are_finite(self, tmp_path):
        src = write_gap_csv(
            tmp_path / "ln.csv", "EURUSDbid", lognormal_gaps(n=1000)
        )
        outdir = tmp_path / "fit"
        main(["fit", "--input", src, "--output", str(outdir)])
        for stem in ("ccdf_semilog", "ccdf_loglog", "weibull_plot"):
            header, rows = read_csv(outdir / f"EURUSDbid_{stem}.csv")
            assert len(header) == 2 and rows
            for row in rows:
                assert all(math.isfinite(float(cell)) for cell in row)

    def test_weibull_plot_slope_recovers_shape(self, tmp_path):
        rng = np.random.default_rng(8)
        gaps = np.ceil(24.9 * rng.weibull(0.58, size=20000)).astype(np.int64)
        src = write_gap_csv(tmp_path / "wb.csv", "GBPUSDask", gaps)
        outdir = tmp_path / "fit"
        main(["fit", "--input", src, "--output", str(outdir)])
        _, rows = read_csv(outdir / "GBPUSDask_weibull_plot.csv")
        x = np.array([float(r[0]) for r in rows])
        y = np.array([float(r[1]) for r in rows])
        slope = np.polyfit(x, y, 1)[0]
        assert slope == pytest.approx(0.58, rel=0.05)

    def test_multi_series_input(self, tmp_path):
        a = series_from_gaps("AUDUSDask", lognormal_gaps(n=500, seed=1))
        b = series_from_gaps("AUDUSDbid", lognormal_gaps(n=500, seed=2))
        src = tmp_path / "two.csv"
        write_events(src, [a, b])
        outdir = tmp_path / "fit"
        assert main(["fit", "--input", str(src), "--output", str(outdir)]) == 0
        assert (outdir / "AUDUSDask_fit.json").exists()
        assert (outdir / "AUDUSDbid_fit.json").exists()
        assert len(list(outdir.glob("*.csv"))) == 6

    def test_unknown_model_is_usage_error(self, tmp_path):
        src = write_gap_csv(tmp_path / "x.csv", "X", lognormal_gaps(n=100))
        with pytest.raises(SystemExit) as err:
            main(["fit", "--input", src, "--output", str(tmp_path / "o"),
                  "--models", "cauchy"])
        assert err.value.code == 2

    def test_empty_input_exits_1(self, tmp_path, capsys):
        src = tmp_path / "empty.csv"
        src.write_text("pair_side,timestamp\n")
        rc = main(["fit", "--input", str(src), "--output", str(tmp_path / "o")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_deterministic_outputs(self, tmp_path):
        src = write_gap_csv(tmp_path / "ln.csv", "X", lognormal_gaps(n=400))
        main(["fit", "--input", src, "--output", str(tmp_path / "a")])
        main(["fit", "--input", src, "--output", str(tmp_path / "b")])
        da = (tmp_path / "a" / "X_fit.json").read_bytes()
        db = (tmp_path / "b" / "X_fit.json").read_bytes()
        assert da == db


class TestCompare:
    def test_fold_bics_and_winner(self, tmp_path):
        rng = np.random.default_rng(4)
        gaps = np.ceil(rng.exponential(scale=8.0, size=900)).astype(np.int64)
        src = write_gap_csv(tmp_path / "exp.csv", "USDJPYbid", gaps)
        outdir = tmp_path / "cmp"
        rc = main(["compare", "--input", src, "--output", str(outdir),
                   "--folds", "4", "--seed", "2"])
        assert rc == 0
        doc = read_json(outdir / "USDJPYbid_compare.json")
        assert doc["kind"] == "compare" and doc["folds"] == 4
        for tag in ("exponential", "weibull", "lognormal"):
            entry = doc["models"][tag]
            assert len(entry["fold_bics"]) == 4
            assert "bic_cv" in entry
        assert doc["winner_by_bic"] in doc["models"]
        assert doc["winner_by_kl"] in doc["models"]


class TestPowerlaw:
    def test_report_fields(self, tmp_path):
        src = write_gap_csv(
            tmp_path / "pl.csv", "NZDUSDask", spliced_powerlaw_gaps()
        )
        outdir = tmp_path / "pl"
        rc = main(["powerlaw", "--input", src, "--output", str(outdir),
                   "--n-boot", "120", "--seed", "9"])
        assert rc == 0
        doc = read_json(outdir / "NZDUSDask_powerlaw.json")
        assert doc["kind"] == "powerlaw" and doc["n_boot"] == 120
        assert doc["tau_min"] >= 1
        assert 1 < doc["alpha"] <= 20
        assert 0.0 <= doc["p_value"] <= 1.0
        assert doc["p_margin"] >= 0.0
        assert doc["dstar"] >= doc["ks_distance"] > 0
        assert 0 < doc["tail_fraction"] <= 1
        assert doc["selection_statistic"] == "ks"

    def test_short_series_becomes_warning_row(self, tmp_path):
        short = series_from_gaps("TINYpair", np.arange(1, 12))
        good = series_from_gaps("GOODpair", spliced_powerlaw_gaps(seed=5))
        src = tmp_path / "mix.csv"
        write_events(src, [short, good])
        outdir = tmp_path / "pl"
        with pytest.warns(RuntimeWarning, match="TINYpair"):
            rc = main(["powerlaw", "--input", str(src),
                       "--output", str(outdir), "--n-boot", "120"])
        assert rc == 0
        assert "warning" in read_json(outdir / "TINYpair_powerlaw.json")
        assert "alpha" in read_json(outdir / "GOODpair_powerlaw.json")

    def test_too_few_replicates_exits_1(self, tmp_path, capsys):
        src = write_gap_csv(
            tmp_path / "pl.csv", "X", spliced_powerlaw_gaps()
        )
        rc = main(["powerlaw", "--input", src,
                   "--output", str(tmp_path / "o"), "--n-boot", "50"])
        assert rc == 1
        assert "n_boot" in capsys.readouterr().err

    def test_seed_env_fallback(self, tmp_path, monkeypatch):
        src = write_gap_csv(
            tmp_path / "pl.csv", "X", spliced_powerlaw_gaps()
        )
        outdir = tmp_path / "pl"
        monkeypatch.setenv("TAILWRIGHT_SEED", "77")
        rc = main(["powerlaw", "--input", src, "--output", str(outdir),
                   "--n-boot", "120"])
        assert rc == 0
        assert read_json(outdir / "X_powerlaw.json")["seed"] == 77

    def test_bad_seed_env_exits_1(self, tmp_path, monkeypatch, capsys):
        src = write_gap_csv(tmp_path / "pl.csv", "X", spliced_powerlaw_gaps())
        monkeypatch.setenv("TAILWRIGHT_SEED", "not-a-number")
        rc = main(["powerlaw", "--input", src,
                   "--output", str(tmp_path / "o"), "--n-boot", "120"])
        assert rc == 1
        assert "TAILWRIGHT_SEED" in capsys.readouterr().err


class TestSweep:
    def test_self_recovery_under_common_seed(self, tmp_path):
        target = tmp_path / "target.csv"
        main(["simulate", "--output", str(target), "--steps", "20000",
              "--agents", "10", "--offer", "3", "--seed", "5"])
        outdir = tmp_path / "sweep"
        rc = main(["sweep", "--input", str(target), "--output", str(outdir),
                   "--agents", "5,10", "--offers", "2,3",
                   "--steps", "20000", "--seed", "5"])
        assert rc == 0
        header, rows = read_csv(outdir / "sweep.csv")
        assert header[:2] == ["n_agents", "offer_size"]
        assert len(rows) == 4
        # generating cell reproduces the target exactly under the shared seed
        assert rows[0][0] == "10" and rows[0][1] == "3"
        assert float(rows[0][-1]) == 0.0
        kls = [float(r[-1]) for r in rows]
        assert kls == sorted(kls)
        meta = read_json(outdir / "sweep.json")["metadata"]
        assert meta["best"] == {"n_agents": 10, "offer_size": 3}
        assert meta["seed"] == 5

    def test_invalid_cell_is_usage_error(self, tmp_path):
        src = write_gap_csv(tmp_path / "t.csv", "X", np.arange(1, 80))
        with pytest.raises(SystemExit) as err:
            main(["sweep", "--input", src, "--output", str(tmp_path / "o"),
                  "--agents", "0,5", "--offers", "2", "--steps", "1000"])
        assert err.value.code == 2


class TestReport:
    def _populate(self, tmp_path):
        a = series_from_gaps("AUDUSDask", lognormal_gaps(n=700, seed=1))
        b = series_from_gaps("EURUSDbid", spliced_powerlaw_gaps(seed=2))
        src = tmp_path / "mix.csv"
        write_events(src, [a, b])
        reports = tmp_path / "reports"
        main(["fit", "--input", str(src), "--output", str(reports)])
        main(["compare", "--input", str(src), "--output", str(reports)])
        main(["powerlaw", "--input", str(src), "--output", str(reports),
              "--n-boot", "100"])
        return reports

    def test_tables_from_report_directory(self, tmp_path, capsys):
        reports = self._populate(tmp_path)
        outdir = tmp_path / "tables"
        rc = main(["report", "--input", str(reports), "--output", str(outdir)])
        assert rc == 0
        assert capsys.readouterr().out.count("wrote ") == 3
        h1, r1 = read_csv(outdir / "table1.csv")
        assert h1 == ["pair_side", "n", "mean_interval",
                      "kl_exponential", "kl_weibull", "kl_lognormal"]
        assert len(r1) == 2
        h2, r2 = read_csv(outdir / "table2.csv")
        assert h2[:2] == ["pair_side", "model"] and h2[-1] == "bic_cv"
        assert len(r2) == 6  # 2 series x 3 models
        h3, r3 = read_csv(outdir / "table3.csv")
        assert h3[0] == "pair_side" and h3[1] == "mean_interval"
        means = [float(r[1]) for r in r3]
        assert means == sorted(means)
        sidecar = read_json(outdir / "table3.json")
        assert sidecar["schema_version"] == "1"
        assert sidecar["columns"] == h3

    def test_single_file_input(self, tmp_path):
        reports = self._populate(tmp_path)
        one = sorted(reports.glob("*_fit.json"))[0]
        outdir = tmp_path / "tables"
        rc = main(["report", "--input", str(one), "--output", str(outdir)])
        assert rc == 0
        assert (outdir / "table1.csv").exists()
        assert not (outdir / "table2.csv").exists()

    def test_mixed_schema_versions_exit_1(self, tmp_path, capsys):
        reports = self._populate(tmp_path)
        victim = sorted(reports.glob("*_fit.json"))[0]
        doc = read_json(victim)
        doc["schema_version"] = "2"
        victim.write_text(json.dumps(doc))
        rc = main(["report", "--input", str(reports),
                   "--output", str(tmp_path / "t")])
        assert rc == 1
        err = capsys.readouterr().err
        assert "1" in err and "2" in err

    def test_foreign_json_ignored_and_rerun_safe(self, tmp_path):
        reports = self._populate(tmp_path)
        (reports / "notes.json").write_text('{"todo": "ignore me"}')
        # write the tables next to the reports, then run again: the table
        # sidecars now present in the input directory must be skipped
        assert main(["report", "--input", str(reports),
                     "--output", str(reports)]) == 0
        first = (reports / "table1.csv").read_bytes()
        assert main(["report", "--input", str(reports),
                     "--output", str(reports)]) == 0
        assert (reports / "table1.csv").read_bytes() == first

    def test_no_reports_exit_1(self, tmp_path, capsys):
        empty = tmp_path / "reports"
        empty.mkdir()
        (empty / "stray.json").write_text('{"kind": "metrics"}')
        rc = main(["report", "--input", str(empty),
                   "--output", str(tmp_path / "t")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err
