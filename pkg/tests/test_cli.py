"""Tests for the command-line interface."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from mimolink import AccuracyError, Receiver, SystemConfig, db_to_linear
from mimolink import cli
from mimolink.cli import main
from mimolink.training import optimize_tp_exact


def _run(args):
    return CliRunner().invoke(main, args)


def _read_csv(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestNmseCommand:
    def test_basic_run(self, tmp_path):
        res = _run([
            "nmse", "--nt", "4", "--nr", "4", "--t", "100", "--tp", "4",
            "--delta", "0", "--delta", "0.1",
            "--snr-db-min", "0", "--snr-db-max", "10", "--snr-db-step", "5",
            "--trials", "512", "--seed", "7", "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        header, rows = _read_csv(tmp_path / "nmse.csv")
        assert header == [
            "snr_dB", "delta", "nmse_analytic", "nmse_floor", "nmse_empirical",
        ]
        assert len(rows) == 3 * 2  # snr grid x delta list
        # delta=0 rows report a zero floor
        d0 = [r for r in rows if float(r[1]) == 0.0]
        assert all(float(r[3]) == 0.0 for r in d0)
        manifest = json.loads((tmp_path / "nmse.manifest.json").read_text())
        assert manifest["subcommand"] == "nmse"
        assert "nmse.csv" in manifest["files"]

    def test_seventeen_digit_round_trip(self, tmp_path):
        res = _run([
            "nmse", "--nt", "4", "--nr", "4", "--t", "100", "--tp", "4",
            "--delta", "0.1", "--snr-db-min", "10", "--snr-db-max", "10",
            "--snr-db-step", "2", "--trials", "256", "--seed", "3",
            "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        _, rows = _read_csv(tmp_path / "nmse.csv")
        from mimolink import derive_params

        cfg = SystemConfig(nt=4, nr=4, t=100, tp=4, rho=db_to_linear(10), delta=0.1)
        # %.17g serialization must reparse to the exact double.
        assert float(rows[0][2]) == derive_params(cfg).sigma2_err


class TestOutageCommand:
    def test_default_configs_cover_both_arrays(self, tmp_path):
        res = _run([
            "outage", "--snr-db", "10", "--delta", "0.1",
            "--threshold-db-min", "0", "--threshold-db-max", "10",
            "--threshold-db-step", "5", "--trials", "512", "--seed", "5",
            "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        _, rows = _read_csv(tmp_path / "outage.csv")
        pairs = {(r[0], r[1]) for r in rows}
        assert pairs == {("5", "5"), ("5", "30")}
        # all three receivers by default
        assert {r[3] for r in rows} == {"zf", "mrc", "mmse"}

    def test_explicit_config_parsing(self, tmp_path):
        res = _run([
            "outage", "--config", "4x6", "--snr-db", "10", "--delta", "0.05",
            "--threshold-db-min", "0", "--threshold-db-max", "0",
            "--threshold-db-step", "1", "--trials", "256", "--seed", "5",
            "--receiver", "zf", "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        _, rows = _read_csv(tmp_path / "outage.csv")
        assert {(r[0], r[1]) for r in rows} == {("4", "6")}

    def test_malformed_config_rejected(self, tmp_path):
        res = _run([
            "outage", "--config", "4by6", "--snr-db", "10", "--delta", "0.05",
            "--trials", "64", "--seed", "5", "--out", str(tmp_path),
        ])
        assert res.exit_code == 2


class TestRatesCommand:
    def test_optimized_tp_and_ceiling_columns(self, tmp_path):
        res = _run([
            "rates", "--nt", "2", "--nr", "2", "--t", "40",
            "--delta", "0", "--delta", "0.1",
            "--snr-db-min", "10", "--snr-db-max", "10", "--snr-db-step", "2",
            "--trials", "512", "--seed", "11", "--receiver", "mmse",
            "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        header, rows = _read_csv(tmp_path / "rates.csv")
        assert header == [
            "snr_dB", "receiver", "delta", "rate_analytic", "rate_empirical",
            "rate_ceiling", "tp_star",
        ]
        by_delta = {float(r[2]): r for r in rows}
        # delta=0 has no ceiling -> empty cell; delta>0 has one
        assert by_delta[0.0][5] == ""
        assert float(by_delta[0.1][5]) > 0
        # tp_star column matches a direct optimizer call
        cfg = SystemConfig(nt=2, nr=2, t=40, tp=2, rho=db_to_linear(10), delta=0.1)
        assert int(by_delta[0.1][6]) == optimize_tp_exact(cfg, Receiver.MMSE).tp_star

    def test_fixed_tp_respected(self, tmp_path):
        res = _run([
            "rates", "--nt", "2", "--nr", "2", "--t", "40", "--tp", "8",
            "--delta", "0.1", "--snr-db-min", "5", "--snr-db-max", "5",
            "--snr-db-step", "1", "--trials", "256", "--seed", "2",
            "--receiver", "zf", "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        _, rows = _read_csv(tmp_path / "rates.csv")
        assert all(r[6] == "8" for r in rows)

    def test_json_output_with_null_ceiling(self, tmp_path):
        res = _run([
            "rates", "--nt", "2", "--nr", "2", "--t", "40", "--tp", "4",
            "--delta", "0", "--snr-db-min", "0", "--snr-db-max", "0",
            "--snr-db-step", "1", "--trials", "256", "--seed", "2",
            "--receiver", "mrc", "--format", "json", "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        obj = json.loads((tmp_path / "rates.json").read_text())
        assert obj["rows"][0]["rate_ceiling"] is None
        assert obj["rows"][0]["receiver"] == "mrc"


class TestOptTpCommand:
    def test_matches_library(self, tmp_path):
        res = _run([
            "opt-tp", "--nt", "4", "--nr", "4", "--t", "60", "--delta", "0.1",
            "--snr-db-min", "10", "--snr-db-max", "20", "--snr-db-step", "10",
            "--seed", "1", "--receiver", "mmse", "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        header, rows = _read_csv(tmp_path / "opt_tp.csv")
        assert header == ["snr_dB", "receiver", "delta", "tp_star"]
        for row in rows:
            cfg = SystemConfig(
                nt=4, nr=4, t=60, tp=4,
                rho=db_to_linear(float(row[0])), delta=0.1,
            )
            assert int(row[3]) == optimize_tp_exact(cfg, Receiver.MMSE).tp_star


class TestAsymptoticCommand:
    def test_tp_mode_only_emits_tp_table(self, tmp_path):
        res = _run([
            "asymptotic", "--mode", "tp", "--config", "4x16", "--t", "200",
            "--delta", "0.1", "--snr-db-min", "10", "--snr-db-max", "10",
            "--snr-db-step", "2", "--seed", "1", "--receiver", "mmse",
            "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        assert (tmp_path / "asymptotic_tp.csv").exists()
        assert not (tmp_path / "asymptotic_convergence.csv").exists()
        header, rows = _read_csv(tmp_path / "asymptotic_tp.csv")
        assert header == [
            "nt", "nr", "snr_dB", "receiver", "delta", "tp_star_asymptotic",
        ]
        assert rows[0][:2] == ["4", "16"]

    def test_convergence_mode(self, tmp_path):
        res = _run([
            "asymptotic", "--mode", "convergence", "--config", "4x8",
            "--t", "100", "--delta", "0", "--snr-db-min", "10",
            "--snr-db-max", "10", "--snr-db-step", "2", "--trials", "1024",
            "--seed", "4", "--receiver", "mmse", "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        _, rows = _read_csv(tmp_path / "asymptotic_convergence.csv")
        # det equivalent and a 1024-trial empirical mean land close even at
        # this small size
        assert float(rows[0][7]) < 0.1


class TestReproducibilityAndVerify:
    def _fast_nmse(self, out):
        return [
            "nmse", "--nt", "4", "--nr", "4", "--t", "100", "--tp", "4",
            "--delta", "0.1", "--snr-db-min", "0", "--snr-db-max", "4",
            "--snr-db-step", "2", "--trials", "512", "--seed", "42",
            "--out", str(out),
        ]

    def test_rerun_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert _run(self._fast_nmse(a)).exit_code == 0
        assert _run(self._fast_nmse(b)).exit_code == 0
        assert (a / "nmse.csv").read_bytes() == (b / "nmse.csv").read_bytes()

    def test_verify_clean(self, tmp_path):
        assert _run(self._fast_nmse(tmp_path)).exit_code == 0
        res = _run(["verify", str(tmp_path / "nmse.manifest.json")])
        assert res.exit_code == 0, res.output
        assert "byte-identical" in res.output

    def test_verify_detects_drift(self, tmp_path):
        assert _run(self._fast_nmse(tmp_path)).exit_code == 0
        path = tmp_path / "nmse.csv"
        path.write_text(path.read_text().replace("0.1", "0.2", 1))
        res = _run(["verify", str(tmp_path / "nmse.manifest.json")])
        assert res.exit_code == 1
        assert "DRIFT" in res.output

    def test_verify_detects_manifest_mismatch(self, tmp_path):
        assert _run(self._fast_nmse(tmp_path)).exit_code == 0
        mpath = tmp_path / "nmse.manifest.json"
        manifest = json.loads(mpath.read_text())
        name = next(iter(manifest["files"]))
        manifest["files"][name] = "0" * 64
        mpath.write_text(json.dumps(manifest))
        res = _run(["verify", str(mpath)])
        assert res.exit_code == 1
        assert "MISMATCH" in res.output


class TestPresets:
    def test_preset_fills_defaults(self, tmp_path):
        # Down-scaled trial count keeps the preset runnable in a test;
        # everything else comes from the preset table.
        res = _run([
            "nmse", "--preset", "fig1", "--trials", "128",
            "--snr-db-min", "0", "--snr-db-max", "4", "--snr-db-step", "2",
            "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        _, rows = _read_csv(tmp_path / "nmse.csv")
        # fig1 sweeps four impairment levels (cells carry 17 significant
        # digits, so compare as parsed floats)
        assert {float(r[1]) for r in rows} == {0.0, 0.05, 0.1, 0.15}

    def test_preset_subcommand_mismatch(self, tmp_path):
        res = _run(["nmse", "--preset", "fig2", "--out", str(tmp_path)])
        assert res.exit_code == 2
        assert "preset" in res.output.lower()

    def test_plot_script_compiles(self, tmp_path):
        res = _run(self_args := [
            "nmse", "--nt", "2", "--nr", "2", "--t", "20", "--tp", "2",
            "--delta", "0.1", "--snr-db-min", "0", "--snr-db-max", "0",
            "--snr-db-step", "1", "--trials", "64", "--seed", "1",
            "--emit-plot-script", "--out", str(tmp_path),
        ])
        assert res.exit_code == 0, res.output
        script = (tmp_path / "plot_nmse.py").read_text()
        compile(script, "plot_nmse.py", "exec")


class TestErrorPaths:
    def test_infeasible_tp_is_usage_error(self, tmp_path):
        res = _run([
            "nmse", "--nt", "4", "--nr", "4", "--t", "100", "--tp", "2",
            "--delta", "0", "--snr-db-min", "0", "--snr-db-max", "0",
            "--snr-db-step", "1", "--trials", "64", "--seed", "1",
            "--out", str(tmp_path),
        ])
        assert res.exit_code == 2

    def test_zf_with_nr_below_nt_is_usage_error(self, tmp_path):
        res = _run([
            "rates", "--nt", "4", "--nr", "2", "--t", "50", "--tp", "4",
            "--delta", "0.1", "--snr-db-min", "0", "--snr-db-max", "0",
            "--snr-db-step", "1", "--trials", "64", "--seed", "1",
            "--receiver", "zf", "--out", str(tmp_path),
        ])
        assert res.exit_code == 2

    def test_accuracy_error_maps_to_exit_3(self, tmp_path, monkeypatch):
        def boom(params):
            raise AccuracyError("quadrature failed to converge")

        monkeypatch.setitem(cli._RUNNERS, "nmse", boom)
        res = _run([
            "nmse", "--nt", "4", "--nr", "4", "--t", "100", "--tp", "4",
            "--delta", "0", "--snr-db-min", "0", "--snr-db-max", "0",
            "--snr-db-step", "1", "--trials", "64", "--seed", "1",
            "--out", str(tmp_path),
        ])
        assert res.exit_code == 3
        assert "quadrature failed to converge" in res.output

    def test_version_flag(self):
        res = _run(["--version"])
        assert res.exit_code == 0
        assert "mimolink" in res.output
