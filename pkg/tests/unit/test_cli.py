# type: ignore
"""Unit tests for CLI module."""

import json

import numpy as np
from typer.testing import CliRunner

from rff_qrng.bitio import write_bitstream
from rff_qrng.cli import app
from rff_qrng.models.streams import BitStream


def _random_file(path, n_bits=50_000, seed=1):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, n_bits, dtype=np.uint8)
    write_bitstream(path, BitStream.from_bits(bits))
    return path


def test_version_flag(cli_runner: CliRunner) -> None:
    """Test --version flag displays version correctly."""
    result = cli_runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert "RFF QRNG CLI v0.1.0" in result.output


class TestGenerate:
    """Test the generate command."""

    def test_writes_bitstream(self, cli_runner, tmp_path):
        """Test that generate writes the stream, sidecar and manifest."""
        out = tmp_path / "bits.bin"
        result = cli_runner.invoke(
            app, ["generate", "--out", str(out), "--n-bits", "2e4", "--stages", "2"]
        )
        assert result.exit_code == 0, result.output
        assert out.stat().st_size == 2500
        assert (tmp_path / "bits.bin.json").is_file()
        assert (tmp_path / "bits.bin.manifest.json").is_file()
        assert "Generated bitstream" in result.output

    def test_reproducible(self, cli_runner, tmp_path):
        """Test that the same flags give byte-identical output."""
        outs = [tmp_path / "a.bin", tmp_path / "b.bin"]
        for out in outs:
            args = ["generate", "--out", str(out), "--n-bits", "5000", "--seed", "9"]
            assert cli_runner.invoke(app, args).exit_code == 0
        assert outs[0].read_bytes() == outs[1].read_bytes()

    def test_config_file(self, cli_runner, tmp_path):
        """Test that --config supplies settings the flags leave unset."""
        config = tmp_path / "qrng.conf"
        config.write_text("n_bits = 800\nf_det = 30e6\n")
        out = tmp_path / "bits.bin"
        result = cli_runner.invoke(
            app, ["generate", "--out", str(out), "--config", str(config)]
        )
        assert result.exit_code == 0, result.output
        assert out.stat().st_size == 100

    def test_unreachable_rate(self, cli_runner, tmp_path):
        """Test that an infeasible detector exits 1 with an error message."""
        result = cli_runner.invoke(
            app,
            [
                "generate",
                "--out",
                str(tmp_path / "bits.bin"),
                "--f-det",
                "2e8",
                "--dead-time",
                "6e-9",
                "--n-bits",
                "1000",
            ],
        )
        assert result.exit_code == 1
        assert "Error" in result.output


class TestDetect:
    """Test the detect command."""

    def test_detect(self, cli_runner, tmp_path):
        """Test the timestamp export and the reported rates."""
        out = tmp_path / "det.bin"
        result = cli_runner.invoke(
            app,
            ["detect", "--out", str(out), "--n-events", "1e5", "--dead-time", "6e-9"],
        )
        assert result.exit_code == 0, result.output
        assert out.stat().st_size == 800_000
        assert "fitted_rate" in result.output


class TestSweeps:
    """Test the sweep commands."""

    def test_sweep_bias(self, cli_runner, tmp_path):
        """Test a two-point bias sweep."""
        out = tmp_path / "bias.csv"
        result = cli_runner.invoke(
            app,
            [
                "sweep-bias",
                "--out",
                str(out),
                "--f-bits",
                "2e7",
                "--f-dets",
                "1e7,4e7",
                "--n-bits",
                "2000",
            ],
        )
        assert result.exit_code == 0, result.output
        assert len(out.read_text().splitlines()) == 3

    def test_empty_grid(self, cli_runner, tmp_path):
        """Test that an empty grid is a usage error."""
        result = cli_runner.invoke(
            app, ["sweep-bias", "--out", str(tmp_path / "b.csv"), "--f-bits", ""]
        )
        assert result.exit_code == 2

    def test_k_max_zero(self, cli_runner, tmp_path):
        """Test that --k-max 0 is a usage error."""
        result = cli_runner.invoke(
            app, ["sweep-autocorr", "--out", str(tmp_path / "a.csv"), "--k-max", "0"]
        )
        assert result.exit_code == 2

    def test_sweep_autocorr_lambdas(self, cli_runner, tmp_path):
        """Test an autocorrelation sweep over lambda."""
        out = tmp_path / "ac.csv"
        result = cli_runner.invoke(
            app,
            [
                "sweep-autocorr",
                "--out",
                str(out),
                "--f-bits",
                "2e7",
                "--lambdas",
                "0.5",
                "--k-max",
                "2",
                "--n-bits",
                "4000",
            ],
        )
        assert result.exit_code == 0, result.output
        assert len(out.read_text().splitlines()) == 3


class TestBatteryCommand:
    """Test the test command."""

    def test_random_input_passes(self, cli_runner, tmp_path):
        """Test that a random input passes Frequency and writes reports."""
        source = _random_file(tmp_path / "bits.bin")
        reports = tmp_path / "reports"
        result = cli_runner.invoke(
            app,
            [
                "test",
                str(source),
                "--out",
                str(reports),
                "--block-size",
                "1000",
                "--tests",
                "Frequency",
            ],
        )
        assert result.exit_code == 0, result.output
        assert (reports / "frequency.json").is_file()
        assert "Frequency" in result.output

    def test_constant_input_fails(self, cli_runner, tmp_path):
        """Test that a failing battery exits 1."""
        source = tmp_path / "ones.bin"
        write_bitstream(source, BitStream.ones(10_000))
        result = cli_runner.invoke(
            app,
            [
                "test",
                str(source),
                "--out",
                str(tmp_path / "reports"),
                "--block-size",
                "1000",
                "--tests",
                "Frequency",
            ],
        )
        assert result.exit_code == 1

    def test_single_zero_block_fails(self, cli_runner, tmp_path):
        """Test that one all-zeros block is a failing battery."""
        source = tmp_path / "zeros.bin"
        write_bitstream(source, BitStream.zeros(1000))
        result = cli_runner.invoke(
            app,
            [
                "test",
                str(source),
                "--out",
                str(tmp_path / "reports"),
                "--block-size",
                "1000",
                "--tests",
                "Frequency",
            ],
        )
        assert result.exit_code == 1

    def test_unknown_test(self, cli_runner, tmp_path):
        """Test that an unknown test name is reported as an error."""
        source = _random_file(tmp_path / "bits.bin")
        result = cli_runner.invoke(
            app,
            ["test", str(source), "--out", str(tmp_path / "r"), "--tests", "Diehard"],
        )
        assert result.exit_code == 1
        assert "Error" in result.output


class TestAnalyzeAndPredict:
    """Test the JSON-producing commands."""

    def test_analyze_stdout(self, cli_runner, tmp_path):
        """Test that analyze prints JSON without --out."""
        source = _random_file(tmp_path / "bits.bin", 8_000)
        result = cli_runner.invoke(app, ["analyze", str(source), "--k-max", "2"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert payload["n_bits"] == 8_000
        assert len(payload["autocorr"]) == 2

    def test_predict_stdout(self, cli_runner):
        """Test the closed-form prediction for the reference analog model."""
        result = cli_runner.invoke(
            app, ["predict", "--t-rise", "500e-12", "--t-fall", "527.2e-12"]
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.stdout)
        assert abs(payload["bias"] - 3.06e-4) < 1e-9


class TestReplay:
    """Test the replay command."""

    def test_replay(self, cli_runner, tmp_path):
        """Test that a generate run replays bit-exactly."""
        out = tmp_path / "bits.bin"
        args = ["generate", "--out", str(out), "--n-bits", "3000", "--seed", "2"]
        assert cli_runner.invoke(app, args).exit_code == 0
        result = cli_runner.invoke(
            app, ["replay", str(tmp_path / "bits.bin.manifest.json")]
        )
        assert result.exit_code == 0, result.output
        assert "Reproduced 2 output(s)" in result.output

    def test_missing_manifest(self, cli_runner, tmp_path):
        """Test that a missing manifest exits 1."""
        result = cli_runner.invoke(app, ["replay", str(tmp_path / "none.json")])
        assert result.exit_code == 1
