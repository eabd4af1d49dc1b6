# type: ignore
"""Unit tests for command executors, manifests and replay."""

import numpy as np
import pandas as pd
import pytest

from rff_qrng.bitio import read_bitstream, read_json, write_bitstream
from rff_qrng.errors import ManifestMismatch
from rff_qrng.manifest import load_manifest, write_manifest
from rff_qrng.models.streams import BitStream
from rff_qrng.runs import (
    analyze_bitstream,
    execute_detect,
    execute_predict,
    execute_test,
    replay,
    run_and_record,
)
from rff_qrng.settings import (
    AnalyzeSettings,
    BatterySettings,
    DetectSettings,
    SimulationSettings,
)


def _random_file(path, n_bits, seed):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, n_bits, dtype=np.uint8)
    write_bitstream(path, BitStream.from_bits(bits))
    return path


class TestGenerate:
    """Test the generate executor with its manifest."""

    def test_outputs_and_manifest(self, tmp_path):
        """Test the bitstream, sidecar and manifest entries."""
        settings = SimulationSettings(stages=2, n_bits=10_001, seed=3)
        steps = []
        result, manifest_path = run_and_record(
            "generate", settings, tmp_path / "out.bin", on_progress=steps.append
        )
        bits, metadata = read_bitstream(tmp_path / "out.bin")
        manifest = load_manifest(manifest_path)

        assert len(bits) == 10_001
        assert metadata["seed"] == 3
        assert manifest_path.name == "out.bin.manifest.json"
        assert set(manifest.outputs) == {"out.bin", "out.bin.json"}
        assert manifest.settings["n_bits"] == 10_001
        assert {"stage_0", "stage_1", "combine", "summarize"} <= set(steps)
        assert "measured_bias" in result.summary
        assert "Stages: 2" in result.details

    def test_replay_reproduces(self, tmp_path):
        """Test that replaying a manifest regenerates identical bytes."""
        settings = SimulationSettings(n_bits=5_000, seed=11, dead_time=6e-9)
        _, manifest_path = run_and_record("generate", settings, tmp_path / "out.bin")
        produced = replay(manifest_path, scratch=tmp_path / "scratch")
        assert produced == load_manifest(manifest_path).outputs

    def test_replay_detects_changed_digest(self, tmp_path):
        """Test that a manifest digest that no longer matches is reported."""
        settings = SimulationSettings(n_bits=2_000, seed=1)
        _, manifest_path = run_and_record("generate", settings, tmp_path / "out.bin")
        manifest = load_manifest(manifest_path)
        tampered = manifest.model_copy(
            update={"outputs": {**manifest.outputs, "out.bin": "0" * 64}}
        )
        write_manifest(tampered, manifest_path)
        with pytest.raises(ManifestMismatch):
            replay(manifest_path)


class TestDetect:
    """Test the detect executor."""

    def test_summary_and_histogram(self, tmp_path):
        """Test the export, the histogram file and the fitted rate."""
        settings = DetectSettings(f_det=45e6, n_events=200_000, seed=4)
        result = execute_detect(settings, tmp_path / "det.bin")
        histogram = read_json(tmp_path / "det.bin.histogram.json")

        assert len(result.outputs) == 3
        assert result.summary["count"] == 200_000
        assert result.summary["measured_rate"] == pytest.approx(45e6, rel=0.01)
        assert histogram["fitted_rate"] == pytest.approx(45e6, rel=0.05)
        assert histogram["histogram"]["bin_width"] == 1e-9


class TestBattery:
    """Test the test executor."""

    def test_single_input(self, tmp_path):
        """Test report files for one input."""
        source = _random_file(tmp_path / "bits.bin", 50_000, 1)
        settings = BatterySettings(
            inputs=(source,), block_size=1000, tests=("Frequency",)
        )
        result = execute_test(settings, tmp_path / "reports")

        report = read_json(tmp_path / "reports" / "frequency.json")
        cdf = pd.read_csv(tmp_path / "reports" / "frequency.cdf.csv")
        assert len(report["p_values"]) == 50
        assert cdf["p_value"].is_monotonic_increasing
        assert cdf["rank"].iloc[-1] == 1.0
        assert result.summary["tests"] == {"Frequency": [result.ok]}

    def test_several_inputs(self, tmp_path):
        """Test per-string directories and the across-string CDF."""
        inputs = tuple(
            _random_file(tmp_path / f"s{i}.bin", 20_000, i) for i in range(3)
        )
        settings = BatterySettings(
            inputs=inputs, block_size=1000, tests=("Frequency", "Runs")
        )
        result = execute_test(settings, tmp_path / "reports")

        assert (tmp_path / "reports" / "string_002" / "summary.json").is_file()
        strings = pd.read_csv(tmp_path / "reports" / "strings.cdf.csv")
        assert set(strings["test"]) == {"Frequency", "Runs"}
        assert len(strings) == 6
        assert [len(v) for v in result.summary["tests"].values()] == [3, 3]

    def test_failing_input(self, tmp_path):
        """Test that a constant input fails."""
        path = tmp_path / "ones.bin"
        write_bitstream(path, BitStream.ones(10_000))
        settings = BatterySettings(
            inputs=(path,), block_size=1000, tests=("Frequency",)
        )
        assert not execute_test(settings, tmp_path / "reports").ok


class TestAnalyze:
    """Test the analyze executor."""

    def test_payload(self, random_stream):
        """Test bias, autocorrelation and entropy fields."""
        payload = analyze_bitstream(random_stream, 3, (1, 3))
        assert payload["n_bits"] == 200_000
        assert [row["k"] for row in payload["autocorr"]] == [1, 2, 3]
        assert set(payload["entropy"]) == {"1", "3"}

    def test_constant_stream(self):
        """Test that a constant stream reports no autocorrelation."""
        assert analyze_bitstream(BitStream.zeros(1000), 2, (2,))["autocorr"] == []

    def test_replay_detects_changed_input(self, tmp_path):
        """Test that replay refuses an input modified after the run."""
        source = _random_file(tmp_path / "bits.bin", 4_000, 2)
        settings = AnalyzeSettings(input=source, k_max=2)
        out = tmp_path / "analysis.json"
        _, manifest_path = run_and_record("analyze", settings, out)
        _random_file(source, 4_000, 3)
        with pytest.raises(ManifestMismatch):
            replay(manifest_path)


class TestPredict:
    """Test the predict executor."""

    def test_without_output(self):
        """Test that no files are written without an output path."""
        settings = SimulationSettings(t_rise=500e-12, t_fall=527.2e-12)
        result = execute_predict(settings, None)
        assert result.outputs == []
        assert result.summary["bias"] == pytest.approx(3.06e-4)
