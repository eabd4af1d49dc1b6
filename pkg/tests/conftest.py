"""Pytest configuration and fixtures."""

import numpy as np
import pytest
from typer.testing import CliRunner

from rff_qrng.models.config import (
    AnalogTimingModel,
    DetectorConfig,
    QrngConfig,
    SamplerConfig,
)
from rff_qrng.models.streams import BitStream


@pytest.fixture
def cli_runner() -> CliRunner:
    """Provide a CLI runner for testing Typer applications."""
    return CliRunner()


@pytest.fixture
def ideal_analog() -> AnalogTimingModel:
    """Instantaneous transitions, mid-level threshold."""
    return AnalogTimingModel.ideal()


@pytest.fixture
def reference_analog() -> AnalogTimingModel:
    """eta = 0.5, t_R = 500 ps, t_F = 527.2 ps (alpha = 6.8 ps)."""
    return AnalogTimingModel.reference()


@pytest.fixture
def detector() -> DetectorConfig:
    """45 MHz detector with a 6 ns dead time."""
    return DetectorConfig(f_det=45e6, dead_time=6e-9, seed=11)


@pytest.fixture
def sampler() -> SamplerConfig:
    return SamplerConfig(f_bit=20e6, phase=1e-9)


@pytest.fixture
def small_config() -> QrngConfig:
    """Two-stage pipeline small enough for unit tests."""
    return QrngConfig.build(
        n_stages=2, f_det=45e6, f_bit=20e6, n_bits=20_000, dead_time=6e-9, seed=7
    )


@pytest.fixture
def random_stream() -> BitStream:
    """200k i.i.d. fair bits straight from numpy's PCG64."""
    rng = np.random.default_rng(2024)
    return BitStream.from_bits(rng.integers(0, 2, size=200_000, dtype=np.uint8))
