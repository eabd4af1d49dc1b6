"""Configuration, stream values and result models shared across the package."""

from rff_qrng.models.config import (
    AnalogTimingModel,
    DetectorConfig,
    QrngConfig,
    SamplerConfig,
)
from rff_qrng.models.reports import (
    SCHEMA_VERSION,
    AutocorrEstimate,
    BiasEstimate,
    DwellTimes,
    OperatingPoint,
    Proportion,
    PValueCdf,
    TestReport,
    WaitingTimeHistogram,
)
from rff_qrng.models.state import QrngState, create_initial_state
from rff_qrng.models.streams import BitStream, Crossings, DetectionTimes

__all__ = [
    "SCHEMA_VERSION",
    "AnalogTimingModel",
    "AutocorrEstimate",
    "BiasEstimate",
    "BitStream",
    "Crossings",
    "DetectionTimes",
    "DetectorConfig",
    "DwellTimes",
    "OperatingPoint",
    "PValueCdf",
    "Proportion",
    "QrngConfig",
    "QrngState",
    "SamplerConfig",
    "TestReport",
    "WaitingTimeHistogram",
    "create_initial_state",
]
