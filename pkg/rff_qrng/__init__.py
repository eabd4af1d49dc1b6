"""RFF QRNG - simulation and analysis of random-flip-flop quantum RNGs."""

__version__ = "0.1.0"

from rff_qrng.models import AnalogTimingModel, BitStream, DetectorConfig, QrngConfig

__all__ = [
    "AnalogTimingModel",
    "BitStream",
    "DetectorConfig",
    "QrngConfig",
    "__version__",
]
