"""Exception hierarchy for the RFF QRNG toolkit.

Every error raised on purpose by the package derives from ``RffQrngError``.
None of them derive from ``ValueError``, so pydantic validators let them
propagate unchanged.
"""


class RffQrngError(Exception):
    """Base class for all toolkit errors."""


class InvalidConfig(RffQrngError):
    """A configuration violates a domain invariant (e.g. f_det * dead_time >= 1)."""


class InvalidInput(RffQrngError):
    """Arguments to an analytic formula are outside its domain."""


class TooFewEvents(RffQrngError):
    """A detection stream is too short for the requested analysis."""


class NonMonotonicCrossings(RffQrngError):
    """Threshold crossings would come out of order (overlapping transitions)."""


class LengthMismatch(RffQrngError):
    """Two bitstreams that must have equal length do not."""


class EmptyStream(RffQrngError):
    """An estimator was given a stream with no bits."""


class ConstantStream(RffQrngError):
    """Autocorrelation is undefined for a constant stream."""


class LagTooLarge(RffQrngError):
    """The requested lag leaves too few bit pairs."""


class InvalidBlockLength(RffQrngError):
    """An n-gram / template length is outside the supported range."""


class BlockTooShort(RffQrngError):
    """A statistical test block is below the test's minimum length."""


class PrerequisiteFailed(RffQrngError):
    """A test's prerequisite check failed; NIST convention assigns p = 0."""


class NoCompleteBlock(RffQrngError):
    """The input holds no complete block of the requested size."""


class EmptyInput(RffQrngError):
    """An aggregation was given no values."""


class TooFewSamples(RffQrngError):
    """Too few p-values for a meaningful uniformity check."""


class ManifestMismatch(RffQrngError):
    """Re-running a manifest produced outputs with different digests."""
