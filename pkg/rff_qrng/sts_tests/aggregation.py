"""Second-level analysis of per-block p-values: sorted CDF, uniformity, proportion."""

import math
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
from scipy.stats import chisquare

from rff_qrng.errors import EmptyInput, TooFewSamples
from rff_qrng.models.reports import PValueCdf
from rff_qrng.sts_tests import constants as C


class Aggregate(NamedTuple):
    uniformity_p: float
    passed: int
    threshold: int


def pvalue_cdf(p: Sequence[float]) -> PValueCdf:
    """Ascending p-values paired with ``rank / total`` (rank starting at 1)."""
    if len(p) == 0:
        raise EmptyInput("no p-values to sort")
    ordered = sorted(float(v) for v in p)
    total = len(ordered)
    return PValueCdf(points=[((i + 1) / total, v) for i, v in enumerate(ordered)])


def proportion_threshold(m: int, alpha: float = C.DEFAULT_ALPHA) -> int:
    """
    Minimum number of passing samples out of ``m``: the 3-sigma lower bound
    of a binomial proportion ``1 - alpha``, rounded down, and at least one.

    Raises:
        TooFewSamples: ``m < 1``
    """
    if m < 1:
        raise TooFewSamples(f"need at least one sample, got {m}")
    p_hat = 1.0 - alpha
    bound = p_hat - C.PROPORTION_SIGMAS * math.sqrt(p_hat * alpha / m)
    return max(1, math.floor(m * bound))


def uniformity_p(p: Sequence[float]) -> float:
    """Chi-square goodness of fit of p-values to 10 equal bins on [0, 1]."""
    if len(p) < C.UNIFORMITY_MIN_SAMPLES:
        raise TooFewSamples(
            f"uniformity needs at least {C.UNIFORMITY_MIN_SAMPLES} p-values, "
            f"got {len(p)}"
        )
    values = np.asarray(p, dtype=np.float64)
    bins = np.minimum(
        (values * C.UNIFORMITY_BINS).astype(np.int64), C.UNIFORMITY_BINS - 1
    )
    counts = np.bincount(bins, minlength=C.UNIFORMITY_BINS)
    return float(chisquare(counts).pvalue)


def uniformity_and_proportion(
    p: Sequence[float], alpha: float = C.DEFAULT_ALPHA
) -> Aggregate:
    """
    Uniformity p-value, count of samples with ``p >= alpha`` and the
    proportion threshold for this many samples.

    Raises:
        TooFewSamples: fewer than 10 p-values
    """
    u = uniformity_p(p)
    passed = sum(1 for v in p if v >= alpha)
    return Aggregate(
        uniformity_p=u,
        passed=passed,
        threshold=proportion_threshold(len(p), alpha),
    )
