"""Empirical estimators over bitstreams: bias, serial autocorrelation, n-gram entropy.

Large streams are processed in fixed-size chunks. Partial sums are integers
combined in chunk order, so every estimate is bit-exact reproducible and
independent of the chunk size.
"""

from collections.abc import Sequence
from typing import Any

import numpy as np
from scipy.stats import entropy, median_abs_deviation

from rff_qrng.errors import (
    ConstantStream,
    EmptyStream,
    InvalidBlockLength,
    InvalidInput,
    LagTooLarge,
)
from rff_qrng.models.reports import AutocorrEstimate, BiasEstimate
from rff_qrng.models.streams import BitStream

CHUNK_BITS = 1 << 22
MAX_NGRAM = 24


def bias(x: BitStream) -> BiasEstimate:
    """b = p1 - 1/2 with variance 1 / (4n)."""
    n = x.n_bits
    if n == 0:
        raise EmptyStream("bias of an empty stream")
    return BiasEstimate(value=x.count_ones() / n - 0.5, n=n, variance=1.0 / (4 * n))


def _popcount(bits: np.ndarray) -> int:
    return int(np.count_nonzero(bits))


def _lag_products(x: BitStream, lags: Sequence[int]) -> dict[int, int]:
    """Count of positions i < n - k with x_i = x_{i+k} = 1, for each lag k."""
    n = x.n_bits
    k_max = max(lags)
    totals = dict.fromkeys(lags, 0)
    for start, bits in x.iter_chunks(CHUNK_BITS, overlap=k_max):
        for k in lags:
            pairs = min(CHUNK_BITS, n - k - start)
            if pairs > 0:
                totals[k] += _popcount(bits[:pairs] & bits[k : k + pairs])
    return totals


def _check_lag(n: int, k: int) -> None:
    if k < 1:
        raise InvalidInput(f"lag must be >= 1, got {k}")
    if k >= n - 1:
        raise LagTooLarge(f"lag {k} needs more than {k + 1} bits, stream has {n}")


def _coefficient(n: int, k: int, s: int, head: int, tail: int, p: int) -> float:
    """
    a_k from integer sums, scaled by n**2 so everything stays exact:

        s    ones in the stream
        head ones among x_0 .. x_{n-k-1}
        tail ones among x_k .. x_{n-1}
        p    positions with x_i = x_{i+k} = 1
    """
    m = n - k
    numerator = n * n * p - n * s * (head + tail) + m * s * s
    denominator = n * head * (n - 2 * s) + m * s * s
    if denominator == 0:
        raise ConstantStream("autocorrelation is undefined for a constant stream")
    return min(1.0, max(-1.0, numerator / denominator))


def autocorr_profile(x: BitStream, k_max: int) -> list[AutocorrEstimate]:
    """
    Serial autocorrelation coefficients a_1 .. a_k_max in one pass.

    Both factors use the full-stream mean and both sums run over
    i = 0 .. n-k-1; the variance reported is 1 / (n - k - 1).

    Raises:
        LagTooLarge: k_max >= n - 1
        ConstantStream: every bit is equal
    """
    n = x.n_bits
    _check_lag(n, k_max)
    lags = list(range(1, k_max + 1))
    s = x.count_ones()
    first = x.unpack(0, k_max)
    last = x.unpack(n - k_max, n)
    products = _lag_products(x, lags)
    estimates = []
    for k in lags:
        head = s - _popcount(last[k_max - k :])
        tail = s - _popcount(first[:k])
        value = _coefficient(n, k, s, head, tail, products[k])
        estimates.append(
            AutocorrEstimate(lag=k, value=value, n=n, variance=1.0 / (n - k - 1))
        )
    return estimates


def autocorr(x: BitStream, k: int) -> AutocorrEstimate:
    """Lag-``k`` serial autocorrelation coefficient."""
    n = x.n_bits
    _check_lag(n, k)
    s = x.count_ones()
    head = s - _popcount(x.unpack(n - k, n))
    tail = s - _popcount(x.unpack(0, k))
    p = _lag_products(x, [k])[k]
    value = _coefficient(n, k, s, head, tail, p)
    return AutocorrEstimate(lag=k, value=value, n=n, variance=1.0 / (n - k - 1))


def _window_values(bits: np.ndarray, length: int, count: int) -> np.ndarray:
    values = np.zeros(count, dtype=np.uint32)
    for j in range(length):
        values <<= 1
        values |= bits[j : j + count]
    return values


def ngram_counts(x: BitStream, length: int, cyclic: bool = False) -> np.ndarray:
    """
    Occurrences of each ``length``-bit pattern (index = pattern as an integer,
    first bit most significant) over all overlapping windows.

    With ``cyclic`` the stream wraps around, giving exactly n windows.
    """
    if not 1 <= length <= MAX_NGRAM:
        raise InvalidBlockLength(
            f"block length must be in [1, {MAX_NGRAM}], got {length}"
        )
    n = x.n_bits
    if n < length:
        raise InvalidBlockLength(f"block length {length} exceeds stream length {n}")
    size = 1 << length
    counts = np.zeros(size, dtype=np.int64)
    for start, bits in x.iter_chunks(CHUNK_BITS, overlap=length - 1):
        windows = min(CHUNK_BITS, bits.size - length + 1)
        if windows > 0:
            counts += np.bincount(_window_values(bits, length, windows), minlength=size)
    if cyclic and length > 1:
        wrap = np.concatenate((x.unpack(n - length + 1, n), x.unpack(0, length - 1)))
        counts += np.bincount(_window_values(wrap, length, length - 1), minlength=size)
    return counts


def ngram_entropy(x: BitStream, L: int) -> float:
    """Shannon entropy in bits of the overlapping L-gram distribution (at most L)."""
    counts = ngram_counts(x, L)
    return float(entropy(counts, base=2))


def count_changes(x: BitStream) -> int:
    """Number of positions i with x_i != x_{i+1}."""
    changes = 0
    for _, bits in x.iter_chunks(CHUNK_BITS, overlap=1):
        changes += int(np.count_nonzero(np.diff(bits)))
    return changes


def measured_lag1_same_fraction(x: BitStream) -> float:
    """Fraction of neighbouring pairs with equal bits (the empirical s_1)."""
    if x.n_bits < 2:
        raise LagTooLarge(f"need at least 2 bits, got {x.n_bits}")
    return 1.0 - count_changes(x) / (x.n_bits - 1)


def summarize_strings(streams: Sequence[BitStream], k_max: int = 1) -> dict[str, Any]:
    """
    Per-string bias and a_1 .. a_k_max, with the median and the median
    absolute deviation (normal-scaled) across strings.
    """
    if not streams:
        raise EmptyStream("no strings to summarize")

    def spread(values: list[float]) -> dict[str, Any]:
        array = np.asarray(values)
        return {
            "median": float(np.median(array)),
            "mad": float(median_abs_deviation(array, scale="normal")),
            "values": values,
        }

    biases = [bias(x).value for x in streams]
    profiles = [autocorr_profile(x, k_max) for x in streams]
    return {
        "n_strings": len(streams),
        "bias": spread(biases),
        "autocorr": {
            str(k): spread([profile[k - 1].value for profile in profiles])
            for k in range(1, k_max + 1)
        },
    }
