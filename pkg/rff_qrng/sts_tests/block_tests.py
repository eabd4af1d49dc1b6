"""Per-block statistical tests returning a p-value in [0, 1].

Each test follows NIST SP 800-22 rev. 1a. Minimum block lengths are enforced
unless ``strict=False``, which exists for short published test vectors.
"""

import math

import numpy as np
from scipy.special import erfc, gammaincc

from rff_qrng.errors import BlockTooShort, InvalidBlockLength, PrerequisiteFailed
from rff_qrng.models.streams import BitStream
from rff_qrng.sts_tests import constants as C
from rff_qrng.stats import count_changes, ngram_counts


def _require(block: BitStream, minimum: int, name: str, strict: bool) -> int:
    n = block.n_bits
    if n == 0 or (strict and n < minimum):
        raise BlockTooShort(f"{name} test needs at least {minimum} bits, got {n}")
    return n


def _clip(p: float) -> float:
    return min(1.0, max(0.0, float(p)))


def frequency_test(block: BitStream, strict: bool = True) -> float:
    """Monobit test: p = erfc(|S_n| / sqrt(2n)), S_n = #ones - #zeros."""
    n = _require(block, C.FREQUENCY_MIN_BITS, "frequency", strict)
    s = 2 * block.count_ones() - n
    return _clip(erfc(abs(s) / math.sqrt(2.0 * n)))


def runs_test(block: BitStream, strict: bool = True) -> float:
    """
    Total number of runs V against its expectation 2 n pi (1 - pi).

    Raises:
        PrerequisiteFailed: |pi - 1/2| >= 2 / sqrt(n); NIST assigns p = 0
    """
    n = _require(block, C.RUNS_MIN_BITS, "runs", strict)
    pi = block.count_ones() / n
    if abs(pi - 0.5) >= C.RUNS_PREREQUISITE_SCALE / math.sqrt(n):
        raise PrerequisiteFailed(
            f"runs test prerequisite failed: ones fraction {pi:.6f}"
        )
    v = count_changes(block) + 1
    spread = 2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)
    return _clip(erfc(abs(v - 2.0 * n * pi * (1.0 - pi)) / spread))


def _phi(block: BitStream, m: int) -> float:
    counts = ngram_counts(block, m, cyclic=True)
    freq = counts[counts > 0] / block.n_bits
    return float(np.sum(freq * np.log(freq)))


def approximate_entropy_test(
    block: BitStream, m: int = 10, strict: bool = True
) -> float:
    """
    Approximate entropy with cyclic m- and (m+1)-gram counting.

    chi2 = 2n (ln 2 - ApEn(m)) with 2**m degrees of freedom; p from the upper
    regularized incomplete gamma function.

    Raises:
        InvalidBlockLength: m outside [1, 16], or block shorter than 2**(m + 5)
    """
    if not C.APEN_MIN_M <= m <= C.APEN_MAX_M:
        raise InvalidBlockLength(
            f"m must be in [{C.APEN_MIN_M}, {C.APEN_MAX_M}], got {m}"
        )
    n = block.n_bits
    if n == 0 or (strict and n < 1 << (m + C.APEN_LENGTH_MARGIN)):
        raise InvalidBlockLength(
            f"approximate entropy with m={m} needs at least "
            f"{1 << (m + C.APEN_LENGTH_MARGIN)} bits, got {n}"
        )
    apen = _phi(block, m) - _phi(block, m + 1)
    chi2 = 2.0 * n * (math.log(2.0) - apen)
    return _clip(gammaincc(2.0 ** (m - 1), chi2 / 2.0))


def fft_test(block: BitStream, strict: bool = True) -> float:
    """Spectral test: share of the first n/2 DFT moduli below the 95% peak threshold."""
    n = _require(block, C.FFT_MIN_BITS, "FFT", strict)
    x = 2.0 * block.unpack().astype(np.float64) - 1.0
    modulus = np.abs(np.fft.fft(x)[: n // 2])
    threshold = math.sqrt(math.log(1.0 / (1.0 - C.FFT_PEAK_QUANTILE)) * n)
    n0 = C.FFT_PEAK_QUANTILE * n / 2.0
    n1 = int(np.count_nonzero(modulus < threshold))
    q = C.FFT_PEAK_QUANTILE
    d = (n1 - n0) / math.sqrt(n * q * (1.0 - q) / 4.0)
    return _clip(erfc(abs(d) / math.sqrt(2.0)))


def universal_parameters(n: int) -> tuple[int, int]:
    """
    Block length L and initialization block count Q for an n-bit sequence.

    Raises:
        BlockTooShort: n below the smallest tabulated length
    """
    chosen = None
    for minimum, length in C.UNIVERSAL_LENGTH_TABLE:
        if n >= minimum:
            chosen = length
    if chosen is None:
        raise BlockTooShort(
            f"universal test needs at least {C.UNIVERSAL_MIN_BITS} bits, got {n}"
        )
    return chosen, C.UNIVERSAL_INIT_FACTOR * (1 << chosen)


def universal_statistic(block: BitStream, L: int, Q: int) -> tuple[float, int]:
    """
    Maurer's f_n: mean log2 distance to the previous occurrence of each test
    block's pattern, over the K = n // L - Q blocks after initialization.

    A pattern never seen before counts its distance from position 0.
    """
    K = block.n_bits // L - Q
    if K <= 0:
        raise BlockTooShort(f"no test blocks for L={L}, Q={Q}, n={block.n_bits}")
    bits = block.unpack(0, (Q + K) * L).reshape(-1, L).astype(np.int64)
    values = bits @ (1 << np.arange(L - 1, -1, -1, dtype=np.int64))

    order = np.argsort(values, kind="stable")
    ordered = values[order]
    previous = np.zeros(values.size, dtype=np.int64)
    repeat = np.flatnonzero(ordered[1:] == ordered[:-1]) + 1
    # Positions are 1-based; 0 stands for "never seen".
    previous[order[repeat]] = order[repeat - 1] + 1

    position = np.arange(Q + 1, Q + K + 1, dtype=np.int64)
    distance = position - previous[Q:]
    return float(np.sum(np.log2(distance)) / K), K


def universal_test(
    block: BitStream, L: int | None = None, Q: int | None = None, strict: bool = True
) -> float:
    """
    Maurer's universal statistical test with L and Q from the NIST table.

    Explicit ``L``/``Q`` are only honoured with ``strict=False``.
    """
    if strict or L is None:
        L, table_q = universal_parameters(block.n_bits)
        Q = table_q if strict or Q is None else Q
    elif Q is None:
        Q = C.UNIVERSAL_INIT_FACTOR * (1 << L)
    fn, K = universal_statistic(block, L, Q)
    c = 0.7 - 0.8 / L + (4.0 + 32.0 / L) * K ** (-3.0 / L) / 15.0
    sigma = c * math.sqrt(C.UNIVERSAL_VARIANCE[L] / K)
    deviation = abs(fn - C.UNIVERSAL_EXPECTED_VALUE[L])
    return _clip(erfc(deviation / (math.sqrt(2.0) * sigma)))
