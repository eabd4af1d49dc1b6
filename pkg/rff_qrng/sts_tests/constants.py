"""Constants of the NIST SP 800-22 rev. 1a statistical tests.

Section numbers refer to NIST Special Publication 800-22 revision 1a,
"A Statistical Test Suite for Random and Pseudorandom Number Generators for
Cryptographic Applications" (April 2010).
"""

# 2.1.7, 2.3.7: recommended minimum sequence length.
FREQUENCY_MIN_BITS = 100
RUNS_MIN_BITS = 100

# 2.3.4 step (2): the runs test is skipped unless |pi - 1/2| < tau = 2 / sqrt(n).
RUNS_PREREQUISITE_SCALE = 2.0

# 2.6.4 step (3): 95% peak-height threshold T = sqrt(ln(1/0.05) n).
FFT_PEAK_QUANTILE = 0.95
FFT_MIN_BITS = 1000

# 2.12.7: choose m and n such that m < floor(log2 n) - 5.
APEN_MIN_M = 1
APEN_MAX_M = 16
APEN_LENGTH_MARGIN = 5

# 2.9.7: (minimum n, L) rows of the parameter table; Q = 10 * 2**L.
UNIVERSAL_LENGTH_TABLE: tuple[tuple[int, int], ...] = (
    (387_840, 6),
    (904_960, 7),
    (2_068_480, 8),
    (4_654_080, 9),
    (10_342_400, 10),
    (22_753_280, 11),
    (49_643_520, 12),
    (107_560_960, 13),
    (231_669_760, 14),
    (496_435_200, 15),
    (1_059_061_760, 16),
)
UNIVERSAL_MIN_BITS = UNIVERSAL_LENGTH_TABLE[0][0]
UNIVERSAL_INIT_FACTOR = 10

# 2.9.4 step (5): expectedValue(L) and variance(L), L = 1 .. 16.
UNIVERSAL_EXPECTED_VALUE: dict[int, float] = {
    1: 0.7326495,
    2: 1.5374383,
    3: 2.4016068,
    4: 3.3112247,
    5: 4.2534266,
    6: 5.2177052,
    7: 6.1962507,
    8: 7.1836656,
    9: 8.1764248,
    10: 9.1723243,
    11: 10.170032,
    12: 11.168765,
    13: 12.168070,
    14: 13.167693,
    15: 14.167488,
    16: 15.167379,
}
UNIVERSAL_VARIANCE: dict[int, float] = {
    1: 0.690,
    2: 1.338,
    3: 1.901,
    4: 2.358,
    5: 2.705,
    6: 2.954,
    7: 3.125,
    8: 3.238,
    9: 3.311,
    10: 3.356,
    11: 3.384,
    12: 3.401,
    13: 3.410,
    14: 3.416,
    15: 3.419,
    16: 3.421,
}

# 4.2.1 / 4.2.2: second-level analysis.
DEFAULT_ALPHA = 0.01
UNIFORMITY_BINS = 10
UNIFORMITY_MIN_SAMPLES = 10
PROPORTION_SIGMAS = 3.0

DEFAULT_BLOCK_SIZE = 1_000_000
