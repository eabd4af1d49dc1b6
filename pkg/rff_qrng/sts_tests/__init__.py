"""Statistical tests from NIST SP 800-22 and their block-wise aggregation."""

from rff_qrng.sts_tests.aggregation import (
    Aggregate,
    proportion_threshold,
    pvalue_cdf,
    uniformity_and_proportion,
    uniformity_p,
)
from rff_qrng.sts_tests.battery import (
    TEST_NAMES,
    UNIMPLEMENTED_TESTS,
    battery_summary,
    run_battery,
)
from rff_qrng.sts_tests.block_tests import (
    approximate_entropy_test,
    fft_test,
    frequency_test,
    runs_test,
    universal_parameters,
    universal_statistic,
    universal_test,
)

__all__ = [
    "TEST_NAMES",
    "UNIMPLEMENTED_TESTS",
    "Aggregate",
    "approximate_entropy_test",
    "battery_summary",
    "fft_test",
    "frequency_test",
    "proportion_threshold",
    "pvalue_cdf",
    "run_battery",
    "runs_test",
    "uniformity_and_proportion",
    "uniformity_p",
    "universal_parameters",
    "universal_statistic",
    "universal_test",
]
