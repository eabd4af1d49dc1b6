"""Run the implemented tests over non-overlapping blocks and aggregate the results."""

from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import Any

import numpy as np
from loguru import logger

from rff_qrng.errors import (
    InvalidInput,
    NoCompleteBlock,
    PrerequisiteFailed,
    TooFewSamples,
)
from rff_qrng.models.reports import SCHEMA_VERSION, Proportion, TestReport
from rff_qrng.models.streams import BitStream
from rff_qrng.sts_tests import constants as C
from rff_qrng.sts_tests.aggregation import proportion_threshold, uniformity_p
from rff_qrng.sts_tests.block_tests import (
    approximate_entropy_test,
    fft_test,
    frequency_test,
    runs_test,
    universal_parameters,
    universal_test,
)

TEST_NAMES: tuple[str, ...] = (
    "Frequency",
    "Runs",
    "ApproximateEntropy",
    "FFT",
    "Universal",
)

UNIMPLEMENTED_TESTS: tuple[str, ...] = (
    "BlockFrequency",
    "CumulativeSums",
    "LongestRun",
    "Rank",
    "NonOverlappingTemplate",
    "OverlappingTemplate",
    "Serial",
    "LinearComplexity",
    "RandomExcursions",
    "RandomExcursionsVariant",
)

_SIMPLE_TESTS: dict[str, Callable[..., float]] = {
    "Frequency": frequency_test,
    "Runs": runs_test,
    "FFT": fft_test,
    "Universal": universal_test,
}

# (test name, parameters) in report order.
Selection = list[tuple[str, dict[str, int]]]


def _selection(tests: Sequence[str], m_values: Sequence[int]) -> Selection:
    unknown = sorted(set(tests) - set(TEST_NAMES))
    if unknown:
        raise InvalidInput(f"unknown tests: {', '.join(unknown)}")
    selection: Selection = []
    for name in TEST_NAMES:
        if name not in tests:
            continue
        if name == "ApproximateEntropy":
            selection.extend((name, {"m": m}) for m in m_values)
        else:
            selection.append((name, {}))
    return selection


def _block_pvalues(args: tuple[bytes, int, Selection, bool]) -> list[float]:
    """p-value of every selected test on one block (runs in worker processes)."""
    packed, n_bits, selection, strict = args
    block = BitStream(np.frombuffer(packed, dtype=np.uint8).copy(), n_bits)
    results = []
    for name, params in selection:
        try:
            if name == "ApproximateEntropy":
                p = approximate_entropy_test(block, params["m"], strict=strict)
            else:
                p = _SIMPLE_TESTS[name](block, strict=strict)
        except PrerequisiteFailed:
            p = 0.0
        results.append(p)
    return results


def run_battery(
    x: BitStream,
    block_size: int = C.DEFAULT_BLOCK_SIZE,
    tests: Sequence[str] = TEST_NAMES,
    m_values: Sequence[int] = (10,),
    alpha: float = C.DEFAULT_ALPHA,
    jobs: int = 1,
    strict: bool = True,
) -> list[TestReport]:
    """
    Split ``x`` into complete non-overlapping blocks, run every selected test on
    each and aggregate per test. Trailing bits that do not fill a block are
    ignored. Results are ordered by block index regardless of ``jobs``.

    Raises:
        NoCompleteBlock: fewer than ``block_size`` bits
        BlockTooShort: Universal selected with blocks below its minimum length
    """
    if block_size < 1:
        raise NoCompleteBlock(f"block size must be positive, got {block_size}")
    n_blocks = x.n_bits // block_size
    if n_blocks == 0:
        raise NoCompleteBlock(
            f"stream of {x.n_bits} bits holds no complete {block_size}-bit block"
        )
    selection = _selection(tests, m_values)
    if strict and "Universal" in tests:
        universal_parameters(block_size)

    def work() -> list[tuple[bytes, int, Selection, bool]]:
        if block_size % 8 == 0:
            step = block_size // 8
            return [
                (
                    x.packed[i * step : (i + 1) * step].tobytes(),
                    block_size,
                    selection,
                    strict,
                )
                for i in range(n_blocks)
            ]
        return [
            (
                x.slice(i * block_size, (i + 1) * block_size).packed.tobytes(),
                block_size,
                selection,
                strict,
            )
            for i in range(n_blocks)
        ]

    logger.info(
        "running {} test(s) on {} block(s) of {} bits with {} job(s)",
        len(selection),
        n_blocks,
        block_size,
        jobs,
    )
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunksize = max(1, n_blocks // (4 * jobs))
            rows = list(pool.map(_block_pvalues, work(), chunksize=chunksize))
    else:
        rows = [_block_pvalues(item) for item in work()]

    reports = []
    for column, (name, params) in enumerate(selection):
        p_values = [row[column] for row in rows]
        try:
            u: float | None = uniformity_p(p_values)
        except TooFewSamples:
            u = None
        passed = sum(1 for p in p_values if p >= alpha)
        report = TestReport(
            test_name=name,
            parameters=params,
            block_size=block_size,
            alpha=alpha,
            p_values=p_values,
            uniformity_p=u,
            proportion=Proportion(
                passed=passed,
                total=len(p_values),
                threshold=proportion_threshold(len(p_values), alpha),
            ),
        )
        logger.bind(test=report.label).info(
            "{}: {}/{} passed (threshold {}), uniformity p={}",
            report.label,
            passed,
            len(p_values),
            report.proportion.threshold,
            "n/a" if u is None else f"{u:.4g}",
        )
        reports.append(report)
    return reports


def battery_summary(reports: Sequence[TestReport]) -> dict[str, Any]:
    """JSON-ready overview of a battery run."""
    return {
        "schema_version": SCHEMA_VERSION,
        "passed": all(r.passed for r in reports),
        "tests": [
            {
                "test": r.label,
                "block_size": r.block_size,
                "n_blocks": len(r.p_values),
                "uniformity_p": r.uniformity_p,
                "proportion": {
                    "passed": r.proportion.passed,
                    "total": r.proportion.total,
                    "threshold": r.proportion.threshold,
                },
                "passed": r.passed,
            }
            for r in reports
        ],
        "unimplemented_tests": list(UNIMPLEMENTED_TESTS),
    }
