"""Parameter sweeps over (f_bit, f_det): measured bias and autocorrelation
against the closed-form predictions.

Each grid point gets its own seed derived from the base seed and the point's
grid index. Points may run in worker processes; rows always come back in grid
order.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Any

import pandas as pd
from loguru import logger

from rff_qrng.analytic_model import a1_ideal, predicted_bias, xor_chain
from rff_qrng.errors import ConstantStream, InvalidInput
from rff_qrng.graphs.qrng_graph import simulate_qrng
from rff_qrng.models.config import QrngConfig
from rff_qrng.models.reports import SCHEMA_VERSION
from rff_qrng.rng import derive_seed
from rff_qrng.settings import SweepSettings
from rff_qrng.stats import autocorr_profile, bias

BIAS_COLUMNS = [
    "schema_version",
    "f_bit",
    "f_det",
    "lambda",
    "measured_bias",
    "stderr",
    "predicted_bias",
]
AUTOCORR_COLUMNS = [
    "schema_version",
    "f_bit",
    "f_det",
    "lambda",
    "k",
    "measured_ak",
    "stderr",
    "ideal_a1",
]


def point_seed(base_seed: int, index: int) -> int:
    return derive_seed(base_seed, index)


def _predicted(
    settings: SweepSettings, f_det: float, f_bit: float
) -> tuple[float, float | None]:
    """Predicted output (bias, a1); a1 is None when dead time makes it unmodelled."""
    b = predicted_bias(settings.analog(), f_det)
    a1 = a1_ideal(f_det / f_bit) if settings.dead_time == 0 else 0.0
    chained_b, chained_a = xor_chain(b, a1, settings.stages)[-1]
    return chained_b, (chained_a if settings.dead_time == 0 else None)


PointArgs = tuple[SweepSettings, int, float, float]


def _point_config(
    settings: SweepSettings, index: int, f_bit: float, f_det: float
) -> QrngConfig:
    seed = point_seed(settings.seed, index)
    return settings.qrng_config(f_det=f_det, f_bit=f_bit, seed=seed)


def _bias_point(args: PointArgs) -> list[dict[str, Any]]:
    settings, index, f_bit, f_det = args
    cfg = _point_config(settings, index, f_bit, f_det)
    estimate = bias(simulate_qrng(cfg))
    predicted, _ = _predicted(settings, f_det, f_bit)
    logger.bind(point=index).info(
        "bias point {}: f_bit={:g} f_det={:g} b={:.3e}",
        index,
        f_bit,
        f_det,
        estimate.value,
    )
    return [
        {
            "schema_version": SCHEMA_VERSION,
            "f_bit": f_bit,
            "f_det": f_det,
            "lambda": f_det / f_bit,
            "measured_bias": estimate.value,
            "stderr": estimate.stderr,
            "predicted_bias": predicted,
        }
    ]


def _autocorr_point(args: PointArgs) -> list[dict[str, Any]]:
    settings, index, f_bit, f_det = args
    cfg = _point_config(settings, index, f_bit, f_det)
    bits = simulate_qrng(cfg)
    _, ideal = _predicted(settings, f_det, f_bit)
    try:
        profile = [
            (e.lag, e.value, e.stderr) for e in autocorr_profile(bits, settings.k_max)
        ]
    except ConstantStream:
        logger.warning("point {} produced a constant stream; a_k undefined", index)
        profile = [(k, math.nan, math.nan) for k in range(1, settings.k_max + 1)]
    logger.bind(point=index).info(
        "autocorr point {}: f_bit={:g} f_det={:g} a1={:.3e}",
        index,
        f_bit,
        f_det,
        profile[0][1],
    )
    return [
        {
            "schema_version": SCHEMA_VERSION,
            "f_bit": f_bit,
            "f_det": f_det,
            "lambda": f_det / f_bit,
            "k": k,
            "measured_ak": value,
            "stderr": stderr,
            "ideal_a1": ideal if (k == 1 and ideal is not None) else math.nan,
        }
        for k, value, stderr in profile
    ]


def _run(settings: SweepSettings, worker: Any, columns: list[str]) -> pd.DataFrame:
    grid = settings.grid()
    if not grid:
        raise InvalidInput("sweep grid is empty")
    work = [(settings, i, f_bit, f_det) for i, (f_bit, f_det) in enumerate(grid)]
    logger.info("sweeping {} point(s) with {} job(s)", len(work), settings.jobs)
    if settings.jobs > 1:
        with ProcessPoolExecutor(max_workers=settings.jobs) as pool:
            chunks = list(pool.map(worker, work))
    else:
        chunks = [worker(item) for item in work]
    rows = [row for chunk in chunks for row in chunk]
    return pd.DataFrame(rows, columns=columns)


def bias_sweep(settings: SweepSettings) -> pd.DataFrame:
    """One row per grid point: measured bias, its standard error and the prediction."""
    return _run(settings, _bias_point, BIAS_COLUMNS)


def autocorr_sweep(settings: SweepSettings) -> pd.DataFrame:
    """
    One row per (grid point, k): measured a_k with its standard error, and the
    ideal a_1 on the k = 1 rows.
    """
    if settings.k_max < 1:
        raise InvalidInput(f"k_max must be >= 1, got {settings.k_max}")
    return _run(settings, _autocorr_point, AUTOCORR_COLUMNS)
