"""Simulated photon-detection streams.

Detections form a Poisson process thinned by a non-paralyzable dead time:
every gap is ``dead_time + Exp(r)`` where ``r`` is the pre-dead-time arrival
rate solved from the requested detection rate. The process starts with a
virtual detection at t = 0, so the first gap has the same law as the rest.
"""

import numpy as np
from loguru import logger

from rff_qrng.errors import InvalidConfig, InvalidInput, TooFewEvents
from rff_qrng.models.config import DetectorConfig, check_detector_rates
from rff_qrng.models.reports import WaitingTimeHistogram
from rff_qrng.models.streams import DetectionTimes
from rff_qrng.rng import DETECTION_STREAM, make_generator, open_uniform

# Bins with fewer counts are left out of the exponential fit.
MIN_FIT_COUNT = 10
# Histograms with more bins are refused.
MAX_HISTOGRAM_BINS = 10_000_000


def underlying_arrival_rate(cfg: DetectorConfig) -> float:
    """
    Pre-dead-time Poisson rate ``r`` whose non-paralyzable output rate
    ``r / (1 + r * tau)`` equals ``cfg.f_det``.

    Raises:
        InvalidConfig: f_det <= 0 or f_det * dead_time >= 1
    """
    check_detector_rates(cfg.f_det, cfg.dead_time)
    return cfg.f_det / (1.0 - cfg.f_det * cfg.dead_time)


def _enforce_min_gap(times: np.ndarray, previous: float, min_gap: float) -> None:
    """
    Push timestamps forward in place until every gap is positive and at least
    ``min_gap`` as computed in float64. Only float-resolution collisions are
    ever touched.
    """
    while True:
        gaps = np.diff(times, prepend=previous)
        bad = np.flatnonzero((gaps < min_gap) | (gaps <= 0.0))
        if bad.size == 0:
            return
        for i in bad:
            floor = times[i - 1] if i else previous
            candidate = floor + min_gap
            while candidate - floor < min_gap or candidate <= floor:
                candidate = np.nextafter(candidate, np.inf)
            times[i] = max(times[i], candidate)


class DetectionSource:
    """
    Incremental detection generator for one detector.

    Successive ``next_batch`` calls continue the same stream; the concatenated
    batches equal a single draw of the same total size.
    """

    def __init__(self, cfg: DetectorConfig, stream: int = DETECTION_STREAM) -> None:
        self.cfg = cfg
        self.arrival_rate = underlying_arrival_rate(cfg)
        self._rng = make_generator(cfg.seed, stream)
        # Running sum of raw gaps, kept apart from the (possibly nudged) timestamps.
        self._acc = 0.0
        self._last = 0.0
        self.emitted = 0

    @property
    def last_time(self) -> float:
        return self._last

    def next_batch(self, size: int) -> np.ndarray:
        """Draw the next ``size`` detection timestamps (seconds, absolute)."""
        gaps = -np.log(open_uniform(self._rng, size)) / self.arrival_rate
        if self.cfg.dead_time > 0.0:
            gaps += self.cfg.dead_time
        raw = np.cumsum(np.concatenate(([self._acc], gaps)))[1:]
        self._acc = float(raw[-1])
        times = raw.copy()
        _enforce_min_gap(times, self._last, self.cfg.dead_time)
        self._last = float(times[-1])
        self.emitted += size
        return times


def generate_detections(
    cfg: DetectorConfig, n_events: int, stream: int = DETECTION_STREAM
) -> DetectionTimes:
    """
    Generate ``n_events`` detections, deterministic for fixed
    ``(cfg, n_events, stream)``.

    Raises:
        InvalidConfig: invalid rates or ``n_events < 1``
    """
    if n_events < 1:
        raise InvalidConfig(f"n_events must be >= 1, got {n_events}")
    source = DetectionSource(cfg, stream)
    times = source.next_batch(n_events)
    logger.debug(
        "generated {} detections (f_det={:g}, arrival rate={:g}, dead time={:g})",
        n_events,
        cfg.f_det,
        source.arrival_rate,
        cfg.dead_time,
    )
    return DetectionTimes(times=times, span=float(times[-1]), dead_time=cfg.dead_time)


def waiting_time_histogram(d: DetectionTimes, bin_width: float) -> WaitingTimeHistogram:
    """
    Histogram consecutive gaps and fit an exponential to the tail.

    The fit is a sqrt(count)-weighted least-squares line through log(counts)
    over bins that start at or after the dead time and hold at least
    ``MIN_FIT_COUNT`` gaps. Beyond the dead time, gaps follow
    ``dead_time + Exp(r)``, so the fitted rate estimates the arrival rate
    ``r`` (equal to f_det when the dead time is zero).

    Raises:
        TooFewEvents: fewer than two detections, or too few populated tail bins
        InvalidInput: non-positive bin width, or more than
            ``MAX_HISTOGRAM_BINS`` bins needed to cover the longest gap
    """
    if len(d) < 2:
        raise TooFewEvents(f"need at least 2 detections, got {len(d)}")
    if not bin_width > 0:
        raise InvalidInput(f"bin_width must be positive, got {bin_width!r}")

    gaps = d.gaps()
    n_bins = int(np.ceil(gaps.max() / bin_width)) + 1
    if n_bins > MAX_HISTOGRAM_BINS:
        raise InvalidInput(
            f"bin_width {bin_width:g} s needs {n_bins} bins to cover the longest "
            f"gap of {gaps.max():g} s; at most {MAX_HISTOGRAM_BINS} are allowed"
        )
    edges = np.arange(n_bins + 1, dtype=np.float64) * bin_width
    counts, _ = np.histogram(gaps, bins=edges)

    first_bin = int(np.ceil(d.dead_time / bin_width - 1e-9))
    index = np.arange(n_bins)
    mask = (index >= first_bin) & (counts >= MIN_FIT_COUNT)
    if np.count_nonzero(mask) < 2:
        raise TooFewEvents("too few populated bins beyond the dead time to fit")

    slope, _ = np.polyfit(
        edges[:-1][mask] + bin_width / 2,
        np.log(counts[mask]),
        1,
        w=np.sqrt(counts[mask]),
    )
    return WaitingTimeHistogram(
        bin_width=bin_width,
        bin_edges=edges.tolist(),
        counts=counts.tolist(),
        fit_start=float(edges[first_bin]),
        fitted_rate=float(-slope),
    )
