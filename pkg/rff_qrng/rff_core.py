"""The random flip-flop: a TFF toggled by detections, sampled by a DFF.

The TFF output ramps linearly between levels. The DFF sees a new logical
value once the ramp crosses the threshold fraction ``eta`` of the swing, i.e.
``eta * t_rise`` after a rising toggle and ``(1 - eta) * t_fall`` after a
falling one. A clock edge that coincides exactly with a crossing still reads
the pre-transition value.
"""

from collections.abc import Iterable
from functools import reduce

import numpy as np
from loguru import logger

from rff_qrng.errors import InvalidInput, LengthMismatch, NonMonotonicCrossings
from rff_qrng.event_source import DetectionSource
from rff_qrng.models.config import AnalogTimingModel, DetectorConfig, SamplerConfig
from rff_qrng.models.streams import BitStream, Crossings, DetectionTimes
from rff_qrng.rng import DETECTION_STREAM

DEFAULT_CHUNK_BITS = 1 << 20


def _crossings(
    times: np.ndarray, first_index: int, initial_state: int, analog: AnalogTimingModel
) -> tuple[np.ndarray, np.ndarray]:
    """Crossing times and directions for detections numbered from ``first_index``."""
    index = np.arange(first_index, first_index + times.size, dtype=np.int64)
    rising = (initial_state ^ ((index + 1) & 1)).astype(bool)
    offsets = np.where(rising, analog.rising_offset, analog.falling_offset)
    return times + offsets, rising


def _check_order(crossings: np.ndarray, previous: float = -np.inf) -> None:
    # Equal times only arise from float rounding; their toggles cancel by parity.
    steps = np.diff(crossings, prepend=previous)
    bad = np.flatnonzero(steps < 0)
    if bad.size:
        i = int(bad[0])
        raise NonMonotonicCrossings(
            f"crossing {i} at {crossings[i]:.6e} s precedes the previous crossing; "
            "transitions overlap (detections closer than the rise/fall offsets)"
        )


def threshold_crossings(
    d: DetectionTimes, a: AnalogTimingModel, initial_state: int = 0
) -> Crossings:
    """
    Map TFF toggles to the instants the DFF input changes logical value.

    Detection ``i`` leaves the TFF in state ``initial_state ^ ((i + 1) & 1)``;
    the transition is rising when that state is 1.

    Raises:
        NonMonotonicCrossings: a later crossing would land before an earlier one
    """
    times, rising = _crossings(d.times, 0, initial_state, a)
    _check_order(times)
    return Crossings(times=times, rising=rising)


def _clock_edges(s: SamplerConfig, start: int, stop: int) -> np.ndarray:
    return s.phase + np.arange(start, stop, dtype=np.float64) / s.f_bit


def _sample(crossings: np.ndarray, edges: np.ndarray, level: int) -> np.ndarray:
    # side="left" counts crossings strictly before each edge.
    seen = np.searchsorted(crossings, edges, side="left")
    return (level ^ (seen & 1)).astype(np.uint8)


def sample_bits(
    crossings: Crossings, s: SamplerConfig, n_bits: int, initial_state: int = 0
) -> BitStream:
    """
    Sample the DFF input at ``phase + k / f_bit`` for ``k = 0 .. n_bits - 1``.

    Bit ``k`` is ``initial_state`` before the first crossing and afterwards
    the direction of the last crossing strictly before edge ``k``.

    Raises:
        InvalidInput: the first crossing leaves the level it starts from
            (rising from 1 or falling from 0)
    """
    rising = crossings.rising
    if rising.size == 0:
        return BitStream.from_bits(np.full(n_bits, initial_state, dtype=np.uint8))
    if bool(rising[0]) == bool(initial_state):
        raise InvalidInput(
            f"first crossing is {'rising' if rising[0] else 'falling'} but the "
            f"initial state is {initial_state}; crossings were built for the "
            "other initial state"
        )
    seen = np.searchsorted(crossings.times, _clock_edges(s, 0, n_bits), side="left")
    after = rising[np.maximum(seen - 1, 0)]
    bits = np.where(seen == 0, initial_state, after).astype(np.uint8)
    return BitStream.from_bits(bits)


def xor_streams(x: BitStream, y: BitStream) -> BitStream:
    """Bitwise exclusive-or of two equal-length streams."""
    if x.n_bits != y.n_bits:
        raise LengthMismatch(f"cannot XOR {x.n_bits} bits with {y.n_bits} bits")
    return BitStream(np.bitwise_xor(x.packed, y.packed), x.n_bits)


def xor_many(streams: Iterable[BitStream]) -> BitStream:
    """Left fold of ``xor_streams`` in the given order."""
    streams = list(streams)
    if not streams:
        raise InvalidInput("xor_many needs at least one stream")
    return reduce(xor_streams, streams)


class StageSimulator:
    """
    Chunked single-stage TRFF simulation in bounded memory.

    Detections are drawn in batches only as far as the clock has advanced;
    crossings that lie beyond the current chunk are carried over. The output
    equals ``sample_bits(threshold_crossings(generate_detections(...)))`` on
    the same detector seed bit for bit.
    """

    def __init__(
        self,
        detector: DetectorConfig,
        analog: AnalogTimingModel,
        sampler: SamplerConfig,
        initial_state: int = 0,
        chunk_bits: int = DEFAULT_CHUNK_BITS,
        stream: int = DETECTION_STREAM,
    ) -> None:
        if chunk_bits <= 0 or chunk_bits % 8:
            raise InvalidInput(
                f"chunk_bits must be a positive multiple of 8: {chunk_bits}"
            )
        self.detector = detector
        self.analog = analog
        self.sampler = sampler
        self.initial_state = initial_state
        self.chunk_bits = chunk_bits
        self.stream = stream
        lam = detector.f_det / sampler.f_bit
        self.batch_size = max(4096, int(lam * chunk_bits * 1.05) + 1024)

    def run(self, n_bits: int) -> BitStream:
        """Simulate ``n_bits`` output bits."""
        if n_bits < 1:
            raise InvalidInput(f"n_bits must be >= 1, got {n_bits}")
        source = DetectionSource(self.detector, self.stream)
        packed = np.empty(-(-n_bits // 8), dtype=np.uint8)
        pending = np.empty(0, dtype=np.float64)
        last_crossing = -np.inf
        consumed = 0

        for start in range(0, n_bits, self.chunk_bits):
            stop = min(start + self.chunk_bits, n_bits)
            edges = _clock_edges(self.sampler, start, stop)
            horizon = edges[-1]
            # Crossings never precede their detection, so once a detection lies
            # past the last edge nothing later can be seen by this chunk.
            while source.last_time <= horizon:
                first = source.emitted
                times, _ = _crossings(
                    source.next_batch(self.batch_size),
                    first,
                    self.initial_state,
                    self.analog,
                )
                _check_order(times, last_crossing)
                last_crossing = float(times[-1])
                pending = np.concatenate((pending, times))

            level = self.initial_state ^ (consumed & 1)
            bits = _sample(pending, edges, level)
            packed[start // 8 : -(-stop // 8)] = np.packbits(bits)

            used = int(np.searchsorted(pending, horizon, side="left"))
            consumed += used
            pending = pending[used:]
            logger.debug(
                "chunk [{}, {}) sampled; {} crossings seen, {} pending",
                start,
                stop,
                consumed,
                pending.size,
            )

        logger.debug(
            "stage seed {} done: {} detections for {} bits",
            self.detector.seed,
            source.emitted,
            n_bits,
        )
        return BitStream(packed, n_bits)
