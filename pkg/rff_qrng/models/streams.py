"""Immutable array-backed values: detection times, threshold crossings, bitstreams."""

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import Any

import numpy as np

from rff_qrng.errors import InvalidInput

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class DetectionTimes:
    """
    Photon-detection timestamps in seconds.

    The array is taken over and made read-only. Timestamps are strictly
    increasing and consecutive gaps are at least ``dead_time``, less
    ``resolution`` for timestamps read back from a quantized export.

    Raises:
        InvalidInput: a timestamp does not follow its predecessor, or a gap is
            shorter than the dead time
    """

    times: np.ndarray
    span: float
    dead_time: float = 0.0
    resolution: float = 0.0

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        gaps = np.diff(times)
        bad = np.flatnonzero(gaps <= 0.0)
        if bad.size:
            i = int(bad[0]) + 1
            raise InvalidInput(
                f"detection {i} at {times[i]:.6e} s does not follow detection "
                f"{i - 1} at {times[i - 1]:.6e} s"
            )
        short = np.flatnonzero(gaps < self.dead_time - self.resolution)
        if short.size:
            i = int(short[0]) + 1
            raise InvalidInput(
                f"gap {gaps[i - 1]:.6e} s before detection {i} is shorter than "
                f"the dead time {self.dead_time:.6e} s"
            )
        object.__setattr__(self, "times", _frozen(times))

    def __len__(self) -> int:
        return int(self.times.size)

    def gaps(self) -> np.ndarray:
        """Consecutive inter-detection gaps."""
        return np.diff(self.times)

    def measured_rate(self) -> float:
        """Detections per second over the simulated span."""
        return len(self) / self.span


@dataclass(frozen=True, eq=False)
class Crossings:
    """Times at which the DFF input changes logical value, with directions."""

    times: np.ndarray
    rising: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "times", _frozen(np.asarray(self.times, np.float64)))
        object.__setattr__(self, "rising", _frozen(np.asarray(self.rising, bool)))

    def __len__(self) -> int:
        return int(self.times.size)


@dataclass(frozen=True, eq=False)
class BitStream:
    """
    Packed binary sequence with an exact bit count.

    Bits are packed 8 per byte, first bit in the most significant position of
    byte 0; unused low bits of the last byte are zero.
    """

    packed: np.ndarray
    n_bits: int

    def __post_init__(self) -> None:
        if self.n_bits < 0:
            raise InvalidInput(f"n_bits must be non-negative, got {self.n_bits}")
        packed = np.asarray(self.packed, dtype=np.uint8)
        expected = -(-self.n_bits // 8)
        if packed.size != expected:
            raise InvalidInput(
                f"{self.n_bits} bits need {expected} bytes, got {packed.size}"
            )
        tail = self.n_bits % 8
        if tail and packed[-1] & (0xFF >> tail):
            packed = packed.copy()
            packed[-1] &= (0xFF << (8 - tail)) & 0xFF
        object.__setattr__(self, "packed", _frozen(packed))

    @classmethod
    def from_bits(cls, bits: Iterable[int] | np.ndarray) -> "BitStream":
        array = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits))
        array = array.astype(bool, copy=False).ravel()
        return cls(np.packbits(array), int(array.size))

    @classmethod
    def from_string(cls, text: str) -> "BitStream":
        """Parse a string of '0'/'1' characters (whitespace ignored)."""
        digits = "".join(text.split())
        if set(digits) - {"0", "1"}:
            raise InvalidInput(f"not a bit string: {text!r}")
        return cls.from_bits(np.frombuffer(digits.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def zeros(cls, n_bits: int) -> "BitStream":
        return cls(np.zeros(-(-n_bits // 8), dtype=np.uint8), n_bits)

    @classmethod
    def ones(cls, n_bits: int) -> "BitStream":
        return cls(np.full(-(-n_bits // 8), 0xFF, dtype=np.uint8), n_bits)

    def __len__(self) -> int:
        return self.n_bits

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return self.n_bits == other.n_bits and np.array_equal(self.packed, other.packed)

    __hash__ = None  # type: ignore[assignment]

    def unpack(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Return bits ``[start, stop)`` as a uint8 array of 0/1."""
        stop = self.n_bits if stop is None else min(stop, self.n_bits)
        if start < 0 or start > stop:
            raise InvalidInput(f"bad bit range [{start}, {stop})")
        first, last = start // 8, -(-stop // 8)
        bits = np.unpackbits(self.packed[first:last])
        offset = start - first * 8
        return bits[offset : offset + (stop - start)]

    def slice(self, start: int, stop: int) -> "BitStream":
        if start % 8 == 0 and 0 <= start <= stop <= self.n_bits:
            packed = self.packed[start // 8 : -(-stop // 8)].copy()
            return BitStream(packed, stop - start)
        return BitStream.from_bits(self.unpack(start, stop))

    def complement(self) -> "BitStream":
        return BitStream(np.bitwise_not(self.packed), self.n_bits)

    def count_ones(self) -> int:
        return int(_POPCOUNT[self.packed].sum(dtype=np.int64))

    def iter_chunks(
        self, size: int, overlap: int = 0
    ) -> Iterator[tuple[int, np.ndarray]]:
        """
        Yield ``(start, bits)`` covering the stream in steps of ``size`` bits.

        Each chunk extends ``overlap`` bits past its step (clipped at the end),
        so lagged statistics can be accumulated without a second pass.
        """
        if size <= 0 or size % 8:
            raise InvalidInput(f"chunk size must be a positive multiple of 8: {size}")
        for start in range(0, self.n_bits, size):
            yield start, self.unpack(start, start + size + overlap)

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.unpack())
