"""Files the CLI reads and writes: packed bitstreams, detection exports, JSON, CSV.

Every file is written to a temporary sibling and renamed into place, so a
reader never sees a partial file. Nothing written here embeds a timestamp;
identical inputs give identical bytes.
"""

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from rff_qrng.errors import InvalidInput
from rff_qrng.models.config import DetectorConfig
from rff_qrng.models.reports import SCHEMA_VERSION
from rff_qrng.models.streams import BitStream, DetectionTimes

PICOSECOND = 1e-12


def sidecar_path(path: Path) -> Path:
    """``data.bin`` -> ``data.bin.json``."""
    return path.with_name(path.name + ".json")


def atomic_write_bytes(path: Path, data: bytes) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def write_json(path: Path, payload: Any) -> Path:
    text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    return atomic_write_bytes(path, text.encode())


def read_json(path: Path) -> Any:
    return json.loads(path.read_text())


def write_csv(path: Path, frame: pd.DataFrame) -> Path:
    return atomic_write_bytes(path, frame.to_csv(index=False).encode())


def file_digest(path: Path) -> str:
    """SHA-256 of a file's contents as a hex string."""
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def write_bitstream(
    path: Path, x: BitStream, metadata: dict[str, Any] | None = None
) -> list[Path]:
    """
    Write packed bits to ``path`` and ``{"n_bits", "schema_version", ...}``
    to the JSON sidecar. Returns both paths.
    """
    atomic_write_bytes(path, x.packed.tobytes())
    sidecar = {**(metadata or {}), "schema_version": SCHEMA_VERSION, "n_bits": x.n_bits}
    return [path, write_json(sidecar_path(path), sidecar)]


def read_bitstream(path: Path) -> tuple[BitStream, dict[str, Any]]:
    """
    Read a packed bitstream. Without a sidecar every byte counts as 8 bits.

    Raises:
        InvalidInput: the file does not exist or disagrees with its sidecar
    """
    if not path.is_file():
        raise InvalidInput(f"bitstream file not found: {path}")
    packed = np.fromfile(path, dtype=np.uint8)
    meta_path = sidecar_path(path)
    metadata: dict[str, Any] = read_json(meta_path) if meta_path.is_file() else {}
    n_bits = int(metadata.get("n_bits", packed.size * 8))
    return BitStream(packed, n_bits), metadata


def write_detections(path: Path, d: DetectionTimes, cfg: DetectorConfig) -> list[Path]:
    """
    Export timestamps as headerless little-endian uint64 picoseconds, plus a
    sidecar with rate, dead time, seed and count.
    """
    picoseconds = np.rint(d.times / PICOSECOND).astype("<u8")
    atomic_write_bytes(path, picoseconds.tobytes())
    sidecar = {
        "schema_version": SCHEMA_VERSION,
        "rate": cfg.f_det,
        "dead_time": cfg.dead_time,
        "seed": cfg.seed,
        "count": len(d),
    }
    return [path, write_json(sidecar_path(path), sidecar)]


def read_detections(path: Path) -> DetectionTimes:
    """
    Read a picosecond export back as seconds.

    Raises:
        InvalidInput: missing or empty file, or timestamps that are not strictly
            increasing at picosecond resolution
    """
    if not path.is_file():
        raise InvalidInput(f"detection file not found: {path}")
    picoseconds = np.fromfile(path, dtype="<u8")
    if picoseconds.size == 0:
        raise InvalidInput(f"detection file is empty: {path}")
    meta_path = sidecar_path(path)
    metadata = read_json(meta_path) if meta_path.is_file() else {}
    times = picoseconds.astype(np.float64) * PICOSECOND
    return DetectionTimes(
        times=times,
        span=float(times[-1]),
        dead_time=float(metadata.get("dead_time", 0.0)),
        # Rounding both ends to whole picoseconds can shorten a gap.
        resolution=2 * PICOSECOND,
    )
