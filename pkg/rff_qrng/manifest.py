"""Run manifests: what was run, with which settings, producing which bytes.

A manifest sits next to a command's primary output as
``<output>.manifest.json``. Output paths are stored relative to the
manifest's directory so a replay can regenerate them elsewhere and compare
digests.
"""

from datetime import datetime
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from rff_qrng.bitio import atomic_write_bytes, file_digest
from rff_qrng.errors import InvalidInput
from rff_qrng.models.reports import SCHEMA_VERSION


class RunManifest(BaseModel):
    """
    Attributes:
        command: CLI subcommand that produced the outputs
        settings: Fully resolved settings, including derived seeds and phase
        seed: Base seed, when the command has one
        outputs: Relative output path -> SHA-256
        inputs: Input path -> SHA-256 at run time
    """

    model_config = ConfigDict(frozen=True)

    schema_version: int = SCHEMA_VERSION
    command: str
    settings: dict[str, Any]
    seed: int | None = None
    tool_version: str
    started_at: datetime
    finished_at: datetime
    primary_output: str
    outputs: dict[str, str] = Field(default_factory=dict)
    inputs: dict[str, str] = Field(default_factory=dict)


def manifest_path_for(output: Path) -> Path:
    return output.with_name(output.name + ".manifest.json")


def digest_outputs(base: Path, paths: list[Path]) -> dict[str, str]:
    """Relative path (POSIX form) -> digest, for every regular file in ``paths``."""
    return {
        path.relative_to(base).as_posix(): file_digest(path)
        for path in sorted(paths)
        if path.is_file()
    }


def write_manifest(manifest: RunManifest, path: Path) -> Path:
    text = manifest.model_dump_json(indent=2) + "\n"
    return atomic_write_bytes(path, text.encode())


def load_manifest(path: Path) -> RunManifest:
    if not path.is_file():
        raise InvalidInput(f"manifest not found: {path}")
    return RunManifest.model_validate_json(path.read_text())
