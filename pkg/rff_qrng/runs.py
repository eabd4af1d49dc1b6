"""Command executors shared by the CLI and ``replay``.

Each executor takes resolved settings and an output path and returns the
files it wrote. ``run_and_record`` wraps an executor with a manifest;
``replay`` re-runs a manifest into a scratch directory and compares digests.
"""

import tempfile
from collections.abc import Callable
from dataclasses import dataclass, field
from datetime import datetime

try:
    from datetime import UTC
except ImportError:  # Python < 3.11
    from datetime import timezone

    UTC = timezone.utc
from pathlib import Path
from typing import Any

import pandas as pd
from loguru import logger
from pydantic import BaseModel

from rff_qrng import __version__
from rff_qrng.analytic_model import predict
from rff_qrng.bitio import (
    file_digest,
    read_bitstream,
    write_bitstream,
    write_csv,
    write_detections,
    write_json,
)
from rff_qrng.errors import ConstantStream, ManifestMismatch
from rff_qrng.event_source import (
    generate_detections,
    underlying_arrival_rate,
    waiting_time_histogram,
)
from rff_qrng.graphs.qrng_graph import stream_qrng_graph
from rff_qrng.manifest import (
    RunManifest,
    digest_outputs,
    load_manifest,
    manifest_path_for,
    write_manifest,
)
from rff_qrng.models.config import DetectorConfig
from rff_qrng.models.reports import SCHEMA_VERSION, TestReport
from rff_qrng.models.state import (
    create_initial_state,
    format_state_display,
    merge_stage_streams,
)
from rff_qrng.models.streams import BitStream
from rff_qrng.settings import (
    AnalyzeSettings,
    BatterySettings,
    DetectSettings,
    SimulationSettings,
    SweepSettings,
)
from rff_qrng.stats import autocorr_profile, bias, ngram_entropy
from rff_qrng.sts_tests.aggregation import pvalue_cdf
from rff_qrng.sts_tests.battery import battery_summary, run_battery
from rff_qrng.sweeps import autocorr_sweep, bias_sweep

Progress = Callable[[str], None]


@dataclass
class RunResult:
    outputs: list[Path]
    summary: dict[str, Any] = field(default_factory=dict)
    ok: bool = True
    details: str | None = None


def _step(on_progress: Progress | None, label: str) -> None:
    if on_progress is not None:
        on_progress(label)


def execute_generate(
    settings: SimulationSettings, out: Path, on_progress: Progress | None = None
) -> RunResult:
    """Simulate the QRNG and write the packed bitstream with its sidecar."""
    cfg = settings.qrng_config()
    state = create_initial_state(cfg)
    for update in stream_qrng_graph(cfg, summarize=True):
        for node, changes in update.items():
            _step(on_progress, node)
            for key, value in (changes or {}).items():
                if key == "stage_streams":
                    state["stage_streams"] = merge_stage_streams(
                        state["stage_streams"], value
                    )
                else:
                    state[key] = value  # type: ignore[literal-required]
    bitstream = state["bitstream"]
    assert bitstream is not None
    outputs = write_bitstream(
        out, bitstream, {"seed": cfg.seed, "config": cfg.model_dump(mode="json")}
    )
    return RunResult(
        outputs=outputs,
        summary=state["metadata"] or {},
        details=format_state_display(state),
    )


def execute_detect(
    settings: DetectSettings, out: Path, on_progress: Progress | None = None
) -> RunResult:
    """Export detection timestamps and fit the waiting-time histogram."""
    cfg = DetectorConfig(
        f_det=settings.f_det, dead_time=settings.dead_time, seed=settings.seed
    )
    _step(on_progress, f"{settings.n_events} detections")
    detections = generate_detections(cfg, settings.n_events)
    outputs = write_detections(out, detections, cfg)
    _step(on_progress, "waiting-time histogram")
    histogram = waiting_time_histogram(detections, settings.bin_width)
    gaps = detections.gaps()
    summary = {
        "schema_version": SCHEMA_VERSION,
        "count": len(detections),
        "measured_rate": detections.measured_rate(),
        "arrival_rate": underlying_arrival_rate(cfg),
        "fitted_rate": histogram.fitted_rate,
        "min_gap": float(gaps.min()) if gaps.size else None,
        "mean_gap": float(gaps.mean()) if gaps.size else None,
    }
    hist_path = out.with_name(out.name + ".histogram.json")
    payload = {**summary, "histogram": histogram.model_dump()}
    outputs.append(write_json(hist_path, payload))
    return RunResult(outputs=outputs, summary=summary)


def execute_sweep_bias(
    settings: SweepSettings, out: Path, on_progress: Progress | None = None
) -> RunResult:
    _step(on_progress, f"{len(settings.grid())} grid point(s)")
    frame = bias_sweep(settings)
    return RunResult(outputs=[write_csv(out, frame)], summary={"rows": len(frame)})


def execute_sweep_autocorr(
    settings: SweepSettings, out: Path, on_progress: Progress | None = None
) -> RunResult:
    _step(on_progress, f"{len(settings.grid())} grid point(s), k_max={settings.k_max}")
    frame = autocorr_sweep(settings)
    return RunResult(outputs=[write_csv(out, frame)], summary={"rows": len(frame)})


def _cdf_frame(p_values: list[float]) -> pd.DataFrame:
    cdf = pvalue_cdf(p_values)
    return pd.DataFrame(
        {"schema_version": SCHEMA_VERSION, "rank": cdf.ranks, "p_value": cdf.p_values}
    )


def _write_reports(directory: Path, reports: list[TestReport]) -> list[Path]:
    outputs = []
    for report in reports:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "label": report.label,
            "passed": report.passed,
            **report.model_dump(),
        }
        outputs.append(write_json(directory / f"{report.slug}.json", payload))
        cdf_path = directory / f"{report.slug}.cdf.csv"
        outputs.append(write_csv(cdf_path, _cdf_frame(report.p_values)))
    return outputs


def execute_test(
    settings: BatterySettings, out: Path, on_progress: Progress | None = None
) -> RunResult:
    """
    Run the battery on every input. With several inputs, each gets its own
    report directory and ``strings.cdf.csv`` holds the sorted per-string
    uniformity p-values of each test.
    """
    outputs: list[Path] = []
    per_input: list[list[TestReport]] = []
    for index, path in enumerate(settings.inputs):
        _step(on_progress, str(path))
        bits, _ = read_bitstream(path)
        reports = run_battery(
            bits,
            block_size=settings.block_size,
            tests=settings.tests,
            m_values=settings.apen_m,
            alpha=settings.alpha,
            jobs=settings.jobs,
        )
        per_input.append(reports)
        directory = out if len(settings.inputs) == 1 else out / f"string_{index:03d}"
        outputs.extend(_write_reports(directory, reports))
        outputs.append(write_json(directory / "summary.json", battery_summary(reports)))

    ok = all(report.passed for reports in per_input for report in reports)
    summary: dict[str, Any] = {"passed": ok, "inputs": len(settings.inputs)}
    if len(per_input) > 1:
        rows = []
        for column, first in enumerate(per_input[0]):
            uniformity = [r[column].uniformity_p for r in per_input]
            known = [u for u in uniformity if u is not None]
            if not known:
                continue
            cdf = pvalue_cdf(known)
            rows.extend(
                {
                    "schema_version": SCHEMA_VERSION,
                    "test": first.label,
                    "rank": r,
                    "uniformity_p": p,
                }
                for r, p in cdf.points
            )
        outputs.append(write_csv(out / "strings.cdf.csv", pd.DataFrame(rows)))
    summary["tests"] = {
        report.label: [r[i].passed for r in per_input]
        for i, report in enumerate(per_input[0])
    }
    return RunResult(outputs=outputs, summary=summary, ok=ok)


def analyze_bitstream(
    bits: BitStream, k_max: int, entropy_lengths: tuple[int, ...]
) -> dict[str, Any]:
    """Bias, a_1 .. a_k_max and n-gram entropies as a JSON-ready dict."""
    estimate = bias(bits)
    try:
        profile = [
            {"k": e.lag, "value": e.value, "stderr": e.stderr}
            for e in autocorr_profile(bits, k_max)
        ]
    except ConstantStream:
        profile = []
    return {
        "schema_version": SCHEMA_VERSION,
        "n_bits": bits.n_bits,
        "bias": {
            "value": estimate.value,
            "stderr": estimate.stderr,
            "variance": estimate.variance,
        },
        "autocorr": profile,
        "entropy": {str(L): ngram_entropy(bits, L) for L in entropy_lengths},
    }


def execute_analyze(
    settings: AnalyzeSettings, out: Path | None, on_progress: Progress | None = None
) -> RunResult:
    _step(on_progress, str(settings.input))
    bits, _ = read_bitstream(settings.input)
    payload = analyze_bitstream(bits, settings.k_max, settings.entropy_lengths)
    outputs = [write_json(out, payload)] if out is not None else []
    return RunResult(outputs=outputs, summary=payload)


def execute_predict(
    settings: SimulationSettings, out: Path | None, on_progress: Progress | None = None
) -> RunResult:
    _step(on_progress, "closed-form model")
    payload = predict(
        settings.analog(),
        settings.f_det,
        settings.f_bit,
        dead_time=settings.dead_time,
        n_stages=settings.stages,
    )
    outputs = [write_json(out, payload)] if out is not None else []
    return RunResult(outputs=outputs, summary=payload)


Executor = Callable[[Any, Any, Progress | None], RunResult]

COMMANDS: dict[str, tuple[type[BaseModel], Executor]] = {
    "generate": (SimulationSettings, execute_generate),
    "detect": (DetectSettings, execute_detect),
    "sweep-bias": (SweepSettings, execute_sweep_bias),
    "sweep-autocorr": (SweepSettings, execute_sweep_autocorr),
    "test": (BatterySettings, execute_test),
    "analyze": (AnalyzeSettings, execute_analyze),
    "predict": (SimulationSettings, execute_predict),
}


def _input_paths(settings: BaseModel) -> list[Path]:
    if isinstance(settings, BatterySettings):
        return list(settings.inputs)
    if isinstance(settings, AnalyzeSettings):
        return [settings.input]
    return []


def run_and_record(
    command: str,
    settings: BaseModel,
    out: Path,
    on_progress: Progress | None = None,
) -> tuple[RunResult, Path]:
    """Execute ``command`` into ``out`` and write ``<out>.manifest.json`` beside it."""
    _, execute = COMMANDS[command]
    started = datetime.now(UTC)
    result = execute(settings, out, on_progress)
    finished = datetime.now(UTC)
    base = out.parent
    manifest = RunManifest(
        command=command,
        settings=settings.model_dump(mode="json"),
        seed=getattr(settings, "seed", None),
        tool_version=__version__,
        started_at=started,
        finished_at=finished,
        primary_output=out.name,
        outputs=digest_outputs(base, result.outputs),
        inputs={str(p): file_digest(p) for p in _input_paths(settings)},
    )
    path = write_manifest(manifest, manifest_path_for(out))
    elapsed = (finished - started).total_seconds()
    logger.info("{} finished in {:.1f} s; manifest {}", command, elapsed, path)
    return result, path


def replay(manifest_path: Path, scratch: Path | None = None) -> dict[str, str]:
    """
    Re-run a recorded command into ``scratch`` (a temporary directory by
    default) and compare every output digest.

    Returns:
        Relative output path -> digest, all matching the manifest

    Raises:
        ManifestMismatch: an input changed, or any output differs or is missing
    """
    manifest = load_manifest(manifest_path)
    model, execute = COMMANDS[manifest.command]
    settings = model.model_validate(manifest.settings)
    for path, digest in manifest.inputs.items():
        if file_digest(Path(path)) != digest:
            raise ManifestMismatch(f"input {path} changed since the recorded run")

    with tempfile.TemporaryDirectory(prefix="rff-qrng-replay-") as tmp:
        base = scratch or Path(tmp)
        result = execute(settings, base / manifest.primary_output, None)
        produced = digest_outputs(base, result.outputs)

    mismatched = sorted(
        name
        for name, digest in manifest.outputs.items()
        if produced.get(name) != digest
    )
    if mismatched:
        raise ManifestMismatch(
            f"outputs differ from the manifest: {', '.join(mismatched)}"
        )
    logger.info("replay of {} reproduced {} output(s)", manifest.command, len(produced))
    return produced
