"""State flowing through the QRNG simulation graph.

Each stage node returns a partial update ``{"stage_streams": {index: bits}}``;
the ``merge_stage_streams`` reducer joins the concurrent stage updates before
the combine node folds them with XOR.
"""

from typing import Annotated, Any, TypedDict

from rff_qrng.models.config import QrngConfig
from rff_qrng.models.streams import BitStream


def merge_stage_streams(
    left: dict[int, BitStream] | None, right: dict[int, BitStream] | None
) -> dict[int, BitStream]:
    """Reducer for per-stage outputs keyed by stage index."""
    return {**(left or {}), **(right or {})}


class QrngState(TypedDict):
    """
    Attributes:
        config: Resolved pipeline configuration
        stage_streams: Output of each TRFF stage, keyed by stage index
        bitstream: XOR of all stage outputs, set by the combine node
        metadata: Measured and predicted figures added by the summarize node
    """

    config: QrngConfig
    stage_streams: Annotated[dict[int, BitStream], merge_stage_streams]
    bitstream: BitStream | None
    metadata: dict[str, Any] | None


def create_initial_state(config: QrngConfig) -> QrngState:
    return QrngState(config=config, stage_streams={}, bitstream=None, metadata={})


def format_state_display(state: QrngState) -> str:
    """Multi-line summary of a finished (or partial) run for the console."""
    config = state["config"]
    detector = config.detectors[0]
    lines = [
        f"Stages: {config.n_stages}",
        f"f_det: {detector.f_det:.4g} Hz   f_bit: {config.sampler.f_bit:.4g} Hz   "
        f"lambda: {config.normalized_rate:.4g}",
        f"Dead time: {detector.dead_time:.4g} s   phase: {config.sampler.phase:.4g} s",
        f"Analog: eta={config.analog.eta:.4g} t_R={config.analog.t_rise:.4g} s "
        f"t_F={config.analog.t_fall:.4g} s",
        f"Bits: {config.n_bits}   seed: {config.seed}",
    ]
    stages = state.get("stage_streams") or {}
    if stages:
        lines.append(f"Completed stages: {sorted(stages)}")
    metadata = state.get("metadata") or {}
    for key in sorted(metadata):
        lines.append(f"{key}: {metadata[key]}")
    return "\n".join(lines)
