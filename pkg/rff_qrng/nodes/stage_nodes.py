"""LangGraph nodes for the QRNG pipeline.

Stage nodes run in the same superstep and each returns a partial update
``{"stage_streams": {index: bits}}``; the reducer on ``stage_streams`` merges
them before ``combine_stages_node`` runs.
"""

from collections.abc import Callable
from typing import Any

from langchain_core.runnables import RunnableConfig
from loguru import logger

from rff_qrng.analytic_model import a1_ideal, predicted_bias, xor_chain
from rff_qrng.errors import ConstantStream, InvalidInput, LagTooLarge
from rff_qrng.models.state import QrngState
from rff_qrng.rff_core import DEFAULT_CHUNK_BITS, StageSimulator, xor_many
from rff_qrng.stats import autocorr, bias

StageNode = Callable[[QrngState, RunnableConfig], dict[str, Any]]


def stage_node_name(index: int) -> str:
    return f"stage_{index}"


def make_stage_node(index: int) -> StageNode:
    """
    Build the node simulating TRFF stage ``index``.

    ``chunk_bits`` may be overridden through ``config["configurable"]``.
    """

    def stage_node(state: QrngState, config: RunnableConfig) -> dict[str, Any]:
        cfg = state["config"]
        configurable = (config or {}).get("configurable", {})
        chunk_bits = configurable.get("chunk_bits", DEFAULT_CHUNK_BITS)
        detector = cfg.detectors[index]
        log = logger.bind(stage=index)
        log.info(
            "simulating stage {} (seed {}, {} bits)", index, detector.seed, cfg.n_bits
        )
        simulator = StageSimulator(
            detector,
            cfg.analog,
            cfg.sampler,
            initial_state=cfg.initial_state,
            chunk_bits=chunk_bits,
        )
        bits = simulator.run(cfg.n_bits)
        log.info("stage {} done", index)
        return {"stage_streams": {index: bits}}

    stage_node.__name__ = stage_node_name(index)
    return stage_node


def combine_stages_node(state: QrngState) -> dict[str, Any]:
    """XOR the stage outputs in stage order."""
    cfg = state["config"]
    streams = state.get("stage_streams") or {}
    missing = [i for i in range(cfg.n_stages) if i not in streams]
    if missing:
        raise InvalidInput(f"stage outputs missing for stages {missing}")
    combined = xor_many(streams[i] for i in range(cfg.n_stages))
    return {"bitstream": combined}


def _lag1(bits: Any) -> float | None:
    try:
        return autocorr(bits, 1).value
    except (ConstantStream, LagTooLarge):
        return None


def summarize_node(state: QrngState) -> dict[str, Any]:
    """Record measured and predicted bias and a_1 for the stages and the output."""
    cfg = state["config"]
    output = state["bitstream"]
    if output is None:
        raise InvalidInput("summarize needs the combined bitstream")
    detector = cfg.detectors[0]
    lam = cfg.normalized_rate

    metadata: dict[str, Any] = dict(state.get("metadata") or {})
    metadata["measured_bias"] = bias(output).value
    metadata["measured_a1"] = _lag1(output)
    stages = [state["stage_streams"][i] for i in range(cfg.n_stages)]
    metadata["stage_bias"] = [bias(bits).value for bits in stages]
    metadata["stage_a1"] = [_lag1(bits) for bits in stages]
    metadata["lambda"] = lam

    b = predicted_bias(cfg.analog, detector.f_det)
    metadata["predicted_stage_bias"] = b
    if detector.dead_time == 0:
        a1 = a1_ideal(lam)
        metadata["predicted_stage_a1"] = a1
        predicted_b, predicted_a = xor_chain(b, a1, cfg.n_stages)[-1]
        metadata["predicted_bias"] = predicted_b
        metadata["predicted_a1"] = predicted_a
    return {"metadata": metadata}
