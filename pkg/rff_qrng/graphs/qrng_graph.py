"""QRNG pipeline as a LangGraph StateGraph.

Graph structure for n stages:

    START -> stage_0 ... stage_{n-1} -> combine [-> summarize] -> END

All stage nodes run in the first superstep; ``combine`` waits for every one
of them.
"""

from collections.abc import Iterator
from typing import Any

from langchain_core.runnables import RunnableConfig
from langgraph.graph import END, START, StateGraph
from loguru import logger

from rff_qrng.models.config import QrngConfig
from rff_qrng.models.state import QrngState, create_initial_state
from rff_qrng.models.streams import BitStream
from rff_qrng.nodes.stage_nodes import (
    combine_stages_node,
    make_stage_node,
    stage_node_name,
    summarize_node,
)


def create_qrng_graph(n_stages: int, summarize: bool = False) -> Any:
    """
    Build and compile the pipeline graph for ``n_stages`` TRFF stages.

    Returns:
        Compiled StateGraph ready for execution
    """
    graph = StateGraph(QrngState)

    stages = [stage_node_name(i) for i in range(n_stages)]
    for i, name in enumerate(stages):
        graph.add_node(name, make_stage_node(i))
        graph.add_edge(START, name)

    graph.add_node("combine", combine_stages_node)
    graph.add_edge(stages, "combine")

    if summarize:
        graph.add_node("summarize", summarize_node)
        graph.add_edge("combine", "summarize")
        graph.add_edge("summarize", END)
    else:
        graph.add_edge("combine", END)

    return graph.compile()


def run_qrng_graph(
    cfg: QrngConfig,
    summarize: bool = False,
    config: RunnableConfig | None = None,
) -> QrngState:
    """Execute the pipeline for ``cfg`` and return the final state."""
    graph = create_qrng_graph(cfg.n_stages, summarize=summarize)
    logger.info(
        "running {}-stage QRNG for {} bits (lambda={:.4g})",
        cfg.n_stages,
        cfg.n_bits,
        cfg.normalized_rate,
    )
    result: QrngState = graph.invoke(create_initial_state(cfg), config=config)
    return result


def stream_qrng_graph(
    cfg: QrngConfig,
    summarize: bool = False,
    config: RunnableConfig | None = None,
) -> Iterator[dict[str, Any]]:
    """
    Execute the pipeline, yielding ``{node_name: update}`` as each node finishes.
    """
    graph = create_qrng_graph(cfg.n_stages, summarize=summarize)
    yield from graph.stream(create_initial_state(cfg), config=config)


def simulate_qrng(cfg: QrngConfig, config: RunnableConfig | None = None) -> BitStream:
    """Simulate every stage and return their XOR, exactly ``cfg.n_bits`` bits."""
    bitstream = run_qrng_graph(cfg, config=config)["bitstream"]
    assert bitstream is not None
    return bitstream
