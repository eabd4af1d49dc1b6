"""LangGraph nodes for the QRNG simulation pipeline."""

from rff_qrng.nodes.stage_nodes import (
    combine_stages_node,
    make_stage_node,
    stage_node_name,
    summarize_node,
)

__all__ = [
    "combine_stages_node",
    "make_stage_node",
    "stage_node_name",
    "summarize_node",
]
