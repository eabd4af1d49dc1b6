"""LangGraph workflow for the QRNG simulation."""

from rff_qrng.graphs.qrng_graph import (
    create_qrng_graph,
    run_qrng_graph,
    simulate_qrng,
    stream_qrng_graph,
)

__all__ = [
    "create_qrng_graph",
    "run_qrng_graph",
    "simulate_qrng",
    "stream_qrng_graph",
]
