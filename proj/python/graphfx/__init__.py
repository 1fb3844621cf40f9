"""Audio processing graph engine.

Graphs are plain dicts in the engine's JSON schema; audio is a float64
numpy array of shape (2, n) at 44.1 kHz.
"""

import json

from . import _core
from ._core import (
    GenerationError,
    GraphfxError,
    InvalidGraphError,
    NumericError,
    ParseError,
    SAMPLE_RATE,
    SEGMENT_LENGTH,
    cumulative_energy_band,
    edge_types,
    make_stems,
    mss,
    processor_names,
    read_wav,
    write_wav,
)

__all__ = [
    "GenerationError", "GraphfxError", "InvalidGraphError", "NumericError", "ParseError",
    "SAMPLE_RATE", "SEGMENT_LENGTH", "cumulative_energy_band", "edge_types", "evaluate",
    "export_dot", "from_tokens", "generate_pair", "lti_reorder", "make_stems", "mss",
    "node_type_iou", "parameter_loss", "processor_names", "read_wav", "render", "to_tokens",
    "tokens_jsonl", "validate", "write_wav",
]


def _text(graph):
    return graph if isinstance(graph, str) else json.dumps(graph)


def validate(graph):
    """List of (code, detail) violations; empty when the graph is valid."""
    return _core.validate(_text(graph))


def lti_reorder(graph, structural=False):
    return json.loads(_core.lti_reorder(_text(graph), structural))


def export_dot(graph):
    return _core.export_dot(_text(graph))


def render(graph, stems, length=SEGMENT_LENGTH, default_params=False):
    """Render with stems keyed by source type name ("in", "kick", ...)."""
    return _core.render(_text(graph), stems, length, default_params)


def to_tokens(graph):
    return _core.to_tokens(_text(graph))


def tokens_jsonl(graph):
    return _core.tokens_jsonl(_text(graph))


def from_tokens(tokens):
    """Decode a token list (dicts) or JSONL text. Returns (graph|None, diagnosis, detail)."""
    if not isinstance(tokens, str):
        tokens = "".join(json.dumps(t) + "\n" for t in tokens)
    graph, diagnosis, detail = _core.from_tokens(tokens)
    return (json.loads(graph) if graph is not None else None), diagnosis, detail


def node_type_iou(pred, gt):
    return _core.node_type_iou(_text(pred), _text(gt))


def parameter_loss(pred, gt):
    return _core.parameter_loss(_text(pred), _text(gt))


def evaluate(gt, pred, oracle, stems, length=SEGMENT_LENGTH):
    """MetricsReport as a dict; pred/oracle may be None."""
    return _core.evaluate(
        _text(gt),
        None if pred is None else _text(pred),
        None if oracle is None else _text(oracle),
        stems,
        length,
    )


def generate_pair(task, seed, index, length=SEGMENT_LENGTH):
    out = _core.generate_pair(task, seed, index, length)
    out["graph"] = json.loads(out["graph"])
    return out
