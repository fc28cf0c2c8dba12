# scripts/graphs/pattern_io.py
"""
Text format for pattern graphs.

    p <vertex_count> <edge_count>
    e <u> <v>          (edge_count lines, 0-indexed vertices)

Lines starting with 'c' are comments; blank lines are ignored. Anything
else after the declared edges is rejected.
"""
import hashlib
import logging
import os

from graphs.pattern_graph import build_pattern
from utils.errors import GraphFormatError

logger = logging.getLogger(__name__)


def _parse_int(token, line_no):
    try:
        return int(token)
    except ValueError:
        raise GraphFormatError(f"line {line_no}: expected an integer, got {token!r}")


def parse_pattern(text, vertex_cap=None):
    header = None
    edges = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()

        if header is None:
            if tokens[0] != "p" or len(tokens) != 3:
                raise GraphFormatError(f"line {line_no}: expected header 'p <v> <e>', got {line!r}")
            header = (_parse_int(tokens[1], line_no), _parse_int(tokens[2], line_no))
            continue

        if tokens[0] != "e" or len(tokens) != 3:
            raise GraphFormatError(f"line {line_no}: unexpected content {line!r}")
        if len(edges) == header[1]:
            raise GraphFormatError(f"line {line_no}: more edges than the declared {header[1]}")
        edges.append((_parse_int(tokens[1], line_no), _parse_int(tokens[2], line_no)))

    if header is None:
        raise GraphFormatError("missing 'p <v> <e>' header")
    if len(edges) != header[1]:
        raise GraphFormatError(f"declared {header[1]} edges but found {len(edges)}")
    return build_pattern(header[0], edges, vertex_cap=vertex_cap)


def format_pattern(graph):
    lines = [f"p {graph.vertex_count} {graph.edge_count}"]
    lines.extend(f"e {u} {v}" for u, v in graph.edges)
    return "\n".join(lines) + "\n"


def load_pattern(path, vertex_cap=None):
    if not os.path.exists(path):
        raise GraphFormatError(f"pattern file not found: {path}")
    with open(path, "r", encoding="ascii") as f:
        graph = parse_pattern(f.read(), vertex_cap=vertex_cap)
    logger.debug(f"Loaded pattern {path}: {graph.vertex_count} vertices, {graph.edge_count} edges")
    return graph


def pattern_hash(graph):
    """Short content hash of the canonical text form, used in host dumps."""
    return hashlib.sha256(format_pattern(graph).encode("ascii")).hexdigest()[:16]
