# scripts/weightings/weighting_io.py
"""
Text format for threshold weightings.

    alpha <u> <p>/<q>
    beta <u> <v> <p>/<q>

Missing alpha lines default to 1 and missing beta lines to 0. The keyword
`uniform-walk` in place of a file selects Δ_o.
"""
import logging
import os
from fractions import Fraction

from utils.errors import InvalidWeighting
from weightings.threshold_weighting import ThresholdWeighting, uniform_walk

logger = logging.getLogger(__name__)

UNIFORM_WALK = "uniform-walk"


def _parse_rational(token, line_no):
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise InvalidWeighting(f"line {line_no}: bad rational {token!r}")


def _parse_vertex(token, graph, line_no):
    try:
        u = int(token)
    except ValueError:
        raise InvalidWeighting(f"line {line_no}: bad vertex {token!r}")
    if not 0 <= u < graph.vertex_count:
        raise InvalidWeighting(f"line {line_no}: vertex {u} out of range")
    return u


def parse_weighting(graph, text):
    alpha = [Fraction(1)] * graph.vertex_count
    beta = [Fraction(0)] * graph.edge_count
    seen = set()

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if tokens[0] == "alpha" and len(tokens) == 3:
            u = _parse_vertex(tokens[1], graph, line_no)
            key = ("alpha", u)
            alpha[u] = _parse_rational(tokens[2], line_no)
        elif tokens[0] == "beta" and len(tokens) == 4:
            u = _parse_vertex(tokens[1], graph, line_no)
            v = _parse_vertex(tokens[2], graph, line_no)
            index = graph.edge_index(u, v)
            if index is None:
                raise InvalidWeighting(f"line {line_no}: ({u},{v}) is not an edge")
            key = ("beta", index)
            beta[index] = _parse_rational(tokens[3], line_no)
        else:
            raise InvalidWeighting(f"line {line_no}: unexpected content {line!r}")

        if key in seen:
            raise InvalidWeighting(f"line {line_no}: repeated {key[0]} entry")
        seen.add(key)

    return ThresholdWeighting(graph, tuple(alpha), tuple(beta))


def format_weighting(weighting):
    lines = [f"alpha {u} {a.numerator}/{a.denominator}" for u, a in enumerate(weighting.alpha)]
    lines.extend(f"beta {u} {v} {b.numerator}/{b.denominator}"
                 for (u, v), b in zip(weighting.graph.edges, weighting.beta))
    return "\n".join(lines) + "\n"


def load_weighting(graph, source):
    """Read a weighting file, or build Δ_o when source is 'uniform-walk'."""
    if source == UNIFORM_WALK:
        return uniform_walk(graph)
    if not os.path.exists(source):
        raise InvalidWeighting(f"weighting file not found: {source}")
    with open(source, "r", encoding="ascii") as f:
        weighting = parse_weighting(graph, f.read())
    logger.debug(f"Loaded weighting {source}")
    return weighting
