#!/usr/bin/env python3
# scripts/kappa/union_sequence.py
"""
Union sequences: lists of distinct subgraphs ending at G where each entry is
a single edge or the union of two earlier entries.
"""
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from graphs.pattern_graph import PatternGraph, Subgraph
from utils.errors import DomainRejection, InvalidSequence

logger = logging.getLogger("union-sequence")


@dataclass(frozen=True)
class SequenceStep:
    subgraph: Subgraph
    edge: Optional[int] = None
    left: Optional[int] = None
    right: Optional[int] = None

    @property
    def is_edge(self):
        return self.edge is not None

    def provenance(self):
        return f"edge {self.edge}" if self.is_edge else f"union {self.left} {self.right}"


@dataclass(frozen=True)
class UnionSequence:
    graph: PatternGraph
    steps: Tuple[SequenceStep, ...]

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, index):
        return self.steps[index]

    def subgraphs(self):
        return [step.subgraph for step in self.steps]

    def max_delta(self, weighting):
        return max(weighting.delta(step.subgraph) for step in self.steps)


class SequenceBuilder:
    """
    Incrementally assembles a union sequence, reusing existing steps.

    Adding a subgraph that is already present returns the earlier index, so
    the built sequence stays duplicate-free.
    """

    def __init__(self, graph: PatternGraph):
        self.graph = graph
        self.steps: List[SequenceStep] = []
        self.index: Dict[Subgraph, int] = {}

    def _append(self, step):
        existing = self.index.get(step.subgraph)
        if existing is not None:
            return existing
        self.steps.append(step)
        self.index[step.subgraph] = len(self.steps) - 1
        return len(self.steps) - 1

    def add_edge(self, edge_index):
        return self._append(SequenceStep(Subgraph.from_edges(self.graph, [edge_index]), edge=edge_index))

    def add_union(self, left, right):
        """Index of steps[left] ∪ steps[right]; None operands act as the empty graph."""
        if left is None:
            return right
        if right is None or left == right:
            return left
        merged = self.steps[left].subgraph.union(self.steps[right].subgraph)
        if merged == self.steps[left].subgraph:
            return left
        if merged == self.steps[right].subgraph:
            return right
        return self._append(SequenceStep(merged, left=min(left, right), right=max(left, right)))

    def add_edges_cumulative(self, edge_indices, start=None):
        """Append edges one at a time, unioning each onto the running step."""
        current = start
        for edge_index in edge_indices:
            current = self.add_union(current, self.add_edge(edge_index))
        return current

    def index_of(self, subgraph):
        return self.index.get(subgraph)

    def build(self, target: Optional[Subgraph] = None) -> UnionSequence:
        """The sequence up to and including target (default: all of G)."""
        target = target or Subgraph.full(self.graph)
        position = self.index.get(target)
        if position is None:
            raise InvalidSequence(f"builder never produced the target {target!r}")
        return UnionSequence(self.graph, tuple(self.steps[:position + 1]))


def check_sequence(sequence: UnionSequence, target: Optional[Subgraph] = None):
    """
    Check the structural union-sequence invariants.

    Raises:
        InvalidSequence naming the first offending step
    """
    graph = sequence.graph
    if not sequence.steps:
        raise InvalidSequence("sequence is empty")

    seen = set()
    for position, step in enumerate(sequence.steps):
        subgraph = step.subgraph
        if subgraph.graph != graph:
            raise InvalidSequence("subgraph of a different graph", step=position)
        if subgraph in seen:
            raise InvalidSequence(f"duplicate subgraph {subgraph!r}", step=position)
        seen.add(subgraph)
        if subgraph.is_empty() or subgraph.has_isolated_vertices():
            raise InvalidSequence(f"{subgraph!r} has isolated vertices", step=position)

        if step.is_edge:
            if step.left is not None or step.right is not None:
                raise InvalidSequence("provenance names both an edge and a union", step=position)
            if not 0 <= step.edge < graph.edge_count:
                raise InvalidSequence(f"edge index {step.edge} out of range", step=position)
            if subgraph != Subgraph.from_edges(graph, [step.edge]):
                raise InvalidSequence(f"subgraph is not edge {step.edge}", step=position)
        else:
            if step.left is None or step.right is None:
                raise InvalidSequence("missing provenance", step=position)
            if not (0 <= step.left < position and 0 <= step.right < position):
                raise InvalidSequence(f"union refers to steps {step.left}, {step.right} not before it", step=position)
            expected = sequence.steps[step.left].subgraph.union(sequence.steps[step.right].subgraph)
            if subgraph != expected:
                raise InvalidSequence(f"subgraph is not the union of steps {step.left} and {step.right}", step=position)

    target = target or Subgraph.full(graph)
    if sequence.steps[-1].subgraph != target:
        raise InvalidSequence(f"last step is {sequence.steps[-1].subgraph!r}, expected {target!r}",
                              step=len(sequence.steps) - 1)


def validate_sequence(sequence: UnionSequence, weighting, target: Optional[Subgraph] = None) -> Fraction:
    """Check the invariants of a union sequence and return its largest step Δ."""
    if weighting.graph != sequence.graph:
        raise DomainRejection("weighting and sequence use different graphs")
    check_sequence(sequence, target)
    return sequence.max_delta(weighting)


def sequence_to_json(sequence: UnionSequence):
    records = []
    for step in sequence.steps:
        record = {"edges": step.subgraph.edge_list()}
        if step.is_edge:
            record["edge"] = step.edge
        else:
            record["union"] = [step.left, step.right]
        records.append(record)
    return records


def sequence_from_json(graph: PatternGraph, records) -> UnionSequence:
    if isinstance(records, str):
        records = json.loads(records)
    steps = []
    for position, record in enumerate(records):
        try:
            subgraph = Subgraph.from_edges(graph, record["edges"])
            if "edge" in record:
                steps.append(SequenceStep(subgraph, edge=int(record["edge"])))
            else:
                left, right = record["union"]
                steps.append(SequenceStep(subgraph, left=int(left), right=int(right)))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidSequence(f"malformed record {record!r}: {e}", step=position)
    return UnionSequence(graph, tuple(steps))
