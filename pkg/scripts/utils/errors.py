# scripts/utils/errors.py
"""Error hierarchy shared by every toolkit module."""


class KappaToolkitError(Exception):
    """Base error for the toolkit."""


class DomainRejection(KappaToolkitError, ValueError):
    """Input outside an operation's domain; the CLI exits with status 1."""


class GraphFormatError(DomainRejection):
    pass


class InvalidWeighting(DomainRejection):
    def __init__(self, message, vertices=None, value=None):
        super().__init__(message)
        self.vertices = vertices
        self.value = value


class InvalidSequence(DomainRejection):
    def __init__(self, message, step=None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class CapacityExceeded(DomainRejection):
    def __init__(self, message, limit=None, step=None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.limit = limit
        self.step = step


class TrieOverflow(DomainRejection):
    """A trie level holds more children under one node than its capacity."""

    def __init__(self, level, count, capacity, step=None):
        message = f"trie level {level} overflow: {count} children > capacity {capacity}"
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.level = level
        self.count = count
        self.capacity = capacity
        self.step = step


class HypothesisViolation(DomainRejection):
    def __init__(self, message, subgraph=None):
        super().__init__(message)
        self.subgraph = subgraph


class InternalCheckError(KappaToolkitError, AssertionError):
    """A self-check on a computed result failed; the CLI exits with status 2."""


class StatisticalCheckFailed(InternalCheckError):
    pass
