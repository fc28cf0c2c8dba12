#!/usr/bin/env python3
# scripts/utils/settings.py
"""
Shared limits and tunables for the toolkit.

Every limit has a built-in default and an optional environment override
named KAPPA_<NAME> (for example KAPPA_VERTEX_CAP=40).
"""
import logging
import os

logger = logging.getLogger(__name__)

VERSION = "0.3.0"
CSV_SCHEMA_VERSION = 1

DEFAULT_LIMITS = {
    "vertex_cap": 32,                   # pattern graph size (bitset friendly)
    "validate_max_vertices": 24,        # exhaustive θ(G) membership check
    "closure_max_edges": 13,            # exact κ lattice closure
    "hamming_scan_max_d": 20,           # hypercube prefix scans
    "path_decomposition_max_d": 16,
    "sample_vertex_budget": 1_000_000,  # Σ m_u for one host graph
    "dense_pair_limit": 4_000_000,      # block pairs sampled one uniform per pair
    "brute_force_cap": 100_000_000,     # candidate tuples
    "join_row_cap": 10_000_000,         # rows in any intermediate list
    "trie_polylog_exponent": 2,
}


def get_limit(name):
    """
    Return the configured value for a limit, honouring KAPPA_<NAME> overrides.

    Args:
        name: key of DEFAULT_LIMITS

    Returns:
        int value of the limit
    """
    if name not in DEFAULT_LIMITS:
        raise KeyError(f"Unknown limit: {name}")

    env_name = f"KAPPA_{name.upper()}"
    raw = os.environ.get(env_name)
    if raw is None or raw.strip() == "":
        return DEFAULT_LIMITS[name]

    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {env_name}={raw!r}")
        return DEFAULT_LIMITS[name]

    if value <= 0:
        logger.warning(f"Ignoring non-positive {env_name}={raw!r}")
        return DEFAULT_LIMITS[name]
    return value


def describe_limits():
    """Current limits after environment overrides, for logs and CSV headers."""
    return {name: get_limit(name) for name in sorted(DEFAULT_LIMITS)}
