#!/usr/bin/env python3
# scripts/experiments/experiment_config.py
"""
Experiment configuration. A config fully determines a run and is embedded in
the header of every CSV it produces.
"""
import json
from dataclasses import asdict, dataclass, field
from typing import List, Optional

from utils.errors import DomainRejection
from utils.settings import CSV_SCHEMA_VERSION, VERSION

EXPERIMENT_KINDS = ("concentration", "janson", "goodness", "scaling")


@dataclass
class ExperimentConfig:
    pattern: str
    kind: str
    n_grid: List[int]
    trials: int
    seed: int
    output: str
    weighting: str = "uniform-walk"
    size_cap: int = 3
    # janson: [{"lower": {"vertices": [...], "edges": [...]}, "upper": {...}}]
    pairs: List[dict] = field(default_factory=list)
    sequence: Optional[str] = None
    record_timing: bool = True
    max_workers: int = 1
    check: bool = True

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise DomainRejection(f"unknown experiment kind {self.kind!r}; choose from {list(EXPERIMENT_KINDS)}")
        if not self.n_grid or any(int(n) < 2 for n in self.n_grid):
            raise DomainRejection(f"n grid must be non-empty with every n >= 2, got {self.n_grid}")
        if self.trials < 1:
            raise DomainRejection(f"trials must be positive, got {self.trials}")
        self.n_grid = sorted(int(n) for n in self.n_grid)

    def header(self):
        """Config plus schema and code versions, as written after '# config: '."""
        payload = asdict(self)
        payload["schema_version"] = CSV_SCHEMA_VERSION
        payload["code_version"] = VERSION
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data.pop("schema_version", None)
        data.pop("code_version", None)
        try:
            return cls(**data)
        except TypeError as e:
            raise DomainRejection(f"bad experiment config: {e}")

    @classmethod
    def from_file(cls, path):
        with open(path, "r") as f:
            try:
                return cls.from_dict(json.load(f))
            except json.JSONDecodeError as e:
                raise DomainRejection(f"config {path} is not valid JSON: {e}")


def read_config_header(path):
    """ExperimentConfig embedded in a CSV written by the runner."""
    with open(path, "r") as f:
        first = f.readline()
    if not first.startswith("# config: "):
        raise DomainRejection(f"{path} has no '# config:' header")
    return ExperimentConfig.from_dict(json.loads(first[len("# config: "):]))
