#!/usr/bin/env python3
# scripts/experiments/experiment_runner.py
"""
Experiment harness: concentration, janson, goodness and scaling runs over an
n grid, each written as a CSV with a '# config: <json>' header line.

Trial t draws its host graph with seed SeedSequence([seed, t]), so trials are
independent of each other and of scheduling. Statistical checks run after the
CSV is written and raise StatisticalCheckFailed.
"""
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pandas as pd

from experiments.experiment_config import ExperimentConfig
from graphs.pattern_graph import Subgraph, iter_subgraphs
from graphs.pattern_io import load_pattern
from kappa.kappa_exact import kappa_exact
from kappa.union_sequence import sequence_from_json, validate_sequence
from sampling.threshold_random_graph import expected_count, sample
from solvers.goodness import goodness_report
from solvers.instances import count_extensions, count_instances, enumerate_instances
from solvers.sort_merge_join import join_solve
from utils.errors import DomainRejection, HypothesisViolation, StatisticalCheckFailed
from weightings.weighting_io import load_weighting

logger = logging.getLogger("experiment-runner")

FLOAT_FORMAT = "%.12g"


def trial_seed(seed, trial):
    """64-bit seed for one trial, derived through SeedSequence."""
    state = np.random.SeedSequence([int(seed) & ((1 << 64) - 1), int(trial)]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def subgraph_from_spec(graph, spec):
    """Subgraph from {"vertices": [...], "edges": [...]}; edge endpoints are added."""
    return Subgraph.from_edges(graph, spec.get("edges", []), spec.get("vertices", []))


def check_extension_hypothesis(weighting, lower, upper):
    """Δ(A) < Δ(H) for every H with A ⊊ H ⊆ U; raises naming the first violator."""
    if not lower.issubset(upper):
        raise DomainRejection(f"{lower!r} is not contained in {upper!r}")
    base = weighting.delta(lower)
    for candidate in iter_subgraphs(weighting.graph, within=upper, contains=lower):
        if candidate == lower:
            continue
        if weighting.delta(candidate) <= base:
            raise HypothesisViolation(
                f"Δ({candidate.label()}) = {weighting.delta(candidate)} is not above Δ(A) = {base}", candidate)


def fitted_slope(n_values, sizes):
    """Least-squares slope of log2 max(size, 1) against log2 n."""
    x = np.log2(np.asarray(n_values, dtype=float))
    y = np.log2(np.maximum(np.asarray(sizes, dtype=float), 1.0))
    if len(x) < 2:
        return float("nan")
    return float(np.polyfit(x, y, 1)[0])


class ExperimentRunner:
    """
    Runs one ExperimentConfig.

    The pattern and weighting are loaded once; every trial samples a fresh
    host graph from its derived seed.
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.graph = load_pattern(config.pattern)
        self.weighting = load_weighting(self.graph, config.weighting)

    # -- plumbing ------------------------------------------------------------

    def host(self, n, trial):
        return sample(self.weighting, n, trial_seed(self.config.seed, trial))

    def map_trials(self, work):
        """work(trial) for every trial, results in trial order."""
        trials = range(self.config.trials)
        if self.config.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.max_workers) as pool:
                return list(pool.map(work, trials))
        return [work(t) for t in trials]

    def write_csv(self, table: pd.DataFrame):
        path = self.config.output
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", newline="") as f:
            f.write(f"# config: {self.config.header()}\n")
            table.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info(f"Wrote {len(table)} rows to {path}")

    def run(self) -> pd.DataFrame:
        runners = {
            "concentration": self.concentration,
            "janson": self.janson,
            "goodness": self.goodness,
            "scaling": self.scaling,
        }
        logger.info(f"Running {self.config.kind} experiment over n = {self.config.n_grid}, "
                    f"{self.config.trials} trials, seed {self.config.seed}")
        table, failures = runners[self.config.kind]()
        self.write_csv(table)
        if failures and self.config.check:
            raise StatisticalCheckFailed(f"{len(failures)} check(s) failed: " + "; ".join(failures[:5]))
        return table

    # -- experiments -----------------------------------------------------------

    def concentration(self):
        """Mean and max |Sub_H(X)| per (H, n) against expected_count."""
        subgraphs = [h for h in iter_subgraphs(self.graph, max_vertices=self.config.size_cap) if not h.is_empty()]
        records, failures = [], []
        for n in self.config.n_grid:
            counts = np.array(self.map_trials(
                lambda t: [count_instances(self.host(n, t), h) for h in subgraphs]), dtype=float)
            for column, h in enumerate(subgraphs):
                expected = expected_count(self.weighting, h, n)
                mean = float(counts[:, column].mean())
                ratio = mean / expected.realized if expected.realized > 0 else float("nan")
                records.append({
                    "n": n,
                    "H": h.label(),
                    "trials": self.config.trials,
                    "mean": mean,
                    "max": float(counts[:, column].max()),
                    "expected": expected.realized,
                    "idealized": expected.idealized,
                    "ratio": ratio,
                })
                if expected.realized >= 25 and self.config.trials >= 200 and not 0.8 <= ratio <= 1.25:
                    failures.append(f"n={n} H={h.label()} mean/expected = {ratio:.3f}")
        return pd.DataFrame.from_records(records), failures

    def _pairs(self):
        specs = self.config.pairs or [{"lower": {}, "upper": {"edges": [0]}}]
        pairs = []
        for spec in specs:
            lower = subgraph_from_spec(self.graph, spec.get("lower", {}))
            upper = subgraph_from_spec(self.graph, spec.get("upper", {}))
            check_extension_hypothesis(self.weighting, lower, upper)
            pairs.append((lower, upper))
        return pairs

    def janson(self):
        """Extension counts of one sampled A-instance per trial against 0.5·n^{Δ(U)−Δ(A)}."""
        pairs = self._pairs()
        records, failures = [], []
        for n in self.config.n_grid:
            for lower, upper in pairs:
                exponent = self.weighting.delta(upper) - self.weighting.delta(lower)
                threshold = 0.5 * float(n) ** float(exponent)

                def work(t):
                    seed = trial_seed(self.config.seed, t)
                    host = sample(self.weighting, n, seed)
                    instances = enumerate_instances(host, lower)
                    if not len(instances):
                        return "", 0
                    rng = np.random.default_rng(seed)
                    row = instances.rows[int(rng.integers(len(instances)))]
                    assignment = dict(zip(instances.vertices, (int(x) for x in row)))
                    label = ".".join(str(assignment[v]) for v in instances.vertices)
                    return label, count_extensions(host, assignment, lower, upper)

                outcomes = self.map_trials(work)
                meets = [count >= threshold for _, count in outcomes]
                fraction = sum(meets) / len(meets)
                for t, ((label, count), ok) in enumerate(zip(outcomes, meets)):
                    records.append({
                        "n": n,
                        "A": lower.label(),
                        "U": upper.label(),
                        "trial": t,
                        "instance": label,
                        "count": count,
                        "exponent": str(Fraction(exponent)),
                        "threshold": threshold,
                        "meets": ok,
                        "pass_fraction": fraction,
                    })
                if n == self.config.n_grid[-1] and fraction < 0.9:
                    failures.append(f"n={n} A={lower.label()} U={upper.label()} pass fraction {fraction:.3f}")
        return pd.DataFrame.from_records(records), failures

    def goodness(self):
        """goodness_report per trial; every ratio must stay below (log₂ n)^3."""
        frames, failures = [], []
        for n in self.config.n_grid:
            bound = math.log2(n) ** 3
            reports = self.map_trials(lambda t: goodness_report(self.host(n, t), self.config.size_cap))
            for t, report in enumerate(reports):
                report = report.copy()
                report.insert(0, "trial", t)
                report.insert(0, "n", n)
                report["bound"] = bound
                frames.append(report)
                worst = report["ratio"].max() if len(report) else 0.0
                if worst > bound:
                    failures.append(f"n={n} trial={t} ratio {worst:.3f} above {bound:.1f}")
        table = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
        return table, failures

    def _sequence(self):
        if self.config.sequence:
            with open(self.config.sequence, "r") as f:
                sequence = sequence_from_json(self.graph, json.load(f))
            return sequence, validate_sequence(sequence, self.weighting)
        result = kappa_exact(self.weighting)
        return result.witness, result.value

    def scaling(self):
        """Median join_solve peak list size (and time) per n, with the fitted log-log slope."""
        sequence, kappa = self._sequence()
        records = []
        for n in self.config.n_grid:
            def work(t):
                host = self.host(n, t)
                start = time.perf_counter()
                result = join_solve(host, sequence)
                return result.peak, time.perf_counter() - start

            outcomes = self.map_trials(work)
            record = {
                "n": n,
                "trials": self.config.trials,
                "median_peak": float(np.median([peak for peak, _ in outcomes])),
                "kappa": str(kappa),
            }
            if self.config.record_timing:
                record["median_seconds"] = float(np.median([seconds for _, seconds in outcomes]))
            records.append(record)

        table = pd.DataFrame.from_records(records)
        slope = fitted_slope(table["n"], table["median_peak"])
        table["slope"] = slope
        logger.info(f"Peak-size slope {slope:.3f} against κ = {kappa}")
        return table, []


def run_experiment(config: ExperimentConfig) -> pd.DataFrame:
    return ExperimentRunner(config).run()


def _run_as(config, kind):
    return run_experiment(replace(config, kind=kind))


def concentration_experiment(config):
    return _run_as(config, "concentration")


def janson_experiment(config):
    return _run_as(config, "janson")


def goodness_experiment(config):
    return _run_as(config, "goodness")


def scaling_experiment(config):
    return _run_as(config, "scaling")
