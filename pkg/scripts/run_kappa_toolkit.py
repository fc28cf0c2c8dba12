#!/usr/bin/env python3
# scripts/run_kappa_toolkit.py
"""
Colored Subgraph Toolkit - command line entry point

Subcommands:
1. gen         sample a threshold random graph and print its dump
2. kappa       exact κ_Δ(G), witnesses, heuristic search and Hamming bounds
3. solve       decide Sub_G(X) ≠ ∅ by brute force, sort-merge join or tries
4. markov      Markov-chain decomposition of a weighting, and back
5. hamming     hypercube μ, spectral bounds, path decompositions, embeddings
6. experiment  run a concentration | janson | goodness | scaling experiment

Exit status is 0 on success, 1 on a rejected input and 2 when an internal
self-check fails. Results go to stdout; logs go to kappa_toolkit.log and stderr.
"""
import argparse
import json
import logging
import sys
from fractions import Fraction

from experiments.experiment_config import EXPERIMENT_KINDS, ExperimentConfig
from experiments.experiment_runner import run_experiment
from graphs.constructions import hamming
from graphs.hypercube import hamming_embed
from graphs.pattern_graph import Subgraph
from graphs.pattern_io import format_pattern, load_pattern
from kappa.hamming_analytics import hypercube_mu, hypercube_path_decomposition, kappa_lower_bounds
from kappa.kappa_exact import kappa_exact
from kappa.kappa_search import KappaSearch
from kappa.union_sequence import sequence_from_json, sequence_to_json
from kappa.witnesses import kappa_witness
from sampling.threshold_random_graph import dump_host, sample
from solvers.instances import brute_force
from solvers.sort_merge_join import join_solve
from solvers.subgraph_trie import trie_solve
from utils.errors import DomainRejection, InternalCheckError
from weightings.markov import from_markov, markov_decompose
from weightings.threshold_weighting import validate
from weightings.weighting_io import UNIFORM_WALK, format_weighting, load_weighting

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.FileHandler("kappa_toolkit.log"),
        logging.StreamHandler(sys.stderr)
    ]
)

logger = logging.getLogger("kappa-toolkit")


class ToolkitArgumentParser(argparse.ArgumentParser):
    """Argument errors print usage and exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def fraction_text(value):
    return f"{value.numerator}/{value.denominator}"


def load_inputs(args):
    graph = load_pattern(args.graph)
    return graph, load_weighting(graph, args.weighting)


def load_sequence(args, weighting):
    """Sequence from --sequence, or the exact-κ witness."""
    if getattr(args, "sequence", None):
        with open(args.sequence, "r") as f:
            return sequence_from_json(weighting.graph, json.load(f))
    return kappa_exact(weighting).witness


# -- subcommands ---------------------------------------------------------------

def cmd_gen(args):
    _, weighting = load_inputs(args)
    host = sample(weighting, args.n, args.seed, max_workers=args.workers)
    text = dump_host(host)
    if args.output:
        with open(args.output, "w", newline="") as f:
            f.write(text)
        logger.info(f"Wrote host graph with {host.edge_count()} edges to {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_kappa(args):
    if args.action in ("mu", "bounds", "pathdec"):
        return cmd_hamming(args)

    graph, weighting = load_inputs(args)
    if args.action == "exact":
        result = kappa_exact(weighting)
    elif args.action == "witness":
        result = kappa_witness(weighting, args.kind)
    else:
        if args.seed is None:
            raise DomainRejection("kappa search is randomized; --seed is required")
        search = KappaSearch(args.iterations, args.restarts, args.seed, args.workers).run(graph)
        result = search.result
        logger.info(f"Search baseline (Δ_o) κ = {fraction_text(search.baseline.value)}")
        if args.output:
            with open(args.output, "w") as f:
                f.write(format_weighting(search.weighting))

    print(result.as_text())
    logger.info(f"κ = {result.as_text()} ≈ {result.decimal:.6f} ({result.method})")
    if args.witness_out:
        with open(args.witness_out, "w") as f:
            json.dump(sequence_to_json(result.witness), f, indent=2)
    return 0


def cmd_solve(args):
    _, weighting = load_inputs(args)
    host = sample(weighting, args.n, args.seed)
    if args.method == "brute":
        rows = brute_force(host, Subgraph.full(weighting.graph))
        report = {"decision": len(rows) > 0, "counts": [len(rows)], "sizes": [len(rows)], "overflow": False}
    elif args.method == "join":
        result = join_solve(host, load_sequence(args, weighting))
        report = {"decision": result.decision, "counts": result.counts, "sizes": result.counts,
                  "peak": result.peak, "overflow": False}
    else:
        result = trie_solve(host, load_sequence(args, weighting), exponent=args.exponent,
                            fallback=not args.no_fallback)
        report = result.to_dict()
        report["counts"] = result.sizes
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_markov(args):
    graph = load_pattern(args.graph)
    if args.action == "decompose":
        weighting = load_weighting(graph, args.weighting)
        chain = markov_decompose(weighting)
        print(json.dumps([[fraction_text(x) for x in row] for row in chain.entries]))
        return 0

    with open(args.matrix, "r") as f:
        matrix = json.load(f)
    if not isinstance(matrix, list) or not all(isinstance(row, list) for row in matrix):
        raise DomainRejection("matrix must be a JSON list of rows")
    entries = [[_parse_fraction(x) for x in row] for row in matrix]
    weighting = from_markov(graph, entries)
    verdict = validate(weighting)
    sys.stdout.write(format_weighting(weighting))
    print(f"c Δ(G) = {fraction_text(weighting.delta(Subgraph.full(graph)))} valid={verdict.ok}")
    return 0


def _parse_fraction(token):
    if isinstance(token, float):
        raise DomainRejection(f"matrix entries must be integers or 'p/q' strings, got {token!r}")
    try:
        return Fraction(token)
    except (TypeError, ValueError, ZeroDivisionError):
        raise DomainRejection(f"bad matrix entry {token!r}")


def cmd_hamming(args):
    if args.action == "mu":
        print(fraction_text(hypercube_mu(args.d)))
    elif args.action == "bounds":
        bounds = kappa_lower_bounds(args.q, args.d)
        report = {key: (fraction_text(value) if key != "spectrum" else value) for key, value in bounds.items()}
        print(json.dumps(report, sort_keys=True))
    elif args.action == "pathdec":
        decomposition = hypercube_path_decomposition(args.d)
        print(decomposition.width)
    elif args.action == "embed":
        embedding = hamming_embed(args.q, args.d)
        print(json.dumps({"source": [args.q, args.d], "target_vertices": embedding.target.result.vertex_count,
                          "mapping": list(embedding.mapping)}))
    else:
        sys.stdout.write(format_pattern(hamming(args.q, args.d)))
    return 0


def cmd_experiment(args):
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        missing = [flag for flag, value in (("--graph", args.graph), ("--kind", args.kind), ("--n", args.n),
                                            ("--seed", args.seed), ("--output", args.output)) if value is None]
        if missing:
            raise DomainRejection(f"experiment needs --config or {', '.join(missing)}")
        config = ExperimentConfig(
            pattern=args.graph, kind=args.kind, n_grid=args.n, trials=args.trials, seed=args.seed,
            output=args.output, weighting=args.weighting, size_cap=args.size_cap,
            sequence=args.sequence, record_timing=not args.no_timing, max_workers=args.workers,
        )
    table = run_experiment(config)
    print(f"{config.output}: {len(table)} rows")
    return 0


# -- parser ---------------------------------------------------------------------

def build_parser():
    parser = ToolkitArgumentParser(prog="run_kappa_toolkit", description="Colored subgraph toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    def inputs(sub, weighting=True):
        sub.add_argument('--graph', required=True, help='Pattern graph file (p/e format)')
        if weighting:
            sub.add_argument('--weighting', default=UNIFORM_WALK,
                             help=f'Weighting file or {UNIFORM_WALK!r} (default: {UNIFORM_WALK})')

    gen = commands.add_parser('gen', help='Sample X_Δ(n) and print its dump')
    inputs(gen)
    gen.add_argument('--n', type=int, required=True, help='Scale n')
    gen.add_argument('--seed', type=int, required=True, help='Sampling seed')
    gen.add_argument('--output', help='Write the dump here instead of stdout')
    gen.add_argument('--workers', type=int, default=1, help='Threads across pattern edges')

    kappa = commands.add_parser('kappa', help='Exact κ, witnesses, search and Hamming analytics')
    kappa.add_argument('action', choices=['exact', 'witness', 'search', 'mu', 'bounds', 'pathdec'])
    kappa.add_argument('--graph', help='Pattern graph file')
    kappa.add_argument('--weighting', default=UNIFORM_WALK, help='Weighting file or uniform-walk')
    kappa.add_argument('--kind', default='clique', choices=['clique', 'hypercube'], help='Witness construction')
    kappa.add_argument('--seed', type=int, help='Search seed (required for search)')
    kappa.add_argument('--iterations', type=int, default=50, help='Search steps per restart')
    kappa.add_argument('--restarts', type=int, default=4, help='Search restarts')
    kappa.add_argument('--workers', type=int, default=1, help='Search processes')
    kappa.add_argument('--output', help='Write the best searched weighting here')
    kappa.add_argument('--witness-out', help='Write the witness union sequence as JSON')
    kappa.add_argument('--q', type=int, default=2, help='Hamming alphabet size')
    kappa.add_argument('--d', type=int, help='Hamming dimension')

    solve = commands.add_parser('solve', help='Decide Sub_G(X) on a sampled host graph')
    solve.add_argument('method', choices=['brute', 'join', 'trie'])
    inputs(solve)
    solve.add_argument('--n', type=int, required=True, help='Scale n')
    solve.add_argument('--seed', type=int, required=True, help='Sampling seed')
    solve.add_argument('--sequence', help='Union sequence JSON (default: exact-κ witness)')
    solve.add_argument('--exponent', type=float, help='Trie polylog exponent a')
    solve.add_argument('--no-fallback', action='store_true', help='Do not fall back to join on trie overflow')

    markov = commands.add_parser('markov', help='Markov-chain view of weightings')
    markov.add_argument('action', choices=['decompose', 'compose'])
    inputs(markov)
    markov.add_argument('--matrix', help='Column-stochastic matrix JSON (compose)')

    ham = commands.add_parser('hamming', help='Hamming graph analytics')
    ham.add_argument('action', choices=['mu', 'bounds', 'pathdec', 'embed', 'graph'])
    ham.add_argument('--q', type=int, default=2, help='Alphabet size')
    ham.add_argument('--d', type=int, required=True, help='Dimension')

    experiment = commands.add_parser('experiment', help='Run an experiment and write its CSV')
    experiment.add_argument('--config', help='ExperimentConfig JSON file')
    experiment.add_argument('--graph', help='Pattern graph file')
    experiment.add_argument('--weighting', default=UNIFORM_WALK, help='Weighting file or uniform-walk')
    experiment.add_argument('--kind', choices=EXPERIMENT_KINDS, help='Experiment kind')
    experiment.add_argument('--n', type=int, nargs='+', help='n grid')
    experiment.add_argument('--trials', type=int, default=20, help='Trials per n (default: 20)')
    experiment.add_argument('--seed', type=int, help='Base seed')
    experiment.add_argument('--output', help='CSV path')
    experiment.add_argument('--size-cap', type=int, default=3, help='Largest v(H) enumerated')
    experiment.add_argument('--sequence', help='Union sequence JSON for scaling')
    experiment.add_argument('--no-timing', action='store_true', help='Omit wall-time columns')
    experiment.add_argument('--workers', type=int, default=1, help='Trial threads')
    return parser


COMMANDS = {
    'gen': cmd_gen,
    'kappa': cmd_kappa,
    'solve': cmd_solve,
    'markov': cmd_markov,
    'hamming': cmd_hamming,
    'experiment': cmd_experiment,
}


def cli(argv=None):
    """Run one subcommand; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return int(exit_request.code or 0)

    try:
        if args.command == 'kappa' and args.action in ('exact', 'witness', 'search') and not args.graph:
            raise DomainRejection(f"kappa {args.action} needs --graph")
        if args.command == 'kappa' and args.action in ('mu', 'bounds', 'pathdec') and args.d is None:
            raise DomainRejection(f"kappa {args.action} needs --d")
        if args.command == 'markov' and args.action == 'compose' and not args.matrix:
            raise DomainRejection("markov compose needs --matrix")
        return COMMANDS[args.command](args)
    except DomainRejection as e:
        logger.error(f"Rejected: {e}")
        return 1
    except InternalCheckError as e:
        logger.error(f"Internal check failed: {e}")
        return 2
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Could not read input: {e}")
        return 1


def main():
    """Main entry point for the script."""
    return cli()


if __name__ == "__main__":
    sys.exit(main())
