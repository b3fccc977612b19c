"""
VNEstruct - CLI Interface
Usage: python cli.py embed --input graph.txt --radius 4 --mode exact --out emb.csv
"""

import sys
import os

import click

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config.settings import (
    VERSION, DEFAULT_RADIUS, DEFAULT_THREADS, MAX_THREADS, MODE_CHOICES, CONFIG_CHOICES,
    ATTRIBUTE_CHOICES, TRAIN_FOLDS, TRAIN_EPOCHS, BENCH_RADIUS, BENCH_DEGREE,
    EXIT_INPUT_ERROR, EXIT_CONVERGENCE, resolve_sizes, resolve_int_list,
)
from core.errors import ConvergenceError, InputError
from utils.logger import get_logger
import app


def _run(fn, **kwargs):
    """Run an orchestrator, mapping failures to exit codes."""
    try:
        fn(**kwargs)
    except KeyboardInterrupt:
        print("\n\n  Interrupted.")
        sys.exit(EXIT_INPUT_ERROR)
    except ConvergenceError as e:
        print(f"\n  Error: {e}", file=sys.stderr)
        sys.exit(EXIT_CONVERGENCE)
    except (InputError, OSError) as e:
        print(f"\n  Error: {e}", file=sys.stderr)
        sys.exit(EXIT_INPUT_ERROR)


def _parsed(resolver, value):
    if value is None:
        return None
    try:
        return resolver(value)
    except ValueError as e:
        raise InputError(str(e))


seed_option = click.option('--seed', default=0, show_default=True, type=int, help='Random seed')
threads_option = click.option(
    '--threads',
    default=DEFAULT_THREADS,
    type=click.IntRange(1, MAX_THREADS),
    help=f'Number of worker threads (default: {DEFAULT_THREADS})',
)
mode_option = click.option(
    '--mode',
    default='auto',
    type=click.Choice(MODE_CHOICES, case_sensitive=False),
    help='Entropy computation: exact, approx, or auto (default: auto)',
)


@click.group(context_settings=dict(help_option_names=['-h', '--help']))
@click.version_option(VERSION)
@click.option('-v', '--verbose', is_flag=True, default=False, help='Show warnings on the console')
@click.option('--log-file', default=None, type=click.Path(), help='Write a DEBUG log to this file')
def main(verbose, log_file):
    """
    VNEstruct - structural node embeddings from ego-network Von Neumann entropies.

    \b
    Examples:
      python cli.py embed --input graph.txt --radius 4 --mode exact --out emb.csv
      python cli.py synth --config basic-house --perturb 10 --seed 7 --out ds.json
      python cli.py eval-roles --dataset ds.json --radius 4 --seed 0 --out report.json
      python cli.py sweep-noise --config basic-house --k-max 20 --trials 20 --out sweep.csv
      python cli.py classify-graphs --tu-dir data/MUTAG --name MUTAG --folds 10 --epochs 300
      python cli.py bench --sizes 1k,2k,4k,8k --mode approx
    """
    get_logger(log_file=log_file, verbose=verbose)


@main.command()
@click.option('-i', '--input', 'input_path', required=True, type=click.Path(), help='Edge-list file')
@click.option('-r', '--radius', default=DEFAULT_RADIUS, type=click.IntRange(1), help='Largest ego-network radius R')
@mode_option
@click.option('--standardize', is_flag=True, default=False, help='Z-score each radius column')
@click.option('-o', '--out', required=True, type=click.Path(), help='Output .csv (or .json)')
@seed_option
@threads_option
def embed(input_path, radius, mode, standardize, out, seed, threads):
    """Embed every node of an edge-list graph."""
    _run(app.run_embed, input_path=input_path, radius=radius, mode=mode.lower(),
         standardize=standardize, out=out, seed=seed, threads=threads)


@main.command()
@click.option('-c', '--config', required=True, type=click.Choice(CONFIG_CHOICES), help='Shape configuration')
@click.option('-k', '--perturb', 'perturb_k', default=0, type=click.IntRange(0), help='Edges to rewire')
@click.option('--instances', default=10, type=click.IntRange(1), help='Shapes per kind (default: 10)')
@click.option('--cycle-len', default=30, type=click.IntRange(3), help='Cycle length (default: 30)')
@click.option('-o', '--out', required=True, type=click.Path(), help='Output dataset JSON')
@seed_option
def synth(config, perturb_k, instances, cycle_len, out, seed):
    """Generate a shapes-on-a-cycle role dataset."""
    _run(app.run_synth, config=config, perturb_k=perturb_k, seed=seed, out=out,
         instances=instances, cycle_len=cycle_len)


@main.command('eval-roles')
@click.option('-d', '--dataset', 'dataset_path', default=None, type=click.Path(), help='Dataset JSON from synth')
@click.option('-c', '--config', default=None, type=click.Choice(CONFIG_CHOICES), help='Generate graphs instead')
@click.option('--trials', default=1, type=click.IntRange(1), help='Seeded graphs to average (with --config)')
@click.option('-k', '--perturb', 'perturb_k', default=0, type=click.IntRange(0), help='Edges to rewire (with --config)')
@click.option('-r', '--radius', default=DEFAULT_RADIUS, type=click.IntRange(1), help='Largest ego-network radius R')
@mode_option
@click.option('-o', '--out', default='roles_report.json', type=click.Path(),
              help='Report JSON with provenance (default: roles_report.json)')
@seed_option
@threads_option
def eval_roles(dataset_path, config, trials, perturb_k, radius, mode, out, seed, threads):
    """Cluster and classify structural roles."""
    _run(app.run_eval_roles, dataset_path=dataset_path, config=config, radius=radius,
         mode=mode.lower(), seed=seed, out=out, trials=trials, perturb_k=perturb_k, threads=threads)


@main.command('sweep-noise')
@click.option('-c', '--config', default='basic-house', type=click.Choice(CONFIG_CHOICES), help='Shape configuration')
@click.option('--k-max', default=20, type=click.IntRange(0), help='Largest rewired edge count')
@click.option('--trials', default=20, type=click.IntRange(1), help='Seeded graphs per k')
@click.option('-r', '--radius', default=DEFAULT_RADIUS, type=click.IntRange(1), help='Largest ego-network radius R')
@mode_option
@click.option('-o', '--out', default='sweep.csv', type=click.Path(), help='Output CSV')
@seed_option
@threads_option
def sweep_noise(config, k_max, trials, radius, mode, out, seed, threads):
    """Role metrics against the number of rewired edges."""
    _run(app.run_sweep_noise, config=config, k_max=k_max, trials=trials, radius=radius,
         mode=mode.lower(), seed=seed, out=out, threads=threads)


@main.command('classify-graphs')
@click.option('--tu-dir', default=None, type=click.Path(), help='Directory holding TU-format files')
@click.option('--name', default=None, help='TU dataset name (file prefix), e.g. MUTAG')
@click.option('--triangles', default=0, type=click.IntRange(0), help='Use N synthetic triangle/triangle-free graphs')
@click.option('--folds', default=TRAIN_FOLDS, type=click.IntRange(2), help=f'Cross-validation folds (default: {TRAIN_FOLDS})')
@click.option('--epochs', default=TRAIN_EPOCHS, type=click.IntRange(1), help=f'Training epochs (default: {TRAIN_EPOCHS})')
@click.option('--radii', default=None, help='Radius grid, e.g. 1,2,3,4')
@click.option('--widths', default=None, help='Hidden width grid, e.g. 8,16,32')
@click.option('--attributes', default='auto', type=click.Choice(ATTRIBUTE_CHOICES), help='Node attributes')
@mode_option
@click.option('--cache-dir', default=None, type=click.Path(), help='Reuse embeddings across runs')
@click.option('-o', '--out', default='classify_report.json', type=click.Path(),
              help='Report JSON with the model and provenance (default: classify_report.json)')
@seed_option
@threads_option
def classify_graphs(tu_dir, name, triangles, folds, epochs, radii, widths, attributes, mode,
                    cache_dir, out, seed, threads):
    """Graph classification with the sum-pooled readout."""
    try:
        radius_grid = _parsed(resolve_int_list, radii)
        hidden_grid = _parsed(resolve_int_list, widths)
    except InputError as e:
        print(f"\n  Error: {e}", file=sys.stderr)
        sys.exit(EXIT_INPUT_ERROR)
    _run(app.run_classify_graphs, tu_dir=tu_dir, name=name, folds=folds, epochs=epochs, seed=seed,
         out=out, threads=threads, radius_grid=radius_grid, hidden_grid=hidden_grid,
         attributes=attributes, mode=mode.lower(), cache_dir=cache_dir, triangles=triangles)


@main.command()
@click.option('--sizes', default='1k,2k,4k,8k', help='Graph sizes, e.g. 1k,2k,4k,8k')
@mode_option
@click.option('-r', '--radius', default=BENCH_RADIUS, type=click.IntRange(1), help=f'Ego-network radius (default: {BENCH_RADIUS})')
@click.option('--degree', default=BENCH_DEGREE, type=click.IntRange(1), help=f'Node degree (default: {BENCH_DEGREE})')
@click.option('-o', '--out', default='bench.csv', type=click.Path(), help='Output CSV (default: bench.csv)')
@seed_option
def bench(sizes, mode, radius, degree, out, seed):
    """Embedding wall time against graph size."""
    try:
        size_list = _parsed(resolve_sizes, sizes)
    except InputError as e:
        print(f"\n  Error: {e}", file=sys.stderr)
        sys.exit(EXIT_INPUT_ERROR)
    _run(app.run_bench, sizes=size_list, mode=mode.lower(), seed=seed, radius=radius,
         degree=degree, out=out)


if __name__ == '__main__':
    main()
