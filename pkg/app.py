"""
VNEstruct - Main Application
Orchestrates the pipelines behind each CLI command:
embed, synth, eval-roles, sweep-noise, classify-graphs and bench.
"""

import os
import time

import networkx as nx
import numpy as np

from config.settings import (
    VERSION, REPORT_COLUMNS, BENCH_DEGREE, BENCH_RADIUS, CYCLE_LENGTH, SHAPE_INSTANCES,
)
from core.csv_dumper import EmbeddingDumper, dump_json, dump_table, write_provenance
from core.embed import EmbeddingConfig, embed_graph, profile_embedding
from core.errors import InputError
from core.evalkit import classify_roles, evaluate_clustering, format_table, report_row
from core.graph import build_graph
from core.loaders import load_dataset, load_edge_list, load_tu_dataset, save_dataset
from core.readout import TrainConfig, train
from core.synth import configuration_from_name, make_triangle_dataset, perturb
from core.validator import validate_embedding_file, print_validation_report
from utils.logger import get_logger
from utils.progress import TaskProgress

Logger = get_logger()


def _banner(title, fields):
    print(f"\n{'=' * 60}")
    print(f"  {title}")
    print(f"{'=' * 60}")
    for key, value in fields:
        print(f"  {key + ':':<12}{value}")
    print(f"{'=' * 60}\n")


def _ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


# =============================================================================
# embed
# =============================================================================
def run_embed(input_path, radius, mode, standardize, out, seed=0, threads=1, progress=True):
    """Embed every node of an edge-list graph and write CSV (or JSON by extension)."""
    graph, labels = load_edge_list(input_path)
    cfg = EmbeddingConfig(max_radius=radius, mode=mode, standardize=standardize, workers=threads)

    _banner("VNEstruct Node Embedding", [
        ("Input", input_path),
        ("Graph", f"n={graph.node_count} m={graph.edge_count}"),
        ("Radius", radius),
        ("Mode", mode),
        ("Threads", threads),
        ("Output", os.path.abspath(out)),
    ])

    _ensure_parent(out)
    start = time.time()
    matrix = embed_graph(graph, cfg, progress=progress)
    path = EmbeddingDumper(matrix, labels).dump(out)
    elapsed = time.time() - start
    write_provenance(path, {
        'command': 'embed', 'seed': seed, 'input': os.path.abspath(input_path), **matrix.provenance,
    })
    print(f"  ✓ Written to {path} ({elapsed:.1f}s)")

    if not path.lower().endswith('.json'):
        results = validate_embedding_file(path, expected_rows=graph.node_count, expected_radius=radius)
        print_validation_report(results)
    return matrix


# =============================================================================
# synth
# =============================================================================
def run_synth(config, perturb_k, seed, out, instances=SHAPE_INSTANCES, cycle_len=CYCLE_LENGTH):
    """Generate a shape-on-cycle dataset, optionally rewired, and save it as JSON."""
    ds = configuration_from_name(config, seed=seed, instances=instances, cycle_len=cycle_len)
    if perturb_k:
        ds = perturb(ds, perturb_k, seed)
    _ensure_parent(out)
    save_dataset(out, ds)
    write_provenance(out, {
        'command': 'synth', 'seed': seed, 'config': config, 'perturb': perturb_k,
        'instances': instances, 'cycle_len': cycle_len, 'graph_hash': ds.graph.fingerprint(),
    })
    _banner("VNEstruct Synthetic Dataset", [
        ("Config", config),
        ("Graph", f"n={ds.graph.node_count} m={ds.graph.edge_count}"),
        ("Classes", ", ".join(ds.class_names)),
        ("Rewired", ds.rewired_edges),
        ("Seed", seed),
        ("Output", os.path.abspath(out)),
    ])
    return ds


# =============================================================================
# eval-roles / sweep-noise
# =============================================================================
def evaluate_roles(ds, cfg, seed, threads=1):
    """Embed, z-score, cluster (k = class count) and classify one role dataset."""
    matrix = embed_graph(ds.graph, cfg).standardized()
    clustering = evaluate_clustering(matrix.values, ds.labels, seed=seed, workers=threads)
    classification = classify_roles(matrix.values, ds.labels, seed=seed, workers=threads)
    return clustering, classification


def _trial_datasets(config, dataset_path, trials, perturb_k, seed):
    if dataset_path:
        return [load_dataset(dataset_path)]
    datasets = []
    for t in range(trials):
        ds = configuration_from_name(config, seed=seed + t)
        if perturb_k:
            ds = perturb(ds, perturb_k, [seed, t])
        datasets.append(ds)
    return datasets


def run_eval_roles(dataset_path, config, radius, mode, seed, out=None, trials=1, perturb_k=0, threads=1):
    """Role clustering and classification; prints one Table-style row."""
    if not dataset_path and not config:
        raise InputError("Either a dataset file or a configuration name is required")
    cfg = EmbeddingConfig(max_radius=radius, mode=mode, workers=threads)
    datasets = _trial_datasets(config, dataset_path, trials, perturb_k, seed)
    name = dataset_path or (config + (f" (k={perturb_k})" if perturb_k else ""))

    _banner("VNEstruct Role Evaluation", [
        ("Dataset", name),
        ("Trials", len(datasets)),
        ("Radius", radius),
        ("Mode", mode),
        ("Seed", seed),
    ])

    clusterings, classifications = [], []
    with TaskProgress(len(datasets), "trials", unit="graph") as tracker:
        for t, ds in enumerate(datasets):
            clustering, classification = evaluate_roles(ds, cfg, seed + t, threads)
            clusterings.append(clustering)
            classifications.append(classification)
            tracker.update()

    row = report_row(os.path.basename(name), clusterings, classifications)
    print(format_table([row]))
    print()

    report = {
        'row': row,
        'trials': [
            {'clustering': {k: v for k, v in c.to_dict().items() if k != 'assignments'},
             'classification': r.to_dict()}
            for c, r in zip(clusterings, classifications)
        ],
        'provenance': {
            'command': 'eval-roles', 'seed': seed, 'config': cfg.describe(), 'version': VERSION,
            'dataset': dataset_path, 'configuration': config, 'perturb': perturb_k,
        },
    }
    if out:
        _ensure_parent(out)
        dump_json(out, report)
        print(f"  ✓ Report written to {out}")
    return report


def run_sweep_noise(config, k_max, trials, radius, mode, seed, out=None, threads=1):
    """Metrics against the number of rewired edges, k = 0..k_max."""
    if k_max < 0 or trials < 1:
        raise InputError("k_max must be >= 0 and trials >= 1")
    cfg = EmbeddingConfig(max_radius=radius, mode=mode, workers=threads)
    base = [configuration_from_name(config, seed=seed + t) for t in range(trials)]

    _banner("VNEstruct Noise Sweep", [
        ("Config", config),
        ("k", f"0..{k_max}"),
        ("Trials", trials),
        ("Radius", radius),
        ("Seed", seed),
    ])

    rows = []
    with TaskProgress((k_max + 1) * trials, "sweep", unit="graph") as tracker:
        for k in range(k_max + 1):
            clusterings, classifications = [], []
            for t, ds in enumerate(base):
                noisy = perturb(ds, k, [seed, t, k]) if k else ds
                clustering, classification = evaluate_roles(noisy, cfg, seed + t, threads)
                clusterings.append(clustering)
                classifications.append(classification)
                tracker.update()
            summary = report_row(f"k={k}", clusterings, classifications)
            row = {'k': k}
            for column in REPORT_COLUMNS:
                row[column] = summary[column]['mean']
                row[f"{column} std"] = summary[column]['std']
            rows.append(row)

    columns = ['k'] + [c for column in REPORT_COLUMNS for c in (column, f"{column} std")]
    for row in rows:
        print("  " + "  ".join(f"{row[c]:.3f}" if c != 'k' else f"k={row[c]:<3}" for c in ['k'] + REPORT_COLUMNS))
    if out:
        _ensure_parent(out)
        dump_table(out, columns, rows)
        write_provenance(out, {
            'command': 'sweep-noise', 'seed': seed, 'config': config, 'k_max': k_max,
            'trials': trials, 'embedding': cfg.describe(),
        })
        print(f"\n  ✓ Sweep written to {out}")
    return rows


# =============================================================================
# classify-graphs
# =============================================================================
def run_classify_graphs(tu_dir, name, folds, epochs, seed, out=None, threads=1,
                        radius_grid=None, hidden_grid=None, attributes='auto', mode='auto',
                        cache_dir=None, triangles=0):
    """
    Graph classification with cross-validation. Loads a TU dataset, or a seeded
    triangle / triangle-free set when `triangles` is a positive graph count.
    """
    if triangles:
        dataset = make_triangle_dataset(count=triangles, seed=seed)
        name = name or 'triangles'
    elif tu_dir and name:
        dataset = load_tu_dataset(tu_dir, name)
    else:
        raise InputError("Either --tu-dir with --name, or --triangles, is required")

    kwargs = {}
    if radius_grid:
        kwargs['radius_grid'] = tuple(radius_grid)
    if hidden_grid:
        kwargs['hidden_grid'] = tuple(hidden_grid)
    cfg = TrainConfig(epochs=epochs, folds=folds, seed=seed, workers=threads,
                      attributes=attributes, mode=mode, **kwargs)

    _banner("VNEstruct Graph Classification", [
        ("Dataset", name),
        ("Graphs", len(dataset)),
        ("Folds", folds),
        ("Epochs", epochs),
        ("Radii", ",".join(map(str, cfg.radius_grid))),
        ("Widths", ",".join(map(str, cfg.hidden_grid))),
        ("Seed", seed),
    ])

    start = time.time()
    result = train(dataset, cfg, cache_dir=cache_dir, progress=True)
    elapsed = time.time() - start

    for fold, acc in enumerate(result.fold_accuracy):
        r, w = result.selected[fold]
        print(f"  Fold {fold + 1:>2}: accuracy {acc:.3f}  (R={r}, width={w})")
    print(f"\n  Accuracy:   {result.mean_accuracy:.4f} ± {result.std_accuracy:.4f}")
    print(f"  Epoch time: {result.epoch_seconds * 1000:.2f} ms")
    print(f"  Final:      R={result.radius}, width={result.width}")
    print(f"  Elapsed:    {elapsed:.1f}s\n")

    report = {
        **result.to_dict(),
        'model': result.model.to_dict(),
        'provenance': {
            'command': 'classify-graphs', 'seed': seed, 'dataset': name, 'folds': folds,
            'epochs': epochs, 'attributes': attributes, 'mode': mode, 'version': VERSION,
            'radius_grid': list(cfg.radius_grid), 'hidden_grid': list(cfg.hidden_grid),
        },
    }
    if out:
        _ensure_parent(out)
        dump_json(out, report)
        print(f"  ✓ Report written to {out}")
    return report


# =============================================================================
# bench
# =============================================================================
def check_bench_size(n, degree):
    """A degree-regular graph on n nodes exists only when degree < n and n * degree is even."""
    if degree < 1 or degree >= n:
        raise InputError(f"Bench degree must be in [1, n), got degree={degree} for n={n}")
    if (n * degree) % 2:
        raise InputError(f"n * degree must be even for a regular graph, got {n} * {degree}")


def bench_graph(n, degree=BENCH_DEGREE, seed=0):
    """Seeded random regular graph as a Graph."""
    check_bench_size(n, degree)
    g = nx.random_regular_graph(degree, n, seed=seed)
    return build_graph(n, list(g.edges()))


def run_bench(sizes, mode, seed, radius=BENCH_RADIUS, degree=BENCH_DEGREE, out=None):
    """Embedding wall time per graph size, split into ego extraction and entropy."""
    for n in sizes:
        check_bench_size(n, degree)
    cfg = EmbeddingConfig(max_radius=radius, mode=mode)
    _banner("VNEstruct Scaling Benchmark", [
        ("Sizes", ",".join(map(str, sizes))),
        ("Degree", degree),
        ("Radius", radius),
        ("Mode", mode),
        ("Seed", seed),
    ])

    rows = []
    previous = None
    print(f"  {'n':>7} {'m':>7} {'ego (s)':>9} {'entropy (s)':>12} {'total (s)':>10} {'ratio':>7}")
    for n in sizes:
        graph = bench_graph(n, degree, seed)
        profile = profile_embedding(graph, cfg)
        ratio = profile['total_seconds'] / previous if previous else float('nan')
        previous = profile['total_seconds']
        rows.append({
            'n': n,
            'm': graph.edge_count,
            'ego_seconds': profile['ego_seconds'],
            'entropy_seconds': profile['entropy_seconds'],
            'total_seconds': profile['total_seconds'],
            'ratio': ratio,
        })
        ratio_text = "-" if np.isnan(ratio) else f"{ratio:.2f}"
        print(f"  {n:>7} {graph.edge_count:>7} {profile['ego_seconds']:>9.3f} "
              f"{profile['entropy_seconds']:>12.3f} {profile['total_seconds']:>10.3f} {ratio_text:>7}")
    print()

    if out:
        _ensure_parent(out)
        dump_table(out, list(rows[0].keys()), rows)
        write_provenance(out, {
            'command': 'bench', 'seed': seed, 'sizes': list(sizes), 'degree': degree,
            'embedding': cfg.describe(),
        })
        print(f"  ✓ Benchmark written to {out}")
    return rows
