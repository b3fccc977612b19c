"""
Loaders and writers for graph inputs: whitespace edge lists, the TU multi-file
graph-classification layout, synthetic dataset JSON, and embedding CSV files.
"""

import csv
import json
import os

import numpy as np

from core.errors import (
    ParseError, EmptyInputError, MissingFileError, InconsistentIndicatorError, SelfLoopError,
    InputError,
)
from core.graph import Graph, LabeledGraph, build_graph
from core.synth import ShapeDataset
from utils.logger import get_logger

Logger = get_logger()


def _require_file(path):
    if not os.path.isfile(path):
        raise MissingFileError(f"File not found: {path}")


# =============================================================================
# Edge lists
# =============================================================================
def load_edge_list(path):
    """
    Parse "u v" lines ('#' starts a comment). Node labels are arbitrary strings,
    numbered in order of first appearance.

    Returns:
        (Graph, labels) where labels[i] is the string label of node i
    Raises:
        ParseError: malformed line or self-loop
        EmptyInputError: no edges
    """
    _require_file(path)
    index = {}
    edges = set()
    order = []
    duplicates = 0
    with open(path, 'r', newline=None) as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise ParseError(line_no, f"expected 2 fields, got {len(tokens)}")
            a, b = tokens
            if a == b:
                raise ParseError(line_no, f"self-loop on '{a}'") from SelfLoopError(a)
            u = index.setdefault(a, len(index))
            v = index.setdefault(b, len(index))
            pair = (min(u, v), max(u, v))
            if pair in edges:
                duplicates += 1
                continue
            edges.add(pair)
            order.append(pair)
    if not order:
        raise EmptyInputError(f"No edges in {path}")
    if duplicates:
        Logger.warning(f"Collapsed {duplicates} duplicate edges in {path}")
    labels = [None] * len(index)
    for label, i in index.items():
        labels[i] = label
    return build_graph(len(index), order), labels


def save_edge_list(path, graph, labels=None):
    """One "u v" line per edge, u < v, using string labels when given."""
    names = labels if labels is not None else [str(i) for i in range(graph.node_count)]
    with open(path, 'w') as f:
        for u, v in graph.edges():
            f.write(f"{names[u]} {names[v]}\n")
    return path


# =============================================================================
# TU datasets
# =============================================================================
def _read_ints(path, per_line):
    rows = []
    with open(path, 'r', newline=None) as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = [p for p in line.replace(',', ' ').split()]
            if len(parts) != per_line:
                raise ParseError(line_no, f"{os.path.basename(path)}: expected {per_line} values, got {len(parts)}")
            try:
                rows.append([int(float(p)) for p in parts])
            except ValueError:
                raise ParseError(line_no, f"{os.path.basename(path)}: non-numeric value in '{line}'")
    return rows


def load_tu_dataset(directory, name):
    """
    Read <name>_A.txt, <name>_graph_indicator.txt, <name>_graph_labels.txt and,
    when present, <name>_node_labels.txt (one-hot encoded as node attributes).
    Node ids are 1-based and global; graph labels are remapped to 0..C-1.

    Raises:
        MissingFileError: a required file is absent
        InconsistentIndicatorError: indicator, labels and edges disagree
    """
    def part(suffix):
        return os.path.join(directory, f"{name}_{suffix}.txt")

    for suffix in ('A', 'graph_indicator', 'graph_labels'):
        _require_file(part(suffix))

    indicator = np.array([r[0] for r in _read_ints(part('graph_indicator'), 1)], dtype=np.int64)
    graph_labels = [r[0] for r in _read_ints(part('graph_labels'), 1)]
    if indicator.size == 0:
        raise EmptyInputError(f"{name}: empty graph indicator")
    graph_count = len(graph_labels)
    present = np.unique(indicator)
    if present[0] != 1 or present[-1] != graph_count or present.size != graph_count:
        raise InconsistentIndicatorError(
            f"{name}: indicator covers graphs {present[0]}..{present[-1]} ({present.size} distinct), "
            f"{graph_count} graph labels"
        )
    if np.any(np.diff(indicator) < 0):
        raise InconsistentIndicatorError(f"{name}: graph indicator is not grouped by graph")

    node_count = indicator.size
    starts = np.searchsorted(indicator, np.arange(1, graph_count + 1))
    ends = np.append(starts[1:], node_count)

    per_graph = [set() for _ in range(graph_count)]
    self_loops = 0
    for line_no, (a, b) in enumerate(_read_ints(part('A'), 2), start=1):
        if not (1 <= a <= node_count and 1 <= b <= node_count):
            raise InconsistentIndicatorError(f"{name}_A.txt line {line_no}: node id outside 1..{node_count}")
        if a == b:
            self_loops += 1
            continue
        ga, gb = indicator[a - 1], indicator[b - 1]
        if ga != gb:
            raise InconsistentIndicatorError(f"{name}_A.txt line {line_no}: edge ({a}, {b}) spans graphs {ga} and {gb}")
        g = ga - 1
        u, v = a - 1 - starts[g], b - 1 - starts[g]
        per_graph[g].add((min(u, v), max(u, v)))
    if self_loops:
        Logger.warning(f"{name}: skipped {self_loops} self-loops")

    attributes = None
    if os.path.isfile(part('node_labels')):
        node_labels = np.array([r[0] for r in _read_ints(part('node_labels'), 1)], dtype=np.int64)
        if node_labels.size != node_count:
            raise InconsistentIndicatorError(f"{name}: {node_labels.size} node labels for {node_count} nodes")
        values, codes = np.unique(node_labels, return_inverse=True)
        attributes = np.eye(len(values))[codes]

    classes, remapped = np.unique(np.asarray(graph_labels), return_inverse=True)
    dataset = []
    for g in range(graph_count):
        n = int(ends[g] - starts[g])
        adjacency = [[] for _ in range(n)]
        for u, v in per_graph[g]:
            adjacency[u].append(int(v))
            adjacency[v].append(int(u))
        graph = Graph(n, tuple(tuple(sorted(a)) for a in adjacency))
        dataset.append(LabeledGraph(
            graph=graph,
            label=int(remapped[g]),
            attributes=None if attributes is None else attributes[starts[g]:ends[g]],
        ))
    Logger.debug(f"{name}: {graph_count} graphs, {len(classes)} classes, {node_count} nodes")
    return dataset


# =============================================================================
# Synthetic dataset JSON
# =============================================================================
def save_dataset(path, ds):
    with open(path, 'w') as f:
        json.dump(ds.to_dict(), f, indent=1, sort_keys=True)
        f.write('\n')
    return path


def load_dataset(path):
    _require_file(path)
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, f"invalid JSON: {e.msg}")
    for key in ('nodes', 'edges', 'labels'):
        if key not in data:
            raise InputError(f"{path}: missing '{key}'")
    return ShapeDataset.from_dict(data)


# =============================================================================
# Embedding CSV
# =============================================================================
def load_embedding_csv(path):
    """
    Returns:
        (nodes, values) with nodes the first column as strings and values an n x R array
    """
    _require_file(path)
    with open(path, 'r', newline='') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header or header[0] != 'node':
            raise ParseError(1, "expected header 'node,h1..hR'")
        nodes, rows = [], []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(line_no, f"expected {len(header)} fields, got {len(row)}")
            nodes.append(row[0])
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError:
                raise ParseError(line_no, "non-numeric entropy value")
    return nodes, np.asarray(rows, dtype=float).reshape(len(rows), len(header) - 1)
