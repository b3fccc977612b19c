"""
VNEstruct node embeddings: for every node v and radius r = 1..R, the Von Neumann
entropy of the r-hop ego-network G_v^r. Row v of the embedding matrix is h_v.
"""

import concurrent.futures
import time
from dataclasses import dataclass, field

import numpy as np

from config.settings import (
    DEFAULT_RADIUS, EXACT_NODE_LIMIT, DEFAULT_THREADS, MODE_CHOICES, EntropyMode, VERSION,
)
from core.entropy import vne_exact, vne_approx
from core.errors import InputError
from core.graph import bfs_ball, bfs_layers, induced_subgraph
from utils.logger import get_logger
from utils.progress import TaskProgress

Logger = get_logger()


@dataclass(frozen=True)
class EmbeddingConfig:
    max_radius: int = DEFAULT_RADIUS
    mode: str = EntropyMode.AUTO
    standardize: bool = False
    exact_node_limit: int = EXACT_NODE_LIMIT
    workers: int = DEFAULT_THREADS

    def __post_init__(self):
        if self.max_radius < 1:
            raise InputError(f"max_radius must be >= 1, got {self.max_radius}")
        if self.mode not in MODE_CHOICES:
            raise InputError(f"mode must be one of {MODE_CHOICES}, got '{self.mode}'")
        if self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")

    def signature(self):
        """Everything that changes the raw entropies (not standardize or workers)."""
        return f"R={self.max_radius};mode={self.mode};limit={self.exact_node_limit}"

    def describe(self):
        return {
            'max_radius': self.max_radius,
            'mode': self.mode,
            'exact_node_limit': self.exact_node_limit,
            'standardize': self.standardize,
        }


@dataclass
class NodeEmbedding:
    node: int
    values: np.ndarray


@dataclass
class EmbeddingMatrix:
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def node_count(self):
        return self.values.shape[0]

    @property
    def radius(self):
        return self.values.shape[1]

    def row(self, v):
        return self.values[v]

    def standardized(self):
        return EmbeddingMatrix(
            values=standardize(self.values),
            provenance={**self.provenance, 'standardized': True},
        )


def ego_network(g, v, r):
    """Induced subgraph on every node within r hops of v."""
    sub, _ = induced_subgraph(g, bfs_ball(g, v, r))
    return sub


def ego_entropy(ego, cfg):
    """Entropy of one ego-network under the configured mode."""
    if cfg.mode == EntropyMode.EXACT:
        return vne_exact(ego)
    if cfg.mode == EntropyMode.APPROX:
        return vne_approx(ego).h_hat
    if ego.node_count <= cfg.exact_node_limit:
        return vne_exact(ego)
    return vne_approx(ego).h_hat


def embed_node(g, v, cfg):
    """h_v[r-1] = entropy of the r-hop ego-network, r = 1..R."""
    layers = bfs_layers(g, v, cfg.max_radius)
    values = np.zeros(cfg.max_radius)
    ball = list(layers[0])
    previous = None
    for r in range(1, cfg.max_radius + 1):
        if r < len(layers):
            ball.extend(layers[r])
            sub, _ = induced_subgraph(g, ball)
            previous = ego_entropy(sub, cfg)
        elif previous is None:
            # isolated node: the ego-network is the node alone
            previous = 0.0
        # ball stopped growing: same ego-network, same entropy
        values[r - 1] = previous
    return NodeEmbedding(node=v, values=values)


def embed_graph(g, cfg, progress=False):
    """
    Embedding matrix with one row per node. Rows are written into a preallocated
    array, so the result does not depend on the worker schedule.
    """
    n = g.node_count
    values = np.zeros((n, cfg.max_radius))

    def do_work(v):
        values[v] = embed_node(g, v, cfg).values

    tracker = TaskProgress(n, "embed", unit="node", disable=not progress)
    try:
        if cfg.workers == 1:
            for v in range(n):
                do_work(v)
                tracker.update()
        else:
            errors = {}
            with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as executor:
                futures = {executor.submit(do_work, v): v for v in range(n)}
                for future in concurrent.futures.as_completed(futures):
                    exc = future.exception()
                    if exc is not None:
                        errors[futures[future]] = exc
                    tracker.update(success=exc is None)
            if errors:
                first = min(errors)
                Logger.error(f"Embedding failed on {len(errors)} nodes, first at node {first}: {errors[first]}")
                raise errors[first]
    finally:
        tracker.close()

    provenance = {
        'graph_hash': g.fingerprint(),
        'nodes': n,
        'edges': g.edge_count,
        'config': cfg.describe(),
        'version': VERSION,
    }
    matrix = EmbeddingMatrix(values=values, provenance=provenance)
    return matrix.standardized() if cfg.standardize else matrix


def standardize(values):
    """Column z-scores with population std; constant columns become 0."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] == 0:
        return values.copy()
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    out = np.zeros_like(values)
    varying = std > 0.0
    out[:, varying] = (values[:, varying] - mean[varying]) / std[varying]
    return out


def profile_embedding(g, cfg):
    """
    Single-threaded embedding run with wall time split into ego-network extraction
    and entropy computation.
    """
    ego_seconds = 0.0
    entropy_seconds = 0.0
    values = np.zeros((g.node_count, cfg.max_radius))
    start = time.perf_counter()
    for v in range(g.node_count):
        t0 = time.perf_counter()
        layers = bfs_layers(g, v, cfg.max_radius)
        ego_seconds += time.perf_counter() - t0
        ball = list(layers[0])
        previous = 0.0
        for r in range(1, cfg.max_radius + 1):
            if r < len(layers):
                t0 = time.perf_counter()
                ball.extend(layers[r])
                sub, _ = induced_subgraph(g, ball)
                t1 = time.perf_counter()
                previous = ego_entropy(sub, cfg)
                t2 = time.perf_counter()
                ego_seconds += t1 - t0
                entropy_seconds += t2 - t1
            values[v, r - 1] = previous
    total = time.perf_counter() - start
    Logger.debug(f"profile n={g.node_count}: ego {ego_seconds:.3f}s entropy {entropy_seconds:.3f}s")
    return {
        'nodes': g.node_count,
        'edges': g.edge_count,
        'ego_seconds': ego_seconds,
        'entropy_seconds': entropy_seconds,
        'total_seconds': total,
        'values': values,
    }
