"""
Immutable simple undirected graph with the adjacency, degree and Laplacian views
the entropy kernels consume. Node ids are dense integers 0..n-1.
"""

import hashlib
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse

from core.errors import (
    SelfLoopError, DuplicateEdgeError, NodeOutOfRangeError, EmptySubsetError, InputError,
)


class Graph:
    """
    Simple undirected graph. Neighbor lists are sorted tuples, so iteration order
    (and everything computed from it) is deterministic.
    """

    __slots__ = ('_n', '_adj', '_degrees', '_m')

    def __init__(self, node_count, adjacency):
        # Trusted constructor: callers guarantee sorted, symmetric, loop-free lists.
        # Use build_graph() for unvalidated input.
        self._n = node_count
        self._adj = adjacency
        degrees = np.fromiter((len(a) for a in adjacency), dtype=np.int64, count=node_count)
        degrees.setflags(write=False)
        self._degrees = degrees
        self._m = int(degrees.sum()) // 2

    @property
    def node_count(self):
        return self._n

    @property
    def edge_count(self):
        return self._m

    @property
    def adjacency(self):
        return self._adj

    @property
    def degrees(self):
        return self._degrees

    def neighbors(self, v):
        return self._adj[v]

    def has_edge(self, u, v):
        nbrs = self._adj[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def edges(self):
        """Sorted list of (u, v) pairs with u < v."""
        return [(u, v) for u in range(self._n) for v in self._adj[u] if u < v]

    def laplacian(self):
        return LaplacianView(self)

    def fingerprint(self):
        """Order-independent hash over node count and the sorted edge list."""
        digest = hashlib.sha256(f"n={self._n};".encode())
        for u, v in self.edges():
            digest.update(f"{u}-{v};".encode())
        return digest.hexdigest()[:16]

    def relabel(self, permutation):
        """Return the isomorphic graph where node v becomes permutation[v]."""
        perm = [int(p) for p in permutation]
        if sorted(perm) != list(range(self._n)):
            raise InputError("relabel expects a permutation of 0..n-1")
        return build_graph(self._n, [(perm[u], perm[v]) for u, v in self.edges()])

    def to_networkx(self):
        import networkx as nx
        g = nx.Graph()
        g.add_nodes_from(range(self._n))
        g.add_edges_from(self.edges())
        return g

    def __eq__(self, other):
        return isinstance(other, Graph) and self._n == other._n and self._adj == other._adj

    def __hash__(self):
        return hash((self._n, self._adj))

    def __repr__(self):
        return f"Graph(n={self._n}, m={self._m})"


class LaplacianView:
    """L = D - A of a graph, accessed lazily by entry or materialized dense/sparse."""

    def __init__(self, source):
        self.source = source

    @property
    def trace(self):
        return 2 * self.source.edge_count

    def entry(self, i, j):
        g = self.source
        if i == j:
            return int(g.degrees[i])
        return -1 if g.has_edge(i, j) else 0

    def dense(self):
        g = self.source
        n = g.node_count
        mat = np.zeros((n, n), dtype=float)
        for u, nbrs in enumerate(g.adjacency):
            if nbrs:
                mat[u, list(nbrs)] = -1.0
        mat[np.diag_indices(n)] = g.degrees
        return mat

    def sparse(self):
        """CSR matrix with n + 2m stored entries."""
        g = self.source
        n = g.node_count
        rows, cols = [], []
        for u, nbrs in enumerate(g.adjacency):
            rows.extend([u] * len(nbrs))
            cols.extend(nbrs)
        adj = sparse.csr_matrix(
            (np.ones(len(rows)), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(n, n),
        )
        return (sparse.diags(g.degrees.astype(float)) - adj).tocsr()


def build_graph(n, edge_list):
    """
    Validate an edge list and build a Graph.

    Raises:
        NodeOutOfRangeError: an endpoint outside [0, n)
        SelfLoopError: a pair (u, u)
        DuplicateEdgeError: the same unordered pair twice
    """
    if n < 0:
        raise NodeOutOfRangeError(f"Node count must be nonnegative, got {n}")
    neighbor_sets = [set() for _ in range(n)]
    for u, v in edge_list:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise NodeOutOfRangeError(f"Edge ({u}, {v}) outside node range [0, {n})")
        if u == v:
            raise SelfLoopError(u)
        if v in neighbor_sets[u]:
            raise DuplicateEdgeError(u, v)
        neighbor_sets[u].add(v)
        neighbor_sets[v].add(u)
    return Graph(n, tuple(tuple(sorted(s)) for s in neighbor_sets))


def induced_subgraph(g, nodes):
    """
    Subgraph on `nodes` with every edge of g whose endpoints are both inside.

    Returns:
        (Graph, remap) where remap[i] is the original id of new node i (ascending).
    """
    ids = sorted(set(int(u) for u in nodes))
    if not ids:
        raise EmptySubsetError("induced_subgraph needs at least one node")
    if ids[0] < 0 or ids[-1] >= g.node_count:
        raise NodeOutOfRangeError(f"Subset ids outside [0, {g.node_count})")
    index = {u: i for i, u in enumerate(ids)}
    adj = tuple(
        tuple(index[w] for w in g.adjacency[u] if w in index)
        for u in ids
    )
    return Graph(len(ids), adj), np.asarray(ids, dtype=np.int64)


def bfs_layers(g, center, radius):
    """
    Breadth-first layers around center: layers[d] holds the nodes at distance d,
    for d = 0..radius (stops early when the component is exhausted).
    """
    if not 0 <= center < g.node_count:
        raise NodeOutOfRangeError(f"Center {center} outside [0, {g.node_count})")
    if radius < 1:
        raise InputError(f"Radius must be >= 1, got {radius}")
    seen = {center}
    layers = [[center]]
    frontier = deque([center])
    for _ in range(radius):
        next_layer = []
        for _ in range(len(frontier)):
            u = frontier.popleft()
            for w in g.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    next_layer.append(w)
                    frontier.append(w)
        if not next_layer:
            break
        layers.append(next_layer)
    return layers


def bfs_ball(g, center, radius):
    """Sorted list of nodes u with d(u, center) <= radius; always contains center."""
    return sorted(u for layer in bfs_layers(g, center, radius) for u in layer)


@dataclass
class LabeledGraph:
    """A graph with its class label and optional n x d node attribute matrix."""
    graph: Graph
    label: int
    attributes: Optional[np.ndarray] = None
