"""
Synthetic structural-role datasets: symmetric shapes attached along a cycle, with
uniform edge rewiring as perturbation. Also a seeded triangle / triangle-free
graph-classification set used to exercise the readout.

Shapes (anchor is node 0 of every shape):
    house   b0-b1, b0-t0, b1-t1, t0-t1, t0-apex, t1-apex; roles bottom/top/apex
    star(s) center joined to s leaves;                    roles center/leaf
    fan(s)  apex joined to every node of an s-node path;  roles apex/path-end/path-interior

In a configuration, cycle nodes carrying a shape form their own class, and a role whose
nodes lie at different hop counts from the anchor is split by hop count.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config.settings import (
    SHAPE_ROLES, SHAPE_INSTANCES, CYCLE_LENGTH, CYCLE_CLASS, CYCLE_ATTACH_CLASS, VARIED_SHAPES,
    DEFAULT_STAR_SIZE, DEFAULT_FAN_SIZE, ShapeKind,
)
from core.errors import BadSpecError, OverfullError, SaturatedError
from core.graph import build_graph, bfs_layers, LabeledGraph
from utils.logger import get_logger

Logger = get_logger()

SHAPE_ANCHOR = 0


@dataclass(frozen=True)
class ShapeSpec:
    kind: str
    size: int = 0

    @property
    def roles(self):
        return SHAPE_ROLES[self.kind]

    def name(self):
        return self.kind if self.kind == ShapeKind.HOUSE else f"{self.kind}({self.size})"


@dataclass
class ShapeDataset:
    graph: object
    labels: np.ndarray
    config_name: str
    seed: int
    class_names: List[str]
    shapes: List[str] = field(default_factory=list)
    rewired_edges: int = 0
    perturb_seed: Optional[int] = None

    @property
    def class_count(self):
        return len(self.class_names)

    def to_dict(self):
        return {
            'nodes': self.graph.node_count,
            'edges': [[u, v] for u, v in self.graph.edges()],
            'labels': [int(c) for c in self.labels],
            'meta': {
                'config': self.config_name,
                'seed': self.seed,
                'rewired': self.rewired_edges,
                'perturb_seed': self.perturb_seed,
                'classes': list(self.class_names),
                'shapes': list(self.shapes),
            },
        }

    @classmethod
    def from_dict(cls, data):
        meta = data.get('meta', {})
        graph = build_graph(int(data['nodes']), [tuple(e) for e in data['edges']])
        labels = np.asarray(data['labels'], dtype=np.int64)
        if labels.shape[0] != graph.node_count:
            raise BadSpecError(f"{labels.shape[0]} labels for {graph.node_count} nodes")
        classes = meta.get('classes') or [str(c) for c in range(int(labels.max()) + 1)]
        return cls(
            graph=graph,
            labels=labels,
            config_name=meta.get('config', 'unknown'),
            seed=meta.get('seed', 0),
            class_names=list(classes),
            shapes=list(meta.get('shapes', [])),
            rewired_edges=int(meta.get('rewired', 0)),
            perturb_seed=meta.get('perturb_seed'),
        )


def _shape_edges(spec):
    """(node count, edge list, local role ids) of one shape."""
    if spec.kind == ShapeKind.HOUSE:
        edges = [(0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 4)]
        return 5, edges, [0, 0, 1, 1, 2]
    if spec.kind == ShapeKind.STAR:
        if spec.size < 2:
            raise BadSpecError(f"star needs at least 2 leaves, got {spec.size}")
        edges = [(0, i) for i in range(1, spec.size + 1)]
        return spec.size + 1, edges, [0] + [1] * spec.size
    if spec.kind == ShapeKind.FAN:
        s = spec.size
        if s < 2:
            raise BadSpecError(f"fan needs a path of at least 2 nodes, got {s}")
        edges = [(0, i) for i in range(1, s + 1)] + [(i, i + 1) for i in range(1, s)]
        roles = [0] + [1 if i in (1, s) else 2 for i in range(1, s + 1)]
        return s + 1, edges, roles
    raise BadSpecError(f"Unknown shape kind '{spec.kind}'")


def make_shape(spec):
    """
    Build one shape.

    Returns:
        (Graph, labels) with labels[i] the local role id (index into spec.roles).
    """
    n, edges, roles = _shape_edges(spec)
    return build_graph(n, edges), roles


def shape_from_name(kind):
    sizes = {ShapeKind.HOUSE: 0, ShapeKind.STAR: DEFAULT_STAR_SIZE, ShapeKind.FAN: DEFAULT_FAN_SIZE}
    if kind not in sizes:
        raise BadSpecError(f"Unknown shape kind '{kind}'")
    return ShapeSpec(kind, sizes[kind])


def refined_roles(spec):
    """
    Per shape node, the (role, hops from the anchor) pair it is classed by.

    A role whose nodes sit at different distances from the anchor is split: after
    attachment those nodes are no longer structurally equivalent (the house corner
    carrying the anchor differs from the other bottom corner).
    """
    n, edges, roles = _shape_edges(spec)
    shape = build_graph(n, edges)
    hops = {}
    for dist, layer in enumerate(bfs_layers(shape, SHAPE_ANCHOR, n)):
        for u in layer:
            hops[u] = dist
    return [(roles[u], hops[u]) for u in range(n)]


def _class_name(spec, role, hop, split):
    name = f"{spec.kind}:{spec.roles[role]}"
    return f"{name}@{hop}" if role in split else name


def build_configuration(config, shapes, instances=SHAPE_INSTANCES, cycle_len=CYCLE_LENGTH, seed=0):
    """
    Attach `instances` copies of each shape to a cycle of length cycle_len, one edge
    from the shape's anchor to a cycle node.

    basic:  one shape kind, anchors on every (cycle_len // instances)-th cycle node
    varied: every kind, cycle positions drawn without replacement from the seeded stream

    Class ids: 0 is the plain cycle, 1 the cycle nodes carrying a shape, then the
    refined roles shape by shape (see refined_roles). Classes left empty are dropped
    and the remaining ids renumbered in order.
    """
    shapes = list(shapes)
    if config not in ('basic', 'varied'):
        raise BadSpecError(f"Unknown configuration '{config}'")
    if not shapes:
        raise BadSpecError("At least one shape is required")
    if config == 'basic' and len(shapes) != 1:
        raise BadSpecError(f"basic configuration takes one shape, got {len(shapes)}")
    if cycle_len < 3:
        raise BadSpecError(f"Cycle length must be >= 3, got {cycle_len}")
    if instances < 1:
        raise BadSpecError(f"instances must be >= 1, got {instances}")
    total = instances * len(shapes)
    if total > cycle_len:
        raise OverfullError(f"{total} shapes do not fit on a cycle of {cycle_len} nodes")

    if config == 'basic':
        step = cycle_len // instances
        positions = [i * step for i in range(instances)]
    else:
        rng = np.random.default_rng(seed)
        positions = [int(p) for p in rng.choice(cycle_len, size=total, replace=False)]

    class_names = [CYCLE_CLASS, CYCLE_ATTACH_CLASS]
    class_ids = []
    built = []
    for spec in shapes:
        n_shape, edges, _ = _shape_edges(spec)
        keys = refined_roles(spec)
        hops_per_role = {}
        for role, hop in keys:
            hops_per_role.setdefault(role, set()).add(hop)
        split = {role for role, hops in hops_per_role.items() if len(hops) > 1}
        ids = {}
        for role, hop in sorted(set(keys)):
            ids[(role, hop)] = len(class_names)
            class_names.append(_class_name(spec, role, hop, split))
        class_ids.append(ids)
        built.append((n_shape, edges, keys))

    edges = [(i, (i + 1) % cycle_len) for i in range(cycle_len)]
    labels = [0] * cycle_len
    offset = cycle_len
    for slot, position in enumerate(positions):
        shape_index = slot // instances
        n_shape, shape_edges, keys = built[shape_index]
        edges.extend((offset + u, offset + v) for u, v in shape_edges)
        edges.append((position, offset + SHAPE_ANCHOR))
        labels[position] = 1
        labels.extend(class_ids[shape_index][key] for key in keys)
        offset += n_shape

    present = sorted(set(labels))
    if len(present) < len(class_names):
        remap = {old: new for new, old in enumerate(present)}
        labels = [remap[c] for c in labels]
        class_names = [class_names[c] for c in present]

    graph = build_graph(offset, edges)
    Logger.debug(f"Built {config} configuration: n={graph.node_count} m={graph.edge_count}")
    return ShapeDataset(
        graph=graph,
        labels=np.asarray(labels, dtype=np.int64),
        config_name=config,
        seed=seed,
        class_names=class_names,
        shapes=[s.name() for s in shapes],
    )


def configuration_from_name(name, seed=0, instances=SHAPE_INSTANCES, cycle_len=CYCLE_LENGTH):
    """'basic-house' | 'basic-star' | 'basic-fan' | 'varied'."""
    if name == 'varied':
        shapes = [ShapeSpec(kind, size) for kind, size in VARIED_SHAPES]
        return build_configuration('varied', shapes, instances, cycle_len, seed)
    if name.startswith('basic-'):
        return build_configuration('basic', [shape_from_name(name[len('basic-'):])],
                                   instances, cycle_len, seed)
    raise BadSpecError(f"Unknown configuration name '{name}'")


def rewire_edges(graph, k, rng):
    """
    k rewiring steps: remove a uniformly random edge, then insert a uniformly random
    absent pair other than the one just removed. Node and edge counts are preserved.
    """
    n = graph.node_count
    if k < 0:
        raise BadSpecError(f"Rewired edge count must be >= 0, got {k}")
    if k > graph.edge_count:
        raise BadSpecError(f"Cannot rewire {k} edges of a graph with {graph.edge_count}")
    edge_set = set(graph.edges())
    all_pairs = n * (n - 1) // 2
    for _ in range(k):
        ordered = sorted(edge_set)
        removed = ordered[int(rng.integers(len(ordered)))]
        edge_set.remove(removed)
        free = all_pairs - len(edge_set) - 1
        if free <= 0:
            raise SaturatedError(f"No absent node pair left to rewire into (n={n})")
        if free * 4 < all_pairs:
            candidates = [
                (u, v) for u in range(n) for v in range(u + 1, n)
                if (u, v) not in edge_set and (u, v) != removed
            ]
            added = candidates[int(rng.integers(len(candidates)))]
        else:
            while True:
                u, v = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
                if (u, v) not in edge_set and (u, v) != removed:
                    added = (u, v)
                    break
        edge_set.add(added)
    return build_graph(n, sorted(edge_set))


def perturb(ds, k, seed):
    """Rewire k edges of the dataset graph; labels are untouched."""
    rng = np.random.default_rng(seed)
    graph = rewire_edges(ds.graph, k, rng)
    return ShapeDataset(
        graph=graph,
        labels=ds.labels.copy(),
        config_name=ds.config_name,
        seed=ds.seed,
        class_names=list(ds.class_names),
        shapes=list(ds.shapes),
        rewired_edges=ds.rewired_edges + k,
        perturb_seed=seed,
    )


# =============================================================================
# Triangle / triangle-free graph classification set
# =============================================================================
def has_triangle(graph):
    """Brute force: some edge (u, v) with a common neighbor."""
    for u, v in graph.edges():
        if set(graph.adjacency[u]) & set(graph.adjacency[v]):
            return True
    return False


def _random_tree_edges(n, rng):
    return [(int(rng.integers(0, j)), j) for j in range(1, n)]


def make_triangle_dataset(count=100, seed=0, min_nodes=8, max_nodes=14):
    """
    Balanced set of random trees with one extra edge: closing a triangle (label 1)
    or a cycle of length >= 4 (label 0). Both classes have m = n. Every label is
    re-checked by brute-force triangle search.
    """
    if count < 2 or min_nodes < 4 or max_nodes < min_nodes:
        raise BadSpecError("triangle dataset needs count >= 2 and 4 <= min_nodes <= max_nodes")
    rng = np.random.default_rng(seed)
    graphs = []
    while len(graphs) < count:
        target = len(graphs) % 2
        n = int(rng.integers(min_nodes, max_nodes + 1))
        tree_edges = _random_tree_edges(n, rng)
        tree = build_graph(n, tree_edges)
        pairs = []
        for u in range(n):
            for dist, layer in enumerate(bfs_layers(tree, u, n)):
                for v in layer:
                    if u < v and ((target == 1 and dist == 2) or (target == 0 and dist >= 3)):
                        pairs.append((u, v))
        if not pairs:
            continue
        extra = pairs[int(rng.integers(len(pairs)))]
        graph = build_graph(n, tree_edges + [extra])
        label = int(has_triangle(graph))
        if label != target:
            raise AssertionError(f"triangle label mismatch for extra edge {extra}")
        graphs.append(LabeledGraph(graph=graph, label=label))
    return graphs
