"""
Graph classification head: node attributes concatenated with entropy embeddings,
an MLP phi applied per node, sum pooling over nodes, and an MLP psi with a softmax
output. Backpropagation is written out by hand for this fixed architecture; Adam
updates the parameters in place.
"""

import concurrent.futures
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from sklearn.metrics import accuracy_score
from sklearn.model_selection import StratifiedKFold

from config.settings import (
    TRAIN_EPOCHS, TRAIN_LR, LR_DECAY, LR_DECAY_EVERY, BATCH_SIZE, HIDDEN_GRID,
    RADIUS_GRID, TRAIN_FOLDS, INNER_FOLDS, ADAM_BETA1, ADAM_BETA2, ADAM_EPS,
    ATTRIBUTE_CHOICES, GRADCHECK_STEP, EntropyMode,
)
from core.embed import EmbeddingConfig, EmbeddingMatrix, embed_graph
from core.errors import InputError, RowMismatchError, ShapeMismatchError, TooFewGraphsError
from utils.cache import cache_key, load_embeddings, save_embeddings
from utils.logger import get_logger
from utils.progress import TaskProgress

Logger = get_logger()


# =============================================================================
# Features
# =============================================================================
@dataclass
class FeatureMatrix:
    x: np.ndarray          # n x d node attributes (d may be 0)
    h: np.ndarray          # n x R entropies

    @property
    def values(self):
        return np.hstack([self.x, self.h])

    @property
    def node_count(self):
        return self.h.shape[0]

    @property
    def width(self):
        return self.x.shape[1] + self.h.shape[1]


def augment(x, h):
    """X' = [X || H]. x may be None for attribute-less graphs."""
    h = h.values if isinstance(h, EmbeddingMatrix) else np.asarray(h, dtype=float)
    if h.ndim != 2:
        raise ShapeMismatchError(f"Embedding must be n x R, got shape {h.shape}")
    if x is None:
        x = np.zeros((h.shape[0], 0))
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != h.shape[0]:
        raise RowMismatchError(f"{x.shape[0]} attribute rows vs {h.shape[0]} embedding rows")
    return FeatureMatrix(x=x, h=h)


def degree_one_hot(graph, cap):
    """One-hot node degrees, degrees above cap folded into the last column."""
    return np.eye(cap + 1)[np.minimum(graph.degrees, cap)]


def node_attributes(dataset, attributes):
    """Per-graph attribute matrices under 'auto' | 'degree' | 'none'."""
    if attributes not in ATTRIBUTE_CHOICES:
        raise InputError(f"attributes must be one of {ATTRIBUTE_CHOICES}, got '{attributes}'")
    if attributes == 'none':
        return [None] * len(dataset)
    if attributes == 'auto' and all(lg.attributes is not None for lg in dataset):
        return [lg.attributes for lg in dataset]
    cap = max(int(lg.graph.degrees.max(initial=0)) for lg in dataset)
    return [degree_one_hot(lg.graph, cap) for lg in dataset]


def dataset_embeddings(dataset, max_radius, mode=EntropyMode.AUTO, workers=1, cache_dir=None, progress=False):
    """Raw entropy embeddings at max_radius for every graph; smaller radii are column slices."""
    cfg = EmbeddingConfig(max_radius=max_radius, mode=mode, workers=workers)
    keys = [cache_key(lg.graph.fingerprint(), cfg.signature()) for lg in dataset]
    cached = load_embeddings(cache_dir, keys) if cache_dir else {}
    fresh = {}
    values = []
    with TaskProgress(len(dataset), "embed graphs", unit="graph", disable=not progress) as tracker:
        for key, lg in zip(keys, dataset):
            rows = cached.get(key)
            if rows is not None and np.shape(rows) == (lg.graph.node_count, max_radius):
                values.append(np.asarray(rows, dtype=float))
            else:
                if rows is not None:
                    Logger.warning(f"Ignoring cached embedding {key} with shape {np.shape(rows)}")
                matrix = embed_graph(lg.graph, cfg).values
                fresh[key] = matrix.tolist()
                values.append(matrix)
            tracker.update()
    if cache_dir and fresh:
        save_embeddings(cache_dir, fresh)
    Logger.debug(f"Embeddings: {len(dataset) - len(fresh)} cached, {len(fresh)} computed")
    return values


# =============================================================================
# Model
# =============================================================================
class Mlp:
    """Fully connected layers, ReLU on hidden layers, linear output."""

    def __init__(self, sizes, rng=None, weights=None, biases=None):
        self.sizes = [int(s) for s in sizes]
        if len(self.sizes) < 2 or min(self.sizes) < 1:
            raise InputError(f"Invalid layer sizes {self.sizes}")
        if weights is not None:
            self.weights = [np.asarray(w, dtype=float) for w in weights]
            self.biases = [np.asarray(b, dtype=float) for b in biases]
            return
        rng = rng if rng is not None else np.random.default_rng(0)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def params(self):
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def forward(self, x):
        cache = []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            cache.append(x)
            x = x @ w + b
            if i < last:
                x = np.maximum(x, 0.0)
        return x, cache

    def pre_activations(self, x):
        """Hidden-layer inputs to ReLU, one array per hidden layer."""
        out = []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            x = x @ w + b
            if i < last:
                out.append(x)
                x = np.maximum(x, 0.0)
        return out

    def backward(self, cache, dout):
        """Gradients in `params` order, and the gradient w.r.t. the input."""
        count = len(self.weights)
        grads = [None] * (2 * count)
        for i in reversed(range(count)):
            if i < count - 1:
                dout = dout * (cache[i + 1] > 0.0)
            grads[2 * i] = cache[i].T @ dout
            grads[2 * i + 1] = dout.sum(axis=0)
            dout = dout @ self.weights[i].T
        return grads, dout

    def to_dict(self):
        return {
            'sizes': self.sizes,
            'weights': [w.tolist() for w in self.weights],
            'biases': [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data['sizes'], weights=data['weights'], biases=data['biases'])


class ReadoutModel:
    """H_G = psi(sum_v phi(X'_v)) followed by softmax."""

    def __init__(self, phi, psi):
        if phi.sizes[-1] != psi.sizes[0]:
            raise ShapeMismatchError(f"phi output {phi.sizes[-1]} != psi input {psi.sizes[0]}")
        self.phi = phi
        self.psi = psi

    @classmethod
    def create(cls, input_dim, width, n_classes, rng=None, depth=1):
        rng = rng if rng is not None else np.random.default_rng(0)
        hidden = [width] * depth
        phi = Mlp([input_dim] + hidden + [width], rng)
        psi = Mlp([width] + hidden + [n_classes], rng)
        return cls(phi, psi)

    @property
    def input_dim(self):
        return self.phi.sizes[0]

    @property
    def n_classes(self):
        return self.psi.sizes[-1]

    @property
    def params(self):
        return self.phi.params + self.psi.params

    def parameter_count(self):
        return sum(p.size for p in self.params)

    def to_dict(self):
        return {'phi': self.phi.to_dict(), 'psi': self.psi.to_dict()}

    @classmethod
    def from_dict(cls, data):
        return cls(Mlp.from_dict(data['phi']), Mlp.from_dict(data['psi']))


def softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _rows(fm):
    return fm.values if isinstance(fm, FeatureMatrix) else np.asarray(fm, dtype=float)


def pooled(model, fm):
    """Sum of phi over the rows of X', taken over lexicographically sorted rows."""
    rows = _rows(fm)
    if rows.ndim != 2 or rows.shape[1] != model.input_dim:
        raise ShapeMismatchError(f"Model expects {model.input_dim} columns, got shape {rows.shape}")
    if rows.shape[0] == 0:
        raise ShapeMismatchError("Cannot pool a graph without nodes")
    # canonical row order makes the pooled vector bit-identical under node permutation
    order = np.lexsort(rows.T[::-1])
    out, _ = model.phi.forward(rows[order])
    return out.sum(axis=0)


def forward(model, fm):
    """Class probabilities for one graph."""
    logits, _ = model.psi.forward(pooled(model, fm)[None, :])
    return softmax(logits)[0]


def batch_loss_grad(model, rows, offsets, labels):
    """
    Mean cross-entropy of a batch of graphs stacked row-wise (graph i owns rows
    offsets[i]:offsets[i+1]) and its gradient in `model.params` order.
    """
    phi_out, phi_cache = model.phi.forward(rows)
    pool = np.add.reduceat(phi_out, offsets, axis=0)
    logits, psi_cache = model.psi.forward(pool)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_p = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    batch = len(labels)
    index = np.arange(batch)
    loss = -float(log_p[index, labels].mean())

    dlogits = np.exp(log_p)
    dlogits[index, labels] -= 1.0
    dlogits /= batch
    psi_grads, dpool = model.psi.backward(psi_cache, dlogits)
    counts = np.diff(np.append(offsets, rows.shape[0]))
    phi_grads, _ = model.phi.backward(phi_cache, np.repeat(dpool, counts, axis=0))
    return loss, phi_grads + psi_grads


def _single(fm, label):
    return _rows(fm), np.array([0]), np.array([int(label)])


def relu_pattern(model, rows, offsets):
    """Signs of every hidden pre-activation of phi (per row) and psi (per graph)."""
    phi_pre = model.phi.pre_activations(rows)
    phi_out, _ = model.phi.forward(rows)
    psi_pre = model.psi.pre_activations(np.add.reduceat(phi_out, offsets, axis=0))
    return [np.sign(z) for z in phi_pre + psi_pre]


def _same_pattern(a, b):
    return all(np.array_equal(x, y) for x, y in zip(a, b))


def gradient_check(model, fm, label, step=GRADCHECK_STEP):
    """
    Largest relative error between backprop and central differences, taken per
    parameter array as ||a - n|| / max(1e-8, ||a|| + ||n||).

    Entries whose +-step moves any hidden pre-activation across the ReLU kink are
    not differentiable there and take the analytic value.
    """
    rows, offsets, labels = _single(fm, label)
    _, analytic = batch_loss_grad(model, rows, offsets, labels)
    base = relu_pattern(model, rows, offsets)
    worst = 0.0
    skipped = 0
    for param, grad in zip(model.params, analytic):
        numeric = np.zeros_like(param)
        flat = param.reshape(-1)
        num_flat = numeric.reshape(-1)
        grad_flat = grad.reshape(-1)
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + step
            plus, _ = batch_loss_grad(model, rows, offsets, labels)
            smooth = _same_pattern(base, relu_pattern(model, rows, offsets))
            flat[i] = saved - step
            minus, _ = batch_loss_grad(model, rows, offsets, labels)
            smooth = smooth and _same_pattern(base, relu_pattern(model, rows, offsets))
            flat[i] = saved
            if smooth:
                num_flat[i] = (plus - minus) / (2.0 * step)
            else:
                num_flat[i] = grad_flat[i]
                skipped += 1
        denom = max(1e-8, float(np.linalg.norm(grad) + np.linalg.norm(numeric)))
        worst = max(worst, float(np.linalg.norm(grad - numeric)) / denom)
    if skipped:
        Logger.debug(f"Gradient check skipped {skipped} entries at ReLU kinks")
    return worst


# =============================================================================
# Optimisation
# =============================================================================
class Adam:
    def __init__(self, params, beta1=ADAM_BETA1, beta2=ADAM_BETA2, eps=ADAM_EPS):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params, grads, lr):
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def lr_at(epoch, lr0=TRAIN_LR, decay=LR_DECAY, every=LR_DECAY_EVERY):
    return lr0 * decay ** (epoch // every)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = TRAIN_EPOCHS
    lr: float = TRAIN_LR
    decay: float = LR_DECAY
    decay_every: int = LR_DECAY_EVERY
    batch_size: int = BATCH_SIZE
    hidden_grid: Tuple[int, ...] = tuple(HIDDEN_GRID)
    radius_grid: Tuple[int, ...] = tuple(RADIUS_GRID)
    folds: int = TRAIN_FOLDS
    inner_folds: int = INNER_FOLDS
    depth: int = 1
    attributes: str = 'auto'
    mode: str = EntropyMode.AUTO
    seed: int = 0
    workers: int = 1
    selection_epochs: Optional[int] = None

    def __post_init__(self):
        if self.epochs <= 0:
            raise InputError(f"epochs must be > 0, got {self.epochs}")
        if not 0.0 < self.decay < 1.0:
            raise InputError(f"decay must be in (0, 1), got {self.decay}")
        if self.batch_size < 1 or self.decay_every < 1 or self.depth < 1:
            raise InputError("batch_size, decay_every and depth must be >= 1")
        if self.folds < 2:
            raise InputError(f"folds must be >= 2, got {self.folds}")
        if not self.hidden_grid or not self.radius_grid:
            raise InputError("hidden_grid and radius_grid must be non-empty")
        if self.attributes not in ATTRIBUTE_CHOICES:
            raise InputError(f"attributes must be one of {ATTRIBUTE_CHOICES}, got '{self.attributes}'")

    def grid(self):
        return [(r, w) for r in self.radius_grid for w in self.hidden_grid]


@dataclass
class FitResult:
    model: ReadoutModel
    losses: List[float]
    epoch_seconds: List[float]


@dataclass
class TrainResult:
    model: ReadoutModel
    radius: int
    width: int
    fold_accuracy: List[float]
    selected: List[Tuple[int, int]]
    epoch_seconds: float
    losses: List[float] = field(default_factory=list)

    @property
    def mean_accuracy(self):
        return float(np.mean(self.fold_accuracy))

    @property
    def std_accuracy(self):
        return float(np.std(self.fold_accuracy))

    def to_dict(self):
        return {
            'fold_accuracy': self.fold_accuracy,
            'mean_accuracy': self.mean_accuracy,
            'std_accuracy': self.std_accuracy,
            'selected': [list(s) for s in self.selected],
            'radius': self.radius,
            'width': self.width,
            'epoch_seconds': self.epoch_seconds,
            'final_loss': self.losses[-1] if self.losses else None,
        }


def fit_model(features, labels, n_classes, width, cfg, rng, epochs=None):
    """Train one model on a list of per-graph X' matrices."""
    labels = np.asarray(labels, dtype=np.int64)
    model = ReadoutModel.create(features[0].shape[1], width, n_classes, rng, cfg.depth)
    optimizer = Adam(model.params)
    sizes = np.array([f.shape[0] for f in features])
    losses = []
    epoch_seconds = []
    for epoch in range(epochs or cfg.epochs):
        start = time.perf_counter()
        lr = lr_at(epoch, cfg.lr, cfg.decay, cfg.decay_every)
        perm = rng.permutation(len(features))
        total = 0.0
        for b in range(0, len(perm), cfg.batch_size):
            idx = perm[b:b + cfg.batch_size]
            rows = np.vstack([features[i] for i in idx])
            offsets = np.concatenate([[0], np.cumsum(sizes[idx])[:-1]])
            loss, grads = batch_loss_grad(model, rows, offsets, labels[idx])
            optimizer.step(model.params, grads, lr)
            total += loss * len(idx)
        losses.append(total / len(perm))
        epoch_seconds.append(time.perf_counter() - start)
    return FitResult(model=model, losses=losses, epoch_seconds=epoch_seconds)


def predict(model, features):
    return np.array([int(np.argmax(forward(model, f))) for f in features])


def _select(feature_sets, y, train_idx, n_classes, cfg, fold):
    grid = cfg.grid()
    if len(grid) == 1:
        return grid[0]
    counts = np.bincount(y[train_idx], minlength=n_classes)
    k = min(cfg.inner_folds, int(counts[counts > 0].min()))
    if k < 2:
        Logger.warning(f"Fold {fold}: too few graphs per class for inner CV, using {grid[0]}")
        return grid[0]
    inner = list(StratifiedKFold(n_splits=k, shuffle=True, random_state=cfg.seed).split(train_idx, y[train_idx]))
    scores = []
    for combo, (r, w) in enumerate(grid):
        accs = []
        for split, (fit_pos, val_pos) in enumerate(inner):
            fit_idx, val_idx = train_idx[fit_pos], train_idx[val_pos]
            rng = np.random.default_rng([cfg.seed, fold, combo, split])
            result = fit_model([feature_sets[r][i] for i in fit_idx], y[fit_idx], n_classes, w, cfg,
                               rng, epochs=cfg.selection_epochs)
            pred = predict(result.model, [feature_sets[r][i] for i in val_idx])
            accs.append(accuracy_score(y[val_idx], pred))
        scores.append(float(np.mean(accs)))
    best = max(range(len(grid)), key=lambda i: (scores[i], -i))
    Logger.debug(f"Fold {fold}: selected R={grid[best][0]} width={grid[best][1]} (inner acc {scores[best]:.3f})")
    return grid[best]


def train(dataset, cfg, cache_dir=None, progress=False):
    """
    Outer stratified k-fold evaluation with inner-CV selection over (radius, width),
    then a final model fit on every graph with the most often selected pair.

    Raises:
        TooFewGraphsError: fewer than 2 classes, or a class smaller than cfg.folds
    """
    raw = np.array([lg.label for lg in dataset])
    if len(raw) == 0:
        raise TooFewGraphsError("Dataset is empty")
    classes, y, counts = np.unique(raw, return_inverse=True, return_counts=True)
    if len(classes) < 2:
        raise TooFewGraphsError(f"Need >= 2 classes, got {len(classes)}")
    if counts.min() < cfg.folds:
        raise TooFewGraphsError(
            f"Class {classes[np.argmin(counts)]} has {counts.min()} graphs, fewer than {cfg.folds} folds"
        )
    if any(lg.graph.node_count == 0 for lg in dataset):
        raise TooFewGraphsError("Every graph needs at least one node")
    n_classes = len(classes)

    attrs = node_attributes(dataset, cfg.attributes)
    embeddings = dataset_embeddings(dataset, max(cfg.radius_grid), cfg.mode, cfg.workers, cache_dir, progress)
    feature_sets = {
        r: [augment(a, h[:, :r]).values for a, h in zip(attrs, embeddings)]
        for r in cfg.radius_grid
    }

    outer = list(StratifiedKFold(n_splits=cfg.folds, shuffle=True, random_state=cfg.seed).split(raw, y))

    def run_fold(fold):
        train_idx, test_idx = outer[fold]
        r, w = _select(feature_sets, y, train_idx, n_classes, cfg, fold)
        result = fit_model([feature_sets[r][i] for i in train_idx], y[train_idx], n_classes, w, cfg,
                           np.random.default_rng([cfg.seed, fold]))
        pred = predict(result.model, [feature_sets[r][i] for i in test_idx])
        return fold, float(accuracy_score(y[test_idx], pred)), (r, w), result.epoch_seconds

    outcomes = []
    with TaskProgress(cfg.folds, "folds", unit="fold", disable=not progress) as tracker:
        if cfg.workers > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as executor:
                for outcome in executor.map(run_fold, range(cfg.folds)):
                    outcomes.append(outcome)
                    tracker.update()
        else:
            for fold in range(cfg.folds):
                outcomes.append(run_fold(fold))
                tracker.update()
    outcomes.sort(key=lambda o: o[0])

    selected = [o[2] for o in outcomes]
    grid = cfg.grid()
    tally = Counter(selected)
    radius, width = max(tally, key=lambda s: (tally[s], -grid.index(s)))
    epoch_times = [t for o in outcomes for t in o[3]]

    final = fit_model(feature_sets[radius], y, n_classes, width, cfg,
                      np.random.default_rng([cfg.seed, cfg.folds]))
    Logger.debug(f"Final model R={radius} width={width}, loss {final.losses[-1]:.4f}")
    return TrainResult(
        model=final.model,
        radius=radius,
        width=width,
        fold_accuracy=[o[1] for o in outcomes],
        selected=selected,
        epoch_seconds=float(np.mean(epoch_times)),
        losses=final.losses,
    )
