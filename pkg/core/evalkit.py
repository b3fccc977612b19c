"""
Structural-role evaluation: k-means clustering scored by homogeneity, completeness and
silhouette, and supervised role classification scored by accuracy and macro F1.
"""

import concurrent.futures
import json
from dataclasses import dataclass, field, asdict
from typing import List

import numpy as np
from sklearn.metrics import (
    accuracy_score, f1_score, homogeneity_completeness_v_measure, silhouette_score,
)
from sklearn.model_selection import StratifiedShuffleSplit

from config.settings import (
    KMEANS_RESTARTS, KMEANS_MAX_ITERS, KMEANS_TOL,
    LOGREG_L2, LOGREG_ITERS, LOGREG_LR, LOGREG_BACKTRACK, LOGREG_MIN_LR,
    CV_SPLITS, CV_TEST_SIZE, REPORT_COLUMNS,
)
from core.errors import (
    DegenerateInputError, LengthMismatchError, SingleClusterError, DegenerateClassError,
    InputError,
)
from utils.logger import get_logger

Logger = get_logger()


@dataclass
class KMeansResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    iterations: int
    restart: int = 0


@dataclass
class ClusteringReport:
    homogeneity: float
    completeness: float
    silhouette: float
    assignments: List[int] = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


@dataclass
class ClassificationReport:
    accuracy: float
    f1_macro: float
    accuracy_std: float
    f1_std: float
    split_accuracy: List[float] = field(default_factory=list)
    split_f1: List[float] = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


# =============================================================================
# k-means
# =============================================================================
def _as_points(points):
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] < 1:
        raise InputError(f"Expected an n x d point matrix with d >= 1, got shape {x.shape}")
    return x


def _squared_distances(x, centroids):
    diff = x[:, None, :] - centroids[None, :, :]
    return np.einsum('ijk,ijk->ij', diff, diff)


def _kmeans_plus_plus(x, k, rng):
    n = x.shape[0]
    centroids = [x[int(rng.integers(n))]]
    closest = _squared_distances(x, np.asarray(centroids))[:, 0]
    for _ in range(1, k):
        total = float(closest.sum())
        if total <= 0.0:
            # fewer distinct points than the caller checked for; cannot happen after validation
            raise DegenerateInputError("k-means++ ran out of distinct points")
        idx = int(rng.choice(n, p=closest / total))
        centroids.append(x[idx])
        closest = np.minimum(closest, _squared_distances(x, x[idx][None, :])[:, 0])
    return np.array(centroids)


def _lloyd(x, k, rng, max_iters, tol):
    centroids = _kmeans_plus_plus(x, k, rng)
    previous = np.inf
    iterations = 0
    for iterations in range(1, max_iters + 1):
        dist = _squared_distances(x, centroids)
        assignments = np.argmin(dist, axis=1)
        inertia = float(dist[np.arange(x.shape[0]), assignments].sum())
        assert inertia <= previous + 1e-9 * max(1.0, previous), "k-means inertia increased"
        previous = inertia

        updated = centroids.copy()
        for c in range(k):
            members = x[assignments == c]
            if len(members):
                updated[c] = members.mean(axis=0)
            else:
                Logger.warning(f"k-means cluster {c} emptied; keeping its centroid")
        movement = float(np.max(np.linalg.norm(updated - centroids, axis=1)))
        centroids = updated
        if movement < tol:
            break

    dist = _squared_distances(x, centroids)
    assignments = np.argmin(dist, axis=1)
    inertia = float(dist[np.arange(x.shape[0]), assignments].sum())
    return assignments, centroids, inertia, iterations


def kmeans_fit(points, k, seed=0, restarts=KMEANS_RESTARTS, workers=1,
               max_iters=KMEANS_MAX_ITERS, tol=KMEANS_TOL):
    """
    Best of `restarts` k-means++ / Lloyd runs by inertia. Restart i draws from the
    stream default_rng([seed, i]); ties go to the lowest restart index.

    Raises:
        DegenerateInputError: k < 1 or k greater than the number of distinct points
    """
    x = _as_points(points)
    distinct = np.unique(x, axis=0).shape[0]
    if k < 1 or k > distinct:
        raise DegenerateInputError(f"k={k} but only {distinct} distinct points")
    if restarts < 1:
        raise InputError(f"restarts must be >= 1, got {restarts}")

    def run(i):
        rng = np.random.default_rng([seed, i])
        return i, _lloyd(x, k, rng, max_iters, tol)

    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            runs = list(executor.map(run, range(restarts)))
    else:
        runs = [run(i) for i in range(restarts)]

    best_index, (assignments, centroids, inertia, iterations) = min(
        runs, key=lambda item: (item[1][2], item[0])
    )
    Logger.debug(f"k-means k={k}: best restart {best_index}, inertia {inertia:.6g}")
    return KMeansResult(
        assignments=assignments, centroids=centroids, inertia=inertia,
        iterations=iterations, restart=best_index,
    )


def kmeans(points, k, seed=0, restarts=KMEANS_RESTARTS, workers=1):
    """Cluster assignments of the best restart."""
    return kmeans_fit(points, k, seed=seed, restarts=restarts, workers=workers).assignments


# =============================================================================
# Clustering metrics
# =============================================================================
def homogeneity_completeness(labels_true, labels_pred):
    """(h, c); a zero entropy in the denominator scores 1."""
    labels_true = np.asarray(labels_true)
    labels_pred = np.asarray(labels_pred)
    if labels_true.shape[0] != labels_pred.shape[0]:
        raise LengthMismatchError(f"{labels_true.shape[0]} true labels vs {labels_pred.shape[0]} predicted")
    if labels_true.shape[0] == 0:
        raise LengthMismatchError("Label arrays are empty")
    h, c, _ = homogeneity_completeness_v_measure(labels_true, labels_pred)
    return float(h), float(c)


def silhouette(points, assignments):
    """Mean Euclidean silhouette; points in singleton clusters score 0."""
    x = _as_points(points)
    labels = np.asarray(assignments)
    if labels.shape[0] != x.shape[0]:
        raise LengthMismatchError(f"{x.shape[0]} points vs {labels.shape[0]} assignments")
    clusters = np.unique(labels).shape[0]
    if clusters < 2:
        raise SingleClusterError(f"Silhouette needs >= 2 clusters, got {clusters}")
    if clusters == x.shape[0]:
        return 0.0
    return float(silhouette_score(x, labels, metric='euclidean'))


def evaluate_clustering(points, labels_true, seed=0, restarts=KMEANS_RESTARTS, workers=1):
    """k-means with k = number of true classes, scored against labels_true."""
    labels_true = np.asarray(labels_true)
    k = np.unique(labels_true).shape[0]
    assignments = kmeans(points, k, seed=seed, restarts=restarts, workers=workers)
    h, c = homogeneity_completeness(labels_true, assignments)
    s = silhouette(points, assignments) if k >= 2 else 0.0
    return ClusteringReport(
        homogeneity=h, completeness=c, silhouette=s,
        assignments=[int(a) for a in assignments],
    )


# =============================================================================
# Role classification
# =============================================================================
class SoftmaxRegression:
    """
    Multinomial logistic regression with an L2 penalty on the weights, fit by
    full-batch gradient descent with Armijo backtracking.
    """

    def __init__(self, l2=LOGREG_L2, iterations=LOGREG_ITERS, lr=LOGREG_LR,
                 backtrack=LOGREG_BACKTRACK, min_lr=LOGREG_MIN_LR):
        self.l2 = l2
        self.iterations = iterations
        self.lr = lr
        self.backtrack = backtrack
        self.min_lr = min_lr
        self.weights = None
        self.bias = None
        self.classes_ = None

    @staticmethod
    def _softmax(z):
        z = z - z.max(axis=1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=1, keepdims=True)

    def _loss_grad(self, x, onehot, w, b):
        p = self._softmax(x @ w + b)
        n = x.shape[0]
        loss = -float(np.sum(onehot * np.log(np.clip(p, 1e-300, None)))) / n
        loss += 0.5 * self.l2 * float(np.sum(w * w))
        delta = (p - onehot) / n
        return loss, x.T @ delta + self.l2 * w, delta.sum(axis=0)

    def fit(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y)
        self.classes_, index = np.unique(y, return_inverse=True)
        onehot = np.eye(len(self.classes_))[index]
        w = np.zeros((x.shape[1], len(self.classes_)))
        b = np.zeros(len(self.classes_))
        loss, gw, gb = self._loss_grad(x, onehot, w, b)
        for _ in range(self.iterations):
            grad_sq = float(np.sum(gw * gw) + np.sum(gb * gb))
            if grad_sq == 0.0:
                break
            lr = self.lr
            while lr >= self.min_lr:
                w_new = w - lr * gw
                b_new = b - lr * gb
                new_loss, new_gw, new_gb = self._loss_grad(x, onehot, w_new, b_new)
                if new_loss <= loss - 1e-4 * lr * grad_sq:
                    break
                lr *= self.backtrack
            else:
                break
            w, b, loss, gw, gb = w_new, b_new, new_loss, new_gw, new_gb
        self.weights, self.bias = w, b
        return self

    def predict_proba(self, x):
        return self._softmax(np.asarray(x, dtype=float) @ self.weights + self.bias)

    def predict(self, x):
        return self.classes_[np.argmax(self.predict_proba(x), axis=1)]


def classify_roles(embeddings, labels, seed=0, splits=CV_SPLITS, test_size=CV_TEST_SIZE, workers=1):
    """
    Mean accuracy and macro F1 of softmax regression over seeded stratified
    80/20 splits.

    Raises:
        DegenerateClassError: fewer than 2 classes, fewer than 10 samples, or a class
            with fewer than 2 samples
    """
    x = _as_points(embeddings)
    y = np.asarray(labels)
    if y.shape[0] != x.shape[0]:
        raise LengthMismatchError(f"{x.shape[0]} embeddings vs {y.shape[0]} labels")
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) < 2:
        raise DegenerateClassError(f"Classification needs >= 2 classes, got {len(classes)}")
    if x.shape[0] < 10:
        raise DegenerateClassError(f"Classification needs >= 10 samples, got {x.shape[0]}")
    if counts.min() < 2:
        raise DegenerateClassError(f"Class {classes[np.argmin(counts)]} has {counts.min()} sample")

    splitter = StratifiedShuffleSplit(n_splits=splits, test_size=test_size, random_state=seed)
    folds = list(splitter.split(x, y))

    def score(fold):
        train_idx, test_idx = fold
        model = SoftmaxRegression().fit(x[train_idx], y[train_idx])
        pred = model.predict(x[test_idx])
        return (
            float(accuracy_score(y[test_idx], pred)),
            float(f1_score(y[test_idx], pred, average='macro', zero_division=0)),
        )

    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            scores = list(executor.map(score, folds))
    else:
        scores = [score(f) for f in folds]

    acc = np.array([s[0] for s in scores])
    f1 = np.array([s[1] for s in scores])
    return ClassificationReport(
        accuracy=float(acc.mean()),
        f1_macro=float(f1.mean()),
        accuracy_std=float(acc.std()),
        f1_std=float(f1.std()),
        split_accuracy=acc.tolist(),
        split_f1=f1.tolist(),
    )


# =============================================================================
# Report rows and tables
# =============================================================================
def report_row(name, clustering_reports, classification_reports):
    """Mean and std of the five metrics over repeated graphs."""
    if not clustering_reports or len(clustering_reports) != len(classification_reports):
        raise LengthMismatchError("Need one clustering and one classification report per graph")
    series = {
        'Homogeneity': [r.homogeneity for r in clustering_reports],
        'Completeness': [r.completeness for r in clustering_reports],
        'Silhouette': [r.silhouette for r in clustering_reports],
        'Accuracy': [r.accuracy for r in classification_reports],
        'F1-score': [r.f1_macro for r in classification_reports],
    }
    row = {'name': name, 'trials': len(clustering_reports)}
    for column in REPORT_COLUMNS:
        values = np.asarray(series[column], dtype=float)
        row[column] = {'mean': float(values.mean()), 'std': float(values.std())}
    return row


def format_table(rows):
    """Aligned plain-text table with one 'mean ± std' cell per metric."""
    cells = [['Configuration'] + REPORT_COLUMNS]
    for row in rows:
        cells.append([row['name']] + [
            f"{row[c]['mean']:.3f} ± {row[c]['std']:.3f}" for c in REPORT_COLUMNS
        ])
    widths = [max(len(r[i]) for r in cells) for i in range(len(cells[0]))]
    lines = []
    for i, r in enumerate(cells):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
        if i == 0:
            lines.append("  ".join('-' * w for w in widths))
    return "\n".join(lines)


def table_json(rows):
    return json.dumps({'columns': REPORT_COLUMNS, 'rows': rows}, indent=2)
