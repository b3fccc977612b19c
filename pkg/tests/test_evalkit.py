import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.errors import (
    DegenerateInputError, LengthMismatchError, SingleClusterError, DegenerateClassError,
)
from core.evalkit import (
    kmeans, kmeans_fit, homogeneity_completeness, silhouette, classify_roles,
    evaluate_clustering, report_row, format_table, table_json, SoftmaxRegression,
)


def blobs(seed, centers, per=20, spread=0.1):
    rng = np.random.default_rng(seed)
    points = np.vstack([rng.normal(c, spread, size=(per, len(c))) for c in centers])
    labels = np.repeat(np.arange(len(centers)), per)
    return points, labels


def test_kmeans_separates_two_clouds():
    points, labels = blobs(0, [(0.0, 0.0), (10.0, 10.0)])
    assignments = kmeans(points, 2, seed=1)
    h, c = homogeneity_completeness(labels, assignments)
    assert h == 1.0 and c == 1.0


def test_kmeans_identical_points():
    result = kmeans_fit(np.ones((6, 2)), 1, seed=0)
    assert result.inertia == 0.0
    assert result.assignments.tolist() == [0] * 6
    with pytest.raises(DegenerateInputError):
        kmeans(np.ones((6, 2)), 2)


def test_kmeans_deterministic_and_thread_independent():
    points, _ = blobs(3, [(0, 0), (3, 0), (0, 3)], spread=1.0)
    a = kmeans_fit(points, 3, seed=4)
    b = kmeans_fit(points, 3, seed=4, workers=4)
    assert np.array_equal(a.assignments, b.assignments)
    assert a.inertia == b.inertia and a.restart == b.restart


def test_homogeneity_completeness_examples():
    assert homogeneity_completeness([0, 1, 1, 2], [0, 1, 1, 2]) == (1.0, 1.0)
    h, c = homogeneity_completeness([0, 0, 1, 1], [0, 0, 0, 0])
    assert h == pytest.approx(0.0) and c == pytest.approx(1.0)
    h, c = homogeneity_completeness([0, 0, 1, 1], [0, 1, 2, 3])
    assert h == pytest.approx(1.0) and c == pytest.approx(0.5)
    with pytest.raises(LengthMismatchError):
        homogeneity_completeness([0, 1], [0])


def test_homogeneity_completeness_duality_and_relabel():
    rng = np.random.default_rng(9)
    for _ in range(20):
        a = rng.integers(0, 4, size=30)
        b = rng.integers(0, 3, size=30)
        h, c = homogeneity_completeness(a, b)
        h2, c2 = homogeneity_completeness(b, a)
        assert h == pytest.approx(c2) and c == pytest.approx(h2)
        assert homogeneity_completeness(a, (b + 1) % 3) == pytest.approx((h, c))


def test_silhouette_examples():
    points, labels = blobs(2, [(0.0, 0.0), (50.0, 50.0)], spread=0.05)
    assert silhouette(points, labels) > 0.95

    square = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    assert silhouette(square, [0, 0, 1, 1]) == pytest.approx(3 - 2 * math.sqrt(2), abs=1e-12)

    line = np.arange(40, dtype=float)[:, None]
    assert abs(silhouette(line, np.arange(40) % 2)) < 0.2

    assert silhouette(square, [0, 1, 2, 3]) == 0.0
    with pytest.raises(SingleClusterError):
        silhouette(square, [0, 0, 0, 0])


def test_softmax_regression_separable():
    points, labels = blobs(5, [(-3.0, 0.0), (3.0, 0.0), (0.0, 4.0)], spread=0.3)
    model = SoftmaxRegression().fit(points, labels)
    assert np.array_equal(model.predict(points), labels)
    assert np.allclose(model.predict_proba(points).sum(axis=1), 1.0)


def test_classify_roles_separable():
    points, labels = blobs(6, [(0.0, 0.0), (5.0, 5.0)], per=30, spread=0.2)
    report = classify_roles(points, labels, seed=0)
    assert report.accuracy == 1.0
    assert report.f1_macro == 1.0
    assert len(report.split_accuracy) == 10
    assert min(report.split_accuracy) <= report.accuracy <= max(report.split_accuracy)


def test_classify_roles_chance_level():
    rng = np.random.default_rng(10)
    points = rng.standard_normal((200, 3))
    labels = rng.permutation(np.repeat(np.arange(4), 50))
    report = classify_roles(points, labels, seed=3)
    assert abs(report.accuracy - 0.25) < 0.1


def test_classify_roles_deterministic_and_errors():
    points, labels = blobs(7, [(0.0, 0.0), (1.0, 1.0)], per=15, spread=0.8)
    assert classify_roles(points, labels, seed=2) == classify_roles(points, labels, seed=2, workers=3)
    with pytest.raises(DegenerateClassError):
        classify_roles(points, np.zeros(30, dtype=int))
    bad = labels.copy()
    bad[0] = 7
    with pytest.raises(DegenerateClassError):
        classify_roles(points, bad)


def test_report_rows_and_table():
    points, labels = blobs(8, [(0.0, 0.0), (4.0, 4.0)], per=15)
    clustering = evaluate_clustering(points, labels, seed=0)
    classification = classify_roles(points, labels, seed=0)
    row = report_row('blobs', [clustering, clustering], [classification, classification])
    assert row['trials'] == 2
    assert row['Homogeneity']['std'] == 0.0
    text = format_table([row])
    assert text.splitlines()[0].startswith('Configuration')
    assert 'Homogeneity' in text and 'blobs' in text
    assert '"rows"' in table_json([row])


if __name__ == "__main__":
    test_kmeans_separates_two_clouds()
    test_kmeans_identical_points()
    test_kmeans_deterministic_and_thread_independent()
    test_homogeneity_completeness_examples()
    test_homogeneity_completeness_duality_and_relabel()
    test_silhouette_examples()
    test_softmax_regression_separable()
    test_classify_roles_separable()
    test_classify_roles_chance_level()
    test_classify_roles_deterministic_and_errors()
    test_report_rows_and_table()
    print("All evalkit tests passed.")
