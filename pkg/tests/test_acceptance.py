"""
End-to-end checks of the published claims at desk scale. These are the slowest tests
in the suite (a few minutes in total).
"""

import math
import os
import sys

import networkx as nx
import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import bench_graph, evaluate_roles, run_sweep_noise
from config.settings import REPORT_COLUMNS
from core.embed import EmbeddingConfig, embed_graph, profile_embedding
from core.entropy import fannes_audenaert_bound, trace_identity_check, vne_approx, vne_exact
from core.evalkit import report_row
from core.graph import build_graph
from core.readout import ReadoutModel, TrainConfig, gradient_check, train
from core.spectral import eigs_symmetric, power_iteration_lambda_max
from core.synth import configuration_from_name, make_triangle_dataset, perturb, rewire_edges


def random_graphs(count, seed, n_range=(2, 64), probs=(0.1, 0.3, 0.6)):
    rng = np.random.default_rng(seed)
    graphs = []
    for i in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        p = probs[i % len(probs)]
        g = nx.gnp_random_graph(n, p, seed=int(rng.integers(2 ** 31)))
        graphs.append(build_graph(n, list(g.edges())))
    return graphs


GRAPHS = random_graphs(500, seed=2024)

NOISY_ACCURACY_FLOOR = 0.45


def test_approximation_never_exceeds_exact():
    for g in GRAPHS:
        estimate = vne_approx(g, with_exact=True)
        assert estimate.h_hat <= estimate.h_exact + 1e-9
        if g.edge_count == 0:
            continue
        tight = abs(estimate.h_exact - estimate.h_hat) < 1e-9
        assert tight == (abs(estimate.lambda_max - 1.0) < 1e-9)


def test_quadratic_entropy_identity():
    for g in GRAPHS:
        if g.edge_count == 0:
            continue
        lhs, rhs = trace_identity_check(g)
        assert abs(lhs - rhs) < 1e-10


def test_power_iteration_matches_dense_eigensolver():
    for g in random_graphs(200, seed=7, n_range=(2, 40)):
        if g.edge_count == 0:
            continue
        rho = g.laplacian().dense() / (2.0 * g.edge_count)
        dense = eigs_symmetric(rho).eigenvalues[-1]
        value, _ = power_iteration_lambda_max(rho)
        assert abs(value - dense) < 1e-6


def test_fannes_audenaert_on_single_rewires():
    rng = np.random.default_rng(11)
    checked = 0
    seed = 0
    while checked < 100:
        seed += 1
        g = build_graph(20, list(nx.gnp_random_graph(20, 0.2, seed=seed).edges()))
        if g.edge_count == 0:
            continue
        bound = fannes_audenaert_bound(g, rewire_edges(g, 1, rng))
        stated = 0.5 * bound.t * math.log(19) + bound.s_t
        assert abs(stated - bound.bound) < 1e-12
        assert bound.delta_h <= bound.bound + 1e-12
        checked += 1


def test_known_values():
    k2 = build_graph(2, [(0, 1)])
    k3 = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    s3 = build_graph(4, [(0, 1), (0, 2), (0, 3)])
    assert abs(vne_exact(k2)) < 1e-9
    triangle = vne_approx(k3, with_exact=True)
    assert abs(triangle.h_exact - math.log(2)) < 1e-9
    assert abs(triangle.q - 0.5) < 1e-9
    assert abs(triangle.h_hat + 0.5 * math.log(0.5)) < 1e-9
    star = vne_approx(s3, with_exact=True)
    assert abs(star.h_exact - 0.867563) < 1e-6
    assert abs(star.lambda_max - 2.0 / 3.0) < 1e-9


def _role_row(config, k, trials, seed=0):
    cfg = EmbeddingConfig(max_radius=4)
    clusterings, classifications = [], []
    for t in range(trials):
        ds = configuration_from_name(config, seed=seed + t)
        if k:
            ds = perturb(ds, k, [seed, t])
        clustering, classification = evaluate_roles(ds, cfg, seed + t)
        clusterings.append(clustering)
        classifications.append(classification)
    return report_row(config, clusterings, classifications)


def test_structural_roles_basic_house():
    clean = _role_row('basic-house', 0, trials=20)
    assert clean['Homogeneity']['mean'] >= 0.90
    assert clean['Completeness']['mean'] >= 0.90
    assert clean['Accuracy']['mean'] >= 0.90
    # k=10 rewires touch about 31 of the 80 nodes as endpoints
    noisy = _role_row('basic-house', 10, trials=20)
    assert noisy['Accuracy']['mean'] >= NOISY_ACCURACY_FLOOR
    assert noisy['Accuracy']['mean'] < clean['Accuracy']['mean']


def test_noise_sweep_peaks_unperturbed(tmp_path):
    rows = run_sweep_noise('basic-house', k_max=20, trials=5, radius=4, mode='auto', seed=0,
                           out=str(tmp_path / 'sweep.csv'))
    assert [r['k'] for r in rows] == list(range(21))
    for column in REPORT_COLUMNS:
        series = [r[column] for r in rows]
        assert all(np.isfinite(series))
        assert series[0] >= max(series) - 0.05


def test_isomorphism_invariance():
    rng = np.random.default_rng(5)
    for g in random_graphs(50, seed=99, n_range=(5, 40), probs=(0.1, 0.2)):
        perm = rng.permutation(g.node_count)
        h = g.relabel(perm)
        for mode, tol in (('exact', 1e-10), ('approx', 1e-9)):
            cfg = EmbeddingConfig(max_radius=3, mode=mode)
            a = embed_graph(g, cfg).values
            b = embed_graph(h, cfg).values
            assert np.allclose(a, b[perm], rtol=0.0, atol=tol)


def test_gradient_check():
    rng = np.random.default_rng(1)
    for i in range(20):
        d, n = int(rng.integers(1, 6)), int(rng.integers(1, 8))
        model = ReadoutModel.create(d, int(rng.integers(2, 7)), int(rng.integers(2, 5)),
                                    np.random.default_rng([1, i]))
        assert model.parameter_count() <= 1000
        rows = rng.standard_normal((n, d))
        assert gradient_check(model, rows, int(rng.integers(model.n_classes))) < 1e-4


def test_linear_scaling():
    cfg = EmbeddingConfig(max_radius=2, mode='approx')
    times = []
    for n in (1000, 2000, 4000, 8000):
        times.append(profile_embedding(bench_graph(n, 4, seed=0), cfg)['total_seconds'])
    for previous, current in zip(times, times[1:]):
        assert current / previous < 3.0


def test_triangle_classification():
    dataset = make_triangle_dataset(count=100, seed=0)
    cfg = TrainConfig(radius_grid=(2,), hidden_grid=(16,), attributes='degree', mode='exact', seed=0)
    result = train(dataset, cfg)
    assert result.mean_accuracy >= 0.95


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, '-q']))
