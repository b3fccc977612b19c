import os
import sys

import networkx as nx
import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.errors import ConvergenceError, NonSymmetricError
from core.graph import build_graph
from core.spectral import eigs_symmetric, power_iteration_lambda_max, _round_robin


def density(g):
    return g.laplacian().dense() / (2.0 * g.edge_count)


def test_round_robin_covers_every_pair_once():
    for n in range(2, 12):
        seen = []
        for p, q in _round_robin(n):
            assert len(set(p.tolist()) | set(q.tolist())) == 2 * len(p)
            seen.extend(zip(p.tolist(), q.tolist()))
        assert sorted(seen) == [(p, q) for p in range(n) for q in range(p + 1, n)]


def test_eigs_known_values():
    assert np.allclose(eigs_symmetric(np.eye(3)).eigenvalues, [1.0, 1.0, 1.0])
    assert np.allclose(eigs_symmetric([[0.0, 1.0], [1.0, 0.0]]).eigenvalues, [-1.0, 1.0], atol=1e-12)
    triangle = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    assert np.allclose(eigs_symmetric(density(triangle)).eigenvalues, [0.0, 0.5, 0.5], atol=1e-12)


def test_eigs_one_by_one_and_diagonal():
    result = eigs_symmetric([[2.5]])
    assert result.eigenvalues.tolist() == [2.5]
    assert result.sweeps == 0
    assert eigs_symmetric(np.zeros((3, 3))).eigenvalues.tolist() == [0.0, 0.0, 0.0]


def test_eigs_matches_numpy_on_random_matrices():
    rng = np.random.default_rng(11)
    for n in range(2, 33, 3):
        a = rng.standard_normal((n, n))
        a = (a + a.T) / 2
        result = eigs_symmetric(a)
        assert np.allclose(result.eigenvalues, np.linalg.eigvalsh(a), atol=1e-9)
        assert abs(result.eigenvalues.sum() - np.trace(a)) < 1e-8 * n


def test_eigs_small_matches_characteristic_roots():
    rng = np.random.default_rng(5)
    for n in (2, 3, 4):
        a = rng.standard_normal((n, n))
        a = (a + a.T) / 2
        roots = np.sort(np.roots(np.poly(a)).real)
        assert np.allclose(eigs_symmetric(a).eigenvalues, roots, atol=1e-6)


def test_eigenvectors_residual():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((10, 10))
    a = a + a.T
    result = eigs_symmetric(a, vectors=True)
    assert result.residual < 1e-8
    v = result.eigenvectors
    assert np.allclose(v.T @ v, np.eye(10), atol=1e-10)


def test_eigs_rejects_asymmetric():
    with pytest.raises(NonSymmetricError):
        eigs_symmetric([[1.0, 2.0], [0.0, 1.0]])


def test_eigs_budget_exhausted():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((8, 8))
    with pytest.raises(ConvergenceError):
        eigs_symmetric(a + a.T, max_sweeps=1)


def test_power_iteration_known_values():
    edge = build_graph(2, [(0, 1)])
    triangle = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    star = build_graph(4, [(0, 1), (0, 2), (0, 3)])
    assert abs(power_iteration_lambda_max(density(edge))[0] - 1.0) < 1e-9
    assert abs(power_iteration_lambda_max(density(triangle))[0] - 0.5) < 1e-9
    assert abs(power_iteration_lambda_max(density(star))[0] - 2.0 / 3.0) < 1e-9


def test_power_iteration_sparse_matches_dense():
    g = build_graph(30, list(nx.gnp_random_graph(30, 0.2, seed=4).edges()))
    rho_sparse = g.laplacian().sparse() / (2.0 * g.edge_count)
    dense_value, _ = power_iteration_lambda_max(density(g), tol=1e-12, max_iters=100_000)
    sparse_value, _ = power_iteration_lambda_max(rho_sparse, tol=1e-12, max_iters=100_000)
    assert abs(dense_value - sparse_value) < 1e-10


def test_power_iteration_zero_matrix():
    value, _ = power_iteration_lambda_max(np.zeros((4, 4)))
    assert value == 0.0


def test_power_iteration_budget_exhausted():
    g = build_graph(20, list(nx.gnp_random_graph(20, 0.3, seed=9).edges()))
    with pytest.raises(ConvergenceError):
        power_iteration_lambda_max(density(g), tol=0.0, max_iters=3)


def test_eigs_tiny_off_diagonal_no_overflow():
    a = np.array([[1.0, 1e-200, 0.0],
                  [1e-200, 2.0, 0.5],
                  [0.0, 0.5, 3.0]])
    with np.errstate(over='raise', invalid='raise'):
        result = eigs_symmetric(a)
    assert np.all(np.isfinite(result.eigenvalues))
    assert np.allclose(result.eigenvalues, np.linalg.eigvalsh(a), atol=1e-12)


def test_power_iteration_default_settings_within_tol():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 200:
        n = int(rng.integers(2, 41))
        g = build_graph(n, list(nx.gnp_random_graph(n, (0.1, 0.3, 0.6)[checked % 3],
                                                    seed=int(rng.integers(2 ** 31))).edges()))
        if g.edge_count == 0:
            continue
        rho = density(g)
        value, _ = power_iteration_lambda_max(rho)
        assert abs(value - np.linalg.eigvalsh(rho)[-1]) < 1e-9
        checked += 1


if __name__ == "__main__":
    test_round_robin_covers_every_pair_once()
    test_eigs_known_values()
    test_eigs_one_by_one_and_diagonal()
    test_eigs_matches_numpy_on_random_matrices()
    test_eigs_small_matches_characteristic_roots()
    test_eigenvectors_residual()
    test_eigs_rejects_asymmetric()
    test_eigs_budget_exhausted()
    test_power_iteration_known_values()
    test_power_iteration_sparse_matches_dense()
    test_power_iteration_zero_matrix()
    test_power_iteration_budget_exhausted()
    test_eigs_tiny_off_diagonal_no_overflow()
    test_power_iteration_default_settings_within_tol()
    print("All spectral tests passed.")
