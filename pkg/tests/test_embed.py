import math
import os
import sys

import networkx as nx
import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.embed import (
    EmbeddingConfig, ego_network, embed_node, embed_graph, standardize, profile_embedding,
)
from core.errors import InputError
from core.graph import build_graph
from core.synth import configuration_from_name


def cycle(n):
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def random_graph(n, p, seed):
    return build_graph(n, list(nx.gnp_random_graph(n, p, seed=seed).edges()))


def test_ego_network_on_cycle():
    c6 = cycle(6)
    for v in range(6):
        one = ego_network(c6, v, 1)
        two = ego_network(c6, v, 2)
        assert (one.node_count, one.edge_count) == (3, 2)
        assert (two.node_count, two.edge_count) == (5, 4)


def test_house_apex_ego_is_triangle():
    ds = configuration_from_name('basic-house')
    apex_class = ds.class_names.index('house:apex')
    apex = int(np.flatnonzero(ds.labels == apex_class)[0])
    ego = ego_network(ds.graph, apex, 1)
    assert (ego.node_count, ego.edge_count) == (3, 3)


def test_embed_node_examples():
    exact = EmbeddingConfig(max_radius=1, mode='exact')
    isolated = build_graph(3, [(1, 2)])
    assert embed_node(isolated, 0, EmbeddingConfig(max_radius=2)).values.tolist() == [0.0, 0.0]
    assert abs(embed_node(build_graph(2, [(0, 1)]), 0, exact).values[0]) < 1e-9
    star = build_graph(4, [(0, 1), (0, 2), (0, 3)])
    expected = math.log(6) / 3 + (2.0 / 3.0) * math.log(1.5)
    assert abs(embed_node(star, 0, exact).values[0] - expected) < 1e-9


def test_radius_reuse_when_ball_stops_growing():
    triangle = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    row = embed_node(triangle, 0, EmbeddingConfig(max_radius=4, mode='exact')).values
    assert np.allclose(row, math.log(2), atol=1e-12)
    assert len(set(row.tolist())) == 1


def test_vertex_transitive_rows_identical():
    matrix = embed_graph(cycle(6), EmbeddingConfig(max_radius=2, mode='exact'))
    assert matrix.values.shape == (6, 2)
    assert np.allclose(matrix.values, matrix.values[0], atol=1e-12)


def test_house_apex_rows_identical():
    ds = configuration_from_name('basic-house')
    matrix = embed_graph(ds.graph, EmbeddingConfig(max_radius=4, mode='exact'))
    apex_class = ds.class_names.index('house:apex')
    rows = matrix.values[ds.labels == apex_class]
    assert rows.shape[0] == 10
    assert np.allclose(rows, rows[0], atol=1e-10)


def test_house_classes_are_single_distinct_rows():
    ds = configuration_from_name('basic-house')
    values = embed_graph(ds.graph, EmbeddingConfig(max_radius=4, mode='exact')).values
    centers = []
    for c in range(ds.class_count):
        rows = values[ds.labels == c]
        assert np.allclose(rows, rows[0], atol=1e-10)
        centers.append(rows[0])
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            assert np.abs(centers[i] - centers[j]).max() > 1e-3


def test_isomorphism_invariance():
    rng = np.random.default_rng(8)
    for seed in range(8):
        g = random_graph(16, 0.2, seed)
        perm = rng.permutation(g.node_count)
        h = g.relabel(perm)
        for mode, tol in (('exact', 1e-10), ('approx', 1e-9)):
            cfg = EmbeddingConfig(max_radius=3, mode=mode)
            a = embed_graph(g, cfg).values
            b = embed_graph(h, cfg).values
            assert np.allclose(a, b[perm], atol=tol)


def test_approx_never_exceeds_exact():
    g = random_graph(20, 0.2, 4)
    exact = embed_graph(g, EmbeddingConfig(max_radius=3, mode='exact')).values
    approx = embed_graph(g, EmbeddingConfig(max_radius=3, mode='approx')).values
    assert np.all(approx <= exact + 1e-9)


def test_rows_depend_only_on_neighborhood():
    path = build_graph(10, [(i, i + 1) for i in range(9)])
    edited = build_graph(10, [(i, i + 1) for i in range(9)] + [(7, 9)])
    cfg = EmbeddingConfig(max_radius=2, mode='exact')
    assert np.array_equal(embed_node(path, 1, cfg).values, embed_node(edited, 1, cfg).values)


def test_threads_match_single_thread():
    g = random_graph(40, 0.1, 12)
    single = embed_graph(g, EmbeddingConfig(max_radius=3, mode='exact'))
    multi = embed_graph(g, EmbeddingConfig(max_radius=3, mode='exact', workers=4))
    assert np.array_equal(single.values, multi.values)
    assert single.provenance['graph_hash'] == g.fingerprint()


def test_auto_mode_switches_on_ego_size():
    g = random_graph(30, 0.3, 5)
    exact = embed_graph(g, EmbeddingConfig(max_radius=2, mode='exact')).values
    approx = embed_graph(g, EmbeddingConfig(max_radius=2, mode='approx')).values
    assert np.array_equal(embed_graph(g, EmbeddingConfig(max_radius=2)).values, exact)
    forced = embed_graph(g, EmbeddingConfig(max_radius=2, exact_node_limit=1)).values
    assert np.array_equal(forced, approx)


def test_standardize():
    values = np.array([[1.0, 5.0], [3.0, 5.0]])
    z = standardize(values)
    assert np.allclose(z[:, 0], [-1.0, 1.0])
    assert np.all(z[:, 1] == 0.0)
    matrix = embed_graph(cycle(5), EmbeddingConfig(max_radius=1, standardize=True))
    assert matrix.provenance['standardized'] is True


def test_config_validation():
    with pytest.raises(InputError):
        EmbeddingConfig(max_radius=0)
    with pytest.raises(InputError):
        EmbeddingConfig(mode='fast')


def test_profile_embedding_matches_embed():
    g = random_graph(25, 0.15, 2)
    cfg = EmbeddingConfig(max_radius=2, mode='approx')
    profile = profile_embedding(g, cfg)
    assert np.array_equal(profile['values'], embed_graph(g, cfg).values)
    assert profile['total_seconds'] >= profile['entropy_seconds'] >= 0.0


if __name__ == "__main__":
    test_ego_network_on_cycle()
    test_house_apex_ego_is_triangle()
    test_embed_node_examples()
    test_radius_reuse_when_ball_stops_growing()
    test_vertex_transitive_rows_identical()
    test_house_apex_rows_identical()
    test_house_classes_are_single_distinct_rows()
    test_isomorphism_invariance()
    test_approx_never_exceeds_exact()
    test_rows_depend_only_on_neighborhood()
    test_threads_match_single_thread()
    test_auto_mode_switches_on_ego_size()
    test_standardize()
    test_config_validation()
    test_profile_embedding_matches_embed()
    print("All embed tests passed.")
