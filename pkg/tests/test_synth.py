import json
import os
import sys

import networkx as nx
import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.errors import BadSpecError, OverfullError, SaturatedError
from core.graph import build_graph
from core.synth import (
    ShapeSpec, ShapeDataset, make_shape, build_configuration, configuration_from_name,
    perturb, refined_roles, rewire_edges, has_triangle, make_triangle_dataset,
)


def test_make_shape_counts():
    house, roles = make_shape(ShapeSpec('house'))
    assert (house.node_count, house.edge_count, len(set(roles))) == (5, 6, 3)
    star, roles = make_shape(ShapeSpec('star', 5))
    assert (star.node_count, star.edge_count, len(set(roles))) == (6, 5, 2)
    fan, roles = make_shape(ShapeSpec('fan', 4))
    assert (fan.node_count, fan.edge_count, len(set(roles))) == (5, 7, 3)
    assert roles == [0, 1, 2, 2, 1]
    for g in (house, star, fan):
        assert nx.is_connected(g.to_networkx())


def test_make_shape_rejects_bad_specs():
    with pytest.raises(BadSpecError):
        make_shape(ShapeSpec('star', 1))
    with pytest.raises(BadSpecError):
        make_shape(ShapeSpec('hexagon'))


def test_basic_house_configuration():
    ds = configuration_from_name('basic-house')
    assert ds.graph.node_count == 80
    assert ds.graph.edge_count == 100
    assert ds.class_names == ['cycle', 'cycle:attached', 'house:bottom@0', 'house:bottom@1',
                              'house:top@1', 'house:top@2', 'house:apex']
    assert set(np.unique(ds.labels).tolist()) == set(range(7))
    # anchors sit on every third cycle node
    anchors = [v for v in range(30) if ds.graph.degrees[v] == 3]
    assert anchors == list(range(0, 30, 3))
    assert [v for v in range(30) if ds.labels[v] == 1] == anchors
    assert ds.labels[30:35].tolist() == [2, 3, 4, 5, 6]
    assert np.bincount(ds.labels).tolist() == [20] + [10] * 6


def test_basic_star_configuration():
    ds = configuration_from_name('basic-star')
    assert ds.graph.node_count == 90
    assert ds.class_names == ['cycle', 'cycle:attached', 'star:center', 'star:leaf']


def test_varied_configuration_is_seeded():
    a = configuration_from_name('varied', seed=3)
    b = configuration_from_name('varied', seed=3)
    c = configuration_from_name('varied', seed=4)
    assert a.graph == b.graph and np.array_equal(a.labels, b.labels)
    assert a.graph != c.graph
    assert a.graph.node_count == 30 + 10 * (5 + 6 + 5)
    # 30 shapes on a 30-cycle: every cycle node carries a shape
    assert a.class_names[0] == 'cycle:attached'
    assert a.class_count == 1 + 5 + 2 + 3
    assert len(np.unique(a.labels)) == a.class_count


def test_overfull_and_bad_cycle():
    with pytest.raises(OverfullError):
        build_configuration('basic', [ShapeSpec('house')], instances=31, cycle_len=30)
    with pytest.raises(BadSpecError):
        build_configuration('basic', [ShapeSpec('house')], instances=1, cycle_len=2)


def test_refined_roles_split_by_anchor_distance():
    assert refined_roles(ShapeSpec('house')) == [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)]
    assert refined_roles(ShapeSpec('star', 3)) == [(0, 0), (1, 1), (1, 1), (1, 1)]
    assert refined_roles(ShapeSpec('fan', 4)) == [(0, 0), (1, 1), (2, 1), (2, 1), (1, 1)]


def test_classes_are_structurally_equivalent():
    ds = configuration_from_name('basic-house')
    nxg = ds.graph.to_networkx()
    for c in range(ds.class_count):
        members = np.flatnonzero(ds.labels == c).tolist()
        ego = [nx.ego_graph(nxg, v, radius=3) for v in members]
        assert all(nx.is_isomorphic(ego[0], other) for other in ego[1:])


def test_fully_attached_cycle_drops_empty_class():
    ds = build_configuration('basic', [ShapeSpec('star', 2)], instances=5, cycle_len=5)
    assert ds.class_names == ['cycle:attached', 'star:center', 'star:leaf']
    assert set(ds.labels.tolist()) == {0, 1, 2}


def test_perturb_zero_is_identity():
    ds = configuration_from_name('basic-house')
    same = perturb(ds, 0, seed=1)
    assert same.graph == ds.graph
    assert same.rewired_edges == 0


def test_perturb_one_edge():
    ds = configuration_from_name('basic-house')
    for seed in range(20):
        out = perturb(ds, 1, seed)
        assert out.graph.edge_count == ds.graph.edge_count
        diff = set(ds.graph.edges()) ^ set(out.graph.edges())
        assert len(diff) == 2


def test_perturb_ten_edges():
    ds = configuration_from_name('basic-house')
    out = perturb(ds, 10, seed=7)
    assert out.graph.edge_count == 100
    assert out.graph.node_count == 80
    assert out.rewired_edges == 10
    assert np.array_equal(out.labels, ds.labels)
    assert perturb(ds, 10, seed=7).graph == out.graph


def test_rewire_saturated_and_too_many():
    k4 = build_graph(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
    with pytest.raises(SaturatedError):
        rewire_edges(k4, 1, np.random.default_rng(0))
    with pytest.raises(BadSpecError):
        rewire_edges(build_graph(3, [(0, 1)]), 2, np.random.default_rng(0))


def test_dataset_json_round_trip():
    ds = perturb(configuration_from_name('varied', seed=1), 3, seed=2)
    data = json.loads(json.dumps(ds.to_dict()))
    assert set(data) == {'nodes', 'edges', 'labels', 'meta'}
    back = ShapeDataset.from_dict(data)
    assert back.graph == ds.graph
    assert np.array_equal(back.labels, ds.labels)
    assert back.rewired_edges == 3
    assert back.class_names == ds.class_names


def test_has_triangle():
    assert has_triangle(build_graph(3, [(0, 1), (1, 2), (0, 2)]))
    assert not has_triangle(build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))


def test_triangle_dataset():
    graphs = make_triangle_dataset(count=40, seed=5)
    labels = [lg.label for lg in graphs]
    assert labels.count(0) == labels.count(1) == 20
    for lg in graphs:
        assert lg.label == int(has_triangle(lg.graph))
        assert lg.graph.edge_count == lg.graph.node_count
        assert nx.is_connected(lg.graph.to_networkx())
    again = make_triangle_dataset(count=40, seed=5)
    assert all(a.graph == b.graph for a, b in zip(graphs, again))


if __name__ == "__main__":
    test_make_shape_counts()
    test_make_shape_rejects_bad_specs()
    test_basic_house_configuration()
    test_basic_star_configuration()
    test_varied_configuration_is_seeded()
    test_overfull_and_bad_cycle()
    test_refined_roles_split_by_anchor_distance()
    test_classes_are_structurally_equivalent()
    test_fully_attached_cycle_drops_empty_class()
    test_perturb_zero_is_identity()
    test_perturb_one_edge()
    test_perturb_ten_edges()
    test_rewire_saturated_and_too_many()
    test_dataset_json_round_trip()
    test_has_triangle()
    test_triangle_dataset()
    print("All synth tests passed.")
