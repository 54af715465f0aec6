import pytest

from lfembed.generators import (
    FAMILIES,
    generate,
    grid,
    random_graph,
    random_graph_edges,
    random_tree,
    random_tree_edges,
    uniform_points,
)
from lfembed.metric import InputError, validate


def test_grid_2_2_has_13_points():
    g = grid(2, 2)
    assert g.size == 13
    assert g.points[g.basepoint] == "(0, 0)"


@pytest.mark.parametrize("dim, radius, count", [(1, 4, 9), (2, 1, 5), (2, 3, 25), (3, 1, 7)])
def test_grid_point_counts(dim, radius, count):
    assert grid(dim, radius).size == count


def test_random_tree_has_n_minus_1_edges_and_is_connected():
    edges = random_tree_edges(40, seed=3)
    assert len(edges) == 39
    assert validate(random_tree(40, seed=3)).ok


def test_random_graph_joins_components_and_flags_it():
    sp = random_graph(30, 0.01, seed=5)
    assert validate(sp).ok
    assert sp.meta["connecting_edges_added"] > 0
    _, added = random_graph_edges(30, 0.01, 5)
    assert added == sp.meta["connecting_edges_added"]


@pytest.mark.parametrize("family, params", [
    ("random_graph", {"n": 25, "p": 0.2, "seed": 9}),
    ("random_tree", {"n": 25, "seed": 9}),
    ("uniform_points", {"n": 25, "seed": 9}),
])
def test_same_seed_same_table(family, params):
    a = generate(family, **params)
    b = generate(family, **params)
    assert a == b and a.dist == b.dist
    other = dict(params, seed=10)
    assert generate(family, **other).dist != a.dist


@pytest.mark.parametrize("norm, exact", [("l1", True), ("linf", True), ("l2", False)])
def test_uniform_points_norms(norm, exact):
    sp = uniform_points(30, 2, seed=1, norm=norm)
    assert sp.exact is exact
    assert validate(sp).ok


def test_all_families_dispatch():
    params = {"dim": 2, "radius": 2, "n": 10, "p": 0.3, "seed": 1}
    for family in FAMILIES:
        assert validate(generate(family, **params)).ok


def test_bad_parameters():
    with pytest.raises(InputError):
        generate("nope")
    with pytest.raises(InputError):
        grid(0, 2)
    with pytest.raises(InputError):
        random_graph(1, 0.5, 1)
