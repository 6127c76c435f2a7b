import random

import pytest
from hypothesis import given, settings, strategies as st

from gridroute.analysis import permutation_bound
from gridroute.coloring import (
    EXACT_LIMIT, ColoringTooLarge, EdgeColoring, WeightedBipartiteGraph, build_bipartite,
    konig_decompose, schedule_from_coloring, weighted_color_exact, weighted_color_greedy,
)
from gridroute.grid import DuplexMode, GridKind, Node, ball, rhombus
from gridroute.instances import Instance, gen_random_lk

from oracles import coloring_optimum


def random_graph(rng, max_edges=10, side=4, wmax=9):
    edges = set()
    for _ in range(rng.randint(0, max_edges)):
        edges.add((rng.randrange(side), rng.randrange(side)))
    edges = sorted(edges)
    out = [(u, v, rng.randint(1, wmax)) for u, v in edges]
    return WeightedBipartiteGraph(sorted({u for u, _, _ in out}), sorted({v for _, v, _ in out}), out)


def test_examples():
    # two disjoint heavy edges and a light one sharing an endpoint with each
    g = WeightedBipartiteGraph([0, 1], [0, 1], [(0, 0, 5), (1, 1, 5), (0, 1, 1)])
    col = weighted_color_exact(g)
    assert col.cost(g) == 6 and col.problems(g) == []
    empty = WeightedBipartiteGraph([], [], [])
    assert weighted_color_exact(empty).cost(empty) == 0


def test_exact_matches_partition_oracle_200_graphs():
    rng = random.Random(2024)
    for _ in range(200):
        g = random_graph(rng)
        col = weighted_color_exact(g)
        assert col.problems(g) == []
        assert col.cost(g) == coloring_optimum(g.edges)
        greedy = weighted_color_greedy(g)
        assert greedy.problems(g) == []
        assert greedy.cost(g) >= col.cost(g)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(1, 6)),
                max_size=9, unique_by=lambda e: (e[0], e[1])))
def test_exact_property(edges):
    g = WeightedBipartiteGraph(sorted({u for u, _, _ in edges}), sorted({v for _, v, _ in edges}),
                               list(edges))
    assert weighted_color_exact(g).cost(g) == coloring_optimum(g.edges)


def test_konig_uses_exactly_delta_matchings():
    rng = random.Random(7)
    for _ in range(50):
        g = random_graph(rng, 30, 6)
        col = konig_decompose(g)
        assert col.problems(g, exact_count=g.degree() if g.edges else 0) == []


def test_multigraph_edges():
    # a node sending two packets to the same destination is a double edge
    g = WeightedBipartiteGraph([0], [0], [(0, 0, 2), (0, 0, 3)])
    for method in (weighted_color_exact, weighted_color_greedy, konig_decompose):
        col = method(g)
        assert col.problems(g) == [] and len(col.matchings) == 2


def test_exact_limit():
    g = WeightedBipartiteGraph(list(range(EXACT_LIMIT + 1)), list(range(EXACT_LIMIT + 1)),
                               [(i, i, 1) for i in range(EXACT_LIMIT + 1)])
    with pytest.raises(ColoringTooLarge):
        weighted_color_exact(g)
    assert weighted_color_greedy(g).cost(g) == 1


def test_problems_detects_defects():
    g = WeightedBipartiteGraph([0, 1], [0], [(0, 0, 1), (1, 0, 1)])
    assert EdgeColoring([[0, 1]]).problems(g)
    assert EdgeColoring([[0]]).problems(g)
    assert EdgeColoring([[0], [0, 1]]).problems(g)


def test_build_bipartite_weights_are_window_distances():
    inst = Instance(rhombus(4, 4), [(Node(0, 0), Node(3, 3)), (Node(0, 3), Node(3, 0))], (1, 1))
    g = build_bipartite(inst)
    assert [w for _, _, w in g.edges] == [3, 6]


@pytest.mark.parametrize("seed", range(6))
def test_tri_schedule_time_equals_objective(seed):
    inst = gen_random_lk(rhombus(5, 5), 2, 2, 3, seed, density=0.4)
    g = build_bipartite(inst)
    method = weighted_color_exact if len(g.edges) <= EXACT_LIMIT else weighted_color_greedy
    col = method(g)
    res = schedule_from_coloring(inst, col)
    assert res.delivered
    assert res.completion_time == col.cost(g)
    assert res.phase_times == col.costs(g)


def test_hex_schedule_per_matching_bound():
    inst = gen_random_lk(ball(GridKind.HEXAGONAL, Node(0, 0, 0), 3), 2, 2, 3, 1, density=0.5)
    g = build_bipartite(inst)
    col = weighted_color_greedy(g)
    res = schedule_from_coloring(inst, col)
    for t, c in zip(res.phase_times, res.phase_lmax):
        assert t <= permutation_bound(GridKind.HEXAGONAL, DuplexMode.FULL, c)


def test_schedule_rejects_bad_colouring():
    inst = Instance(rhombus(3, 3), [(Node(0, 0), Node(1, 0)), (Node(0, 0), Node(2, 0))], (2, 1))
    with pytest.raises(ValueError):
        schedule_from_coloring(inst, EdgeColoring([[0, 1]]))
