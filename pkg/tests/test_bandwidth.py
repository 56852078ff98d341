import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

import reference_relaxation as ref
from conftest import graphs, graphs_with_layout, random_graph
from branchdual.bandwidth import (BandwidthOracle, Graph, PartialLayout, alpha_bound,
                                  bandwidth, bandwidth_domain, beta_bound, ell_bounds,
                                  f_bounds, gamma_bound, layered_order, layout_feasible,
                                  raw_relaxation, relaxation_value, select_label_greedy,
                                  select_label_layered, static_bound, ub_heuristic)
from branchdual.dual import INF
from branchdual.oracle import exact_bandwidth, min_completion_value

A, B, C, D, E = range(5)


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


# ------------------------------------------------------------------ examples

def test_five_vertex_bandwidths(five_vertex):
    assert bandwidth(five_vertex, [A, B, C, D, E]) == 3
    assert bandwidth(five_vertex, [A, C, B, E, D]) == 2
    assert five_vertex.labels == tuple("abcde")


def test_five_vertex_static_bounds(five_vertex):
    assert (alpha_bound(five_vertex), gamma_bound(five_vertex), beta_bound(five_vertex)) == (2, 2, 2)


def test_five_vertex_latest_positions(five_vertex):
    left_c = PartialLayout((C,), ())
    assert ell_bounds(five_vertex, left_c, 2) == [5, 3, 1, 4, 3]
    assert ell_bounds(five_vertex, left_c, 1) is None
    assert relaxation_value(five_vertex, left_c) == 2
    right_c = PartialLayout((), (C,))
    assert f_bounds(five_vertex, right_c, 2) == [1, 3, 5, 2, 3]


def test_five_vertex_prefix_forces_three(five_vertex):
    # a then b on the left leaves b three neighbours to the right
    assert raw_relaxation(five_vertex, PartialLayout((A, B), ())) == 3
    assert not layout_feasible(five_vertex, PartialLayout((A, B), ()), 2)
    assert layout_feasible(five_vertex, PartialLayout((A, B), ()), 3)


def test_bandwidth_rejects_non_permutations(five_vertex):
    with pytest.raises(ValueError):
        bandwidth(five_vertex, [A, B, C, D])
    with pytest.raises(ValueError):
        bandwidth(five_vertex, [A, A, C, D, E])


def test_static_bounds_on_families():
    for n in range(2, 9):
        assert alpha_bound(path(n)) == 1 and gamma_bound(path(n)) == 1
        assert static_bound(complete(n)) == n - 1
        assert exact_bandwidth(complete(n)) == n - 1
    assert exact_bandwidth(cycle(5)) == 2
    assert exact_bandwidth(cycle(6)) == 2


def test_edgeless_and_tiny_graphs():
    g = Graph.from_edges(4, [])
    assert static_bound(g) == 0 and exact_bandwidth(g) == 0
    assert relaxation_value(g, PartialLayout()) == 0
    assert bandwidth(Graph.from_edges(1, []), [0]) == 0


def test_complete_layout_value_is_its_bandwidth(five_vertex):
    arr = [A, C, B, E, D]
    layout = PartialLayout(tuple(arr[:3]), tuple(reversed(arr[3:])))
    assert raw_relaxation(five_vertex, layout) == 2
    arr = [A, B, C, D, E]
    layout = PartialLayout(tuple(arr), ())
    assert raw_relaxation(five_vertex, layout) == 3


def test_disconnected_neighbours_infinite():
    # two far-apart fixed endpoints joined by an edge cannot fit phi < n-1
    g = Graph.from_edges(4, [(0, 1)])
    assert raw_relaxation(g, PartialLayout((0,), (1,))) == 3


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [], labels="ab")
    assert Graph.from_edges(3, [(2, 0)]).edges == ((0, 2),)


def test_partial_layout_validation():
    with pytest.raises(ValueError):
        PartialLayout((0,), (0,)).validate(3)
    with pytest.raises(ValueError):
        PartialLayout((0, 1, 2, 3), ()).validate(3)
    assert PartialLayout((1,), (0,)).positions(3) == {1: 1, 0: 3}


def test_layered_order():
    assert layered_order(5) == [0, 4, 1, 3, 2]
    assert layered_order(4) == [0, 3, 1, 2]
    assert layered_order(1) == [0]
    assert select_label_layered(PartialLayout((0,), ()), 5) == 4
    assert select_label_layered(PartialLayout((0,), (1,)), 5) == 1


def test_greedy_label_is_a_side(five_vertex):
    layout = PartialLayout((A,), ())
    assert select_label_greedy(five_vertex, layout) in (1, 4)


def test_ub_heuristic_examples():
    # path numbered adversarially still gets bandwidth 1
    perm = [3, 0, 5, 1, 4, 2]
    g = Graph.from_edges(6, [(perm[i], perm[i + 1]) for i in range(5)])
    order, width = ub_heuristic(g)
    assert sorted(order) == list(range(6)) and width == 1
    assert ub_heuristic(complete(5))[1] == 4
    # two components, each a path
    g = Graph.from_edges(5, [(0, 3), (1, 4), (4, 2)])
    assert ub_heuristic(g)[1] == 1


def test_oracle_rejects_non_prefix_assignments(five_vertex):
    oracle = BandwidthOracle(five_vertex)
    with pytest.raises(ValueError):
        oracle.value_of(((1, A),))
    assert oracle.value_of(((0, A), (0 + 4, B))) >= 2
    assert oracle.value_of(((0, A), (1, A))) == INF


def test_domain_candidates(five_vertex):
    domain, _ = bandwidth_domain(five_vertex)
    assert domain.candidates(()) == (0, 4)
    assert domain.candidates(((0, A), (4, B), (1, C), (3, D))) == (2,)


def test_child_values_match_single_evaluations():
    g = random_graph(12, 0.4, 3)
    oracle = BandwidthOracle(g)
    for layout in (PartialLayout(), PartialLayout((3, 5), (7,)), PartialLayout((1,), (2, 0))):
        for var in (len(layout.left), g.n - 1 - len(layout.right)):
            assignment = tuple(enumerate(layout.left)) + tuple(
                (g.n - 1 - i, v) for i, v in enumerate(layout.right))
            batch = oracle.child_values(assignment, var, range(g.n), floor=0)
            for v in range(g.n):
                single = oracle.value_of(assignment + ((var, v),))
                assert batch[v] == max(single, 0) or (batch[v] == INF and single == INF)


# ------------------------------------------------------------ properties

@given(graphs_with_layout(1, 8), st.integers(0, 7))
def test_kernel_matches_reference(case, phi):
    g, left, right = case
    adj = {v: set(a) for v, a in enumerate(g.adjacency)}
    assert layout_feasible(g, PartialLayout(left, right), phi) == \
        ref.feasible(g.n, adj, left, right, phi)


@given(graphs_with_layout(1, 8))
def test_relaxation_matches_reference(case):
    g, left, right = case
    adj = {v: set(a) for v, a in enumerate(g.adjacency)}
    want = ref.min_phi(g.n, adj, left, right)
    got = raw_relaxation(g, PartialLayout(left, right))
    assert got == want


@given(graphs_with_layout(1, 7))
def test_relaxation_is_a_valid_bound(case):
    g, left, right = case
    layout = PartialLayout(left, right)
    truth = min_completion_value(g, layout)
    assert relaxation_value(g, layout) <= truth
    if layout.size >= g.n - 1:
        assert raw_relaxation(g, layout) == truth


@given(graphs_with_layout(1, 8), st.integers(0, 7))
def test_feasibility_monotone_in_phi(case, phi):
    g, left, right = case
    layout = PartialLayout(left, right)
    if layout_feasible(g, layout, phi):
        assert layout_feasible(g, layout, phi + 1)


@given(graphs_with_layout(1, 8))
def test_mirror_symmetry(case):
    g, left, right = case
    layout = PartialLayout(left, right)
    assert raw_relaxation(g, layout) == raw_relaxation(g, layout.mirrored())


@given(graphs_with_layout(1, 8), st.integers(1, 7))
def test_latest_and_earliest_are_mirrors(case, phi):
    g, left, right = case
    layout = PartialLayout(left, right)
    ell = ell_bounds(g, layout, phi)
    mirrored = f_bounds(g, layout.mirrored(), phi)
    if ell is None:
        assert mirrored is None
    else:
        assert mirrored == [g.n + 1 - p for p in ell]


@given(graphs_with_layout(1, 8))
def test_fixed_positions_respected(case):
    g, left, right = case
    layout = PartialLayout(left, right)
    ell = ell_bounds(g, layout, g.n)
    for v, p in layout.positions(g.n).items():
        if v in left:
            assert ell[v] == p


@given(graphs(1, 8))
def test_static_bounds_valid_and_ordered(g):
    opt = exact_bandwidth(g)
    assert alpha_bound(g) <= opt and gamma_bound(g) <= opt and beta_bound(g) <= opt
    assert relaxation_value(g, PartialLayout()) <= opt
    order, width = ub_heuristic(g)
    assert sorted(order) == list(range(g.n))
    assert width == bandwidth(g, order) >= opt


@given(graphs(1, 8), st.randoms(use_true_random=False))
def test_bandwidth_reversal_invariant(g, rnd):
    arr = list(range(g.n))
    rnd.shuffle(arr)
    assert bandwidth(g, arr) == bandwidth(g, arr[::-1])


def test_child_values_sound_on_larger_graphs():
    # every child value bounds the best completion found by a heuristic
    for seed in range(5):
        g = random_graph(20, 0.3, seed)
        oracle = BandwidthOracle(g)
        _, ub = ub_heuristic(g)
        vals = oracle.side_values(PartialLayout(), 0)
        assert np.all(vals <= g.n)
        assert min(int(v) for v in vals) <= ub
