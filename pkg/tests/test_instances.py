import itertools
import warnings
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from branchdual.bandwidth import bandwidth
from branchdual.instances import (InstanceFormatError, InstanceRecord, binomial_sigma, density,
                                  format_instance, gen_random, gen_turner, parse_instance,
                                  parse_matrix_market, random_suite, read_instance,
                                  read_matrix_market, turner_candidate_count,
                                  turner_edge_probability, turner_suite,
                                  turner_target_density, write_instance)

DATA = Path(__file__).parent / "data"


# ------------------------------------------------------------------ random

def test_random_is_seeded_and_named():
    a, b = gen_random(30, 0.5, 7), gen_random(30, 0.5, 7)
    assert a.graph == b.graph and a.name == "random_n30_d0.5_s7"
    assert gen_random(30, 0.5, 8).graph != a.graph
    assert a.param("seed", int) == 7 and a.param("d", float) == 0.5
    assert a.reference_ub is None


def test_random_frozen_edges():
    # pairs in row-major upper-triangle order, one uniform draw each
    want = ((0, 2), (0, 3), (0, 4), (1, 6), (2, 3), (2, 5), (3, 4), (3, 6), (3, 7))
    assert gen_random(8, 0.3, 0).graph.edges == want
    draws = np.random.default_rng(0).random(28)
    pairs = list(itertools.combinations(range(8), 2))
    assert tuple(e for e, x in zip(pairs, draws) if x < 0.3) == want


def test_turner_frozen_example():
    r = gen_turner(6, 2, 0.4, 5)
    assert r.planted_layout == (1, 4, 2, 3, 5, 0)
    assert r.graph.edges == ((0, 3), (0, 5), (1, 4), (3, 4), (3, 5))


def test_random_extremes():
    assert gen_random(10, 0.0, 1).graph.m == 0
    assert gen_random(10, 1.0, 1).graph.m == 45
    with pytest.raises(ValueError):
        gen_random(10, 1.5, 1)
    with pytest.raises(ValueError):
        gen_random(0, 0.5, 1)


def test_random_density_statistics():
    pairs = 30 * 29 // 2
    for d in (0.1, 0.5, 0.9):
        dens = [density(gen_random(30, d, s).graph) for s in range(40)]
        mean = sum(dens) / len(dens)
        # mean of 40 draws: sigma shrinks by sqrt(40)
        assert abs(mean - d) <= 3 * binomial_sigma(pairs, d) / pairs / 40 ** 0.5


def test_random_suite_shape():
    suite = random_suite()
    assert len(suite) == 90 and len({r.name for r in suite}) == 90
    assert {r.param("d", float) for r in suite} == {round(0.1 * k, 1) for k in range(1, 10)}


# ------------------------------------------------------------------ turner

def test_turner_candidate_count():
    assert turner_candidate_count(5, 1) == 4
    assert turner_candidate_count(5, 4) == 10
    assert turner_candidate_count(30, 3) == 84


def test_turner_respects_planted_bandwidth():
    for phi in (1, 3, 10, 29):
        for d in (0.1, 0.3, 0.5):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                r = gen_turner(30, phi, d, phi)
            assert bandwidth(r.graph, list(r.planted_layout)) <= phi
            assert r.reference_ub == phi and r.ub_tag == "planted_phi"
            assert r.name == f"turner_n30_phi{phi}_d{d:g}_s{phi}"


def test_turner_clamp_warns():
    with pytest.warns(RuntimeWarning):
        p = turner_edge_probability(30, 3, 0.5)
    assert p == 1.0
    assert turner_target_density(30, 3, 0.5) == pytest.approx(84 / 435)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = gen_turner(30, 3, 0.5, 0).graph
    assert g.m == 84  # every candidate pair kept


def test_turner_density_within_three_sigma():
    pairs = 435
    for phi in (9, 15, 27):
        for d in (0.3, 0.5):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                for s in range(5):
                    g = gen_turner(30, phi, d, s).graph
                    target = turner_target_density(30, phi, d)
                    p = turner_edge_probability(30, phi, d)
                    sigma = binomial_sigma(turner_candidate_count(30, phi), p) / pairs
                    assert abs(density(g) - target) <= 3 * sigma + 1e-12


def test_turner_validation():
    with pytest.raises(ValueError):
        gen_turner(10, 0, 0.3, 1)
    with pytest.raises(ValueError):
        gen_turner(10, 10, 0.3, 1)
    with pytest.raises(ValueError):
        gen_turner(1, 1, 0.3, 1)


def test_turner_suite_default_grid():
    suite = turner_suite(seeds=range(2))
    assert len(suite) == 9 * 2 * 2
    assert {r.param("phi", int) for r in suite} == set(range(3, 28, 3))


# ------------------------------------------------------------ matrix market

def test_mm_pattern_symmetric():
    r = read_matrix_market(DATA / "pattern_symmetric.mtx")
    assert r.graph.n == 4 and r.graph.edges == ((0, 1), (1, 2), (2, 3))
    assert r.graph.labels == ("1", "2", "3", "4")
    assert r.name == "pattern_symmetric" and r.source == "matrix_market"


def test_mm_general_with_both_triangles():
    r = read_matrix_market(DATA / "real_general.mtx")
    # explicit zero entries are stored entries, so (1,2) counts
    assert r.graph.edges == ((0, 1), (0, 2), (1, 3))


def test_mm_diagonal_ignored():
    r = read_matrix_market(DATA / "with_diagonal.mtx")
    assert r.graph.n == 5 and r.graph.edges == ((0, 1), (2, 4))


@pytest.mark.parametrize("name", ["array_format.mtx", "rectangular.mtx"])
def test_mm_rejects(name):
    with pytest.raises(InstanceFormatError):
        read_matrix_market(DATA / name)


def test_mm_rejects_garbage_header():
    with pytest.raises(InstanceFormatError):
        parse_matrix_market("hello\n1 1 0\n")


@pytest.mark.parametrize("name", ["pattern_symmetric.mtx", "real_general.mtx",
                                  "with_diagonal.mtx"])
def test_mm_round_trip_bit_exact(name, tmp_path):
    r = read_matrix_market(DATA / name)
    text = format_instance(r)
    back = parse_instance(text)
    assert back == r
    assert format_instance(back) == text
    path = write_instance(back, tmp_path / "x.inst")
    assert path.read_bytes() == text.encode()


# ------------------------------------------------------------ canonical format

def test_format_example():
    from branchdual.bandwidth import five_vertex_graph
    r = InstanceRecord(five_vertex_graph(), "five_vertex", "matrix_market", (("note", "x"),), 2, "exact")
    assert format_instance(r) == (
        "bandwidth-instance v1 n=5 m=6\n"
        "# name=five_vertex\n# source=matrix_market\n# note=x\n"
        "# reference_ub=2\n# tag=exact\n# labels=a,b,c,d,e\n"
        "0 1\n1 2\n1 3\n1 4\n2 4\n3 4\n")


@pytest.mark.parametrize("text", [
    "",
    "bandwidth-instance v2 n=2 m=0\n",
    "bandwidth-instance v1 n=2 m=1\n",
    "bandwidth-instance v1 n=2 m=1\n1 0\n",
    "bandwidth-instance v1 n=2 m=1\n0 2\n",
    "bandwidth-instance v1 n=3 m=2\n0 2\n0 1\n",
    "bandwidth-instance v1 n=3 m=2\n0 1\n0 1\n",
    "bandwidth-instance v1 n=2 m=1\n0 x\n",
    "bandwidth-instance v1 n=2 m=0\n# bad line\n",
    "bandwidth-instance v1 n=2 m=0\n# a=1\n# a=2\n",
    "bandwidth-instance v1 n=2 m=0\n# labels=a\n",
    "bandwidth-instance v1 n=2 m=0\n# source=nowhere\n",
    "bandwidth-instance v1 n=2 m=0\n# reference_ub=1\n",
    "bandwidth-instance v1 n=2 m=0\n# planted_layout=0,0\n",
])
def test_parse_rejects_corrupt_files(text):
    with pytest.raises(InstanceFormatError):
        parse_instance(text)


def test_record_validation(five_vertex):
    with pytest.raises(ValueError):
        InstanceRecord(five_vertex, "x", "elsewhere")
    with pytest.raises(ValueError):
        InstanceRecord(five_vertex, "has space", "random")
    with pytest.raises(ValueError):
        InstanceRecord(five_vertex, "x", "random", reference_ub=2)
    with pytest.raises(ValueError):
        InstanceRecord(five_vertex, "x", "random", planted_layout=(0, 1))


@given(st.integers(1, 25), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_random_round_trip(n, d, seed):
    r = gen_random(n, d, seed)
    assert parse_instance(format_instance(r)) == r


@given(st.integers(2, 25), st.data())
def test_turner_round_trip(n, data):
    phi = data.draw(st.integers(1, n - 1))
    d = data.draw(st.sampled_from([0.1, 0.3, 0.5]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        r = gen_turner(n, phi, d, data.draw(st.integers(0, 1000)))
    text = format_instance(r)
    back = parse_instance(text)
    assert back == r and format_instance(back) == text


def test_file_round_trip(tmp_path):
    r = gen_random(12, 0.4, 3).with_ub(5, "heuristic")
    write_instance(r, tmp_path / "a.inst")
    assert read_instance(tmp_path / "a.inst") == r
