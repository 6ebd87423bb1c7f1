import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from patmaps.errors import PajekError
from patmaps.network import (
    CityGraph,
    build_co_network,
    components,
    density,
    edge_key,
    graph_distances,
    kamada_kawai,
    layout_stress,
    louvain,
    modularity,
    read_pajek,
    write_pajek,
)

from conftest import make_record, random_city_graph


def brute_force_pairs(records, dimension):
    """Oracle: tally city pairs and node counts patent by patent."""
    counts, pairs = {}, {}
    for r in records:
        keys = sorted({p.key for p in r.parties(dimension) if p.locatable})
        for k in keys:
            counts[k] = counts.get(k, 0) + 1
        for a, b in itertools.combinations(keys, 2):
            pairs[(a, b)] = pairs.get((a, b), 0) + 1
    return counts, pairs


def clique(names, counts=None):
    g = CityGraph(window="t", node_counts={n: 1 for n in names})
    for a, b in itertools.combinations(sorted(names), 2):
        g.edges[(a, b)] = 1
    if counts:
        g.node_counts.update(counts)
    return g


def set_partitions(items):
    """Enumerate every partition of items as assignment dicts."""
    items = list(items)
    if not items:
        yield {}
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        n_groups = (max(sub.values()) + 1) if sub else 0
        for group in range(n_groups + 1):
            assignment = dict(sub)
            assignment[first] = group
            yield assignment


class TestBuild:
    def test_single_patent_triangle(self):
        record = make_record("US1", 1980, cities=[("a",), ("b",), ("c",)])
        g = build_co_network([record], "inventors")
        assert g.n_nodes == 3
        assert set(g.edges.values()) == {1}
        assert g.n_edges == 3

    def test_two_patents_additive(self):
        records = [make_record(f"US{i}", 1980, cities=[("a",), ("b",)]) for i in range(2)]
        g = build_co_network(records, "inventors")
        assert g.edges[edge_key("a||US", "b||US")] == 2

    def test_against_brute_force_oracle(self):
        cities = [("a",), ("b",), ("c",), ("d",)]
        records = [
            make_record("P1", 1980, cities=[cities[0], cities[1]]),
            make_record("P2", 1980, cities=[cities[0], cities[1], cities[2]]),
            make_record("P3", 1980, cities=[cities[2]]),
            make_record("P4", 1980, cities=[cities[3], cities[0]]),
            make_record("P5", 1980, cities=[cities[1], cities[3]]),
            make_record("P6", 1980, cities=[cities[0], cities[1], cities[2], cities[3]]),
        ]
        g = build_co_network(records, "inventors")
        counts, pairs = brute_force_pairs(records, "inventors")
        assert g.node_counts == counts
        assert g.edges == pairs

    def test_duplicate_city_parties_count_once_per_patent(self):
        record = make_record("US1", 1980, cities=[("a",), ("a",), ("b",)])
        g = build_co_network([record], "inventors")
        assert g.node_counts["a||US"] == 1
        assert g.edges[edge_key("a||US", "b||US")] == 1

    def test_one_city_patent_adds_node_but_no_edge(self):
        g = build_co_network([make_record("US1", 1980, cities=[("a",), ("a",)])],
                             "inventors")
        assert g.n_nodes == 1 and g.n_edges == 0

    def test_unlocatable_parties_skipped(self):
        record = make_record("US1", 1980, cities=[("a",), ("", "", "")])
        g = build_co_network([record], "inventors")
        assert g.nodes == ["a||US"]

    def test_empty_corpus_empty_graph(self):
        g = build_co_network([], "inventors")
        assert g.n_nodes == 0 and g.n_edges == 0

    def test_disjoint_union_additivity(self):
        rng = random.Random(5)
        pool = [("a",), ("b",), ("c",), ("d",), ("e",)]
        part_a = [make_record(f"A{i}", 1980, cities=rng.sample(pool, rng.randint(1, 3)))
                  for i in range(10)]
        part_b = [make_record(f"B{i}", 1980, cities=rng.sample(pool, rng.randint(1, 3)))
                  for i in range(10)]
        combined = build_co_network(part_a + part_b, "inventors")
        ga = build_co_network(part_a, "inventors")
        gb = build_co_network(part_b, "inventors")
        for e in combined.edges:
            assert combined.edges[e] == ga.edges.get(e, 0) + gb.edges.get(e, 0)
        for u in combined.node_counts:
            assert combined.node_counts[u] == (
                ga.node_counts.get(u, 0) + gb.node_counts.get(u, 0))


class TestDensity:
    def test_complete_graph(self):
        assert density(clique("abcd")) == 1.0

    def test_no_edges(self):
        g = CityGraph(node_counts={c: 1 for c in "abcd"})
        assert density(g) == 0.0

    def test_five_nodes_four_edges(self):
        g = CityGraph(node_counts={c: 1 for c in "abcde"})
        for e in (("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")):
            g.edges[e] = 1
        assert density(g) == pytest.approx(0.4)

    def test_tiny_graphs_zero(self):
        assert density(CityGraph()) == 0.0
        assert density(CityGraph(node_counts={"a": 1})) == 0.0


class TestComponents:
    def test_two_triangles(self):
        g = clique("abc")
        other = clique("xyz")
        g.node_counts.update(other.node_counts)
        g.edges.update(other.edges)
        comps = components(g)
        assert [len(c) for c in comps] == [3, 3]
        assert comps[0] == ["a", "b", "c"]

    def test_empty_graph(self):
        assert components(CityGraph()) == []

    def test_sixteen_node_component_is_largest(self):
        g = CityGraph(node_counts={f"n{i:02d}": 1 for i in range(16)})
        for i in range(15):  # a 16-node path
            g.edges[edge_key(f"n{i:02d}", f"n{i + 1:02d}")] = 1
        for i in range(8):   # 8 scattered isolates
            g.node_counts[f"iso{i}"] = 1
        comps = components(g)
        assert g.n_nodes == 24
        assert len(comps[0]) == 16
        assert [len(c) for c in comps[1:]] == [1] * 8

    def test_partition_property(self):
        rng = random.Random(11)
        for _ in range(25):
            g = random_city_graph(rng)
            comps = components(g)
            flat = [u for comp in comps for u in comp]
            assert sorted(flat) == g.nodes
            assert [len(c) for c in comps] == sorted(
                (len(c) for c in comps), reverse=True)


class TestModularity:
    def test_single_community_zero(self):
        g = clique("abcde")
        assert modularity(g, {u: 0 for u in g.nodes}) == pytest.approx(0.0)

    def test_two_disjoint_cliques_half(self):
        g = clique("abcd")
        other = clique("wxyz")
        g.node_counts.update(other.node_counts)
        g.edges.update(other.edges)
        assignment = {u: 0 for u in "abcd"} | {u: 1 for u in "wxyz"}
        assert modularity(g, assignment) == pytest.approx(0.5)

    def test_swapped_partition_strictly_lower(self):
        g = clique("abcd")
        other = clique("wxyz")
        g.node_counts.update(other.node_counts)
        g.edges.update(other.edges)
        swapped = {u: 0 for u in "wbcd"} | {u: 1 for u in "axyz"}
        q = modularity(g, swapped)
        assert q == pytest.approx(0.0, abs=1e-12)  # hand-derived for this swap
        assert q < 0.5

    def test_uncovered_node_fatal(self):
        g = clique("abc")
        with pytest.raises(ValueError, match="cover"):
            modularity(g, {"a": 0, "b": 0})

    def test_range_property(self):
        rng = random.Random(3)
        for _ in range(25):
            g = random_city_graph(rng)
            assignment = {u: rng.randint(0, 3) for u in g.nodes}
            assert -0.5 <= modularity(g, assignment) <= 1.0


def bridged_cliques(k=5):
    left = [f"l{i}" for i in range(k)]
    right = [f"r{i}" for i in range(k)]
    g = CityGraph(node_counts={u: 1 for u in left + right})
    for a, b in itertools.combinations(left, 2):
        g.edges[edge_key(a, b)] = 1
    for a, b in itertools.combinations(right, 2):
        g.edges[edge_key(a, b)] = 1
    g.edges[edge_key(left[0], right[0])] = 1
    return g, set(left), set(right)


class TestLouvain:
    def test_bridged_five_cliques_match_exhaustive_optimum(self):
        g, left, right = bridged_cliques(5)
        # oracle: scan every partition of the 10 nodes for the modularity optimum
        best_q, best_groups = -1.0, None
        for assignment in set_partitions(g.nodes):
            q = modularity(g, assignment)
            if q > best_q:
                best_q = q
                groups = {}
                for node, comm in assignment.items():
                    groups.setdefault(comm, set()).add(node)
                best_groups = sorted(map(sorted, groups.values()))
        assert best_groups == sorted(map(sorted, (left, right)))
        assert best_q == pytest.approx(19 / 42)

        part = louvain(g, seed=1)
        found = sorted(map(sorted, (set(c) for c in part.communities())))
        assert found == best_groups
        assert part.modularity == pytest.approx(best_q)

    def test_single_edge_one_community(self):
        g = CityGraph(node_counts={"a": 1, "b": 1}, edges={("a", "b"): 1})
        part = louvain(g, seed=0)
        assert part.n_communities == 1
        assert part.modularity == pytest.approx(0.0)

    def test_empty_graph(self):
        part = louvain(CityGraph(), seed=0)
        assert part.assignment == {} and part.modularity == 0.0

    def test_isolates_are_singleton_communities(self):
        g, _, _ = bridged_cliques(4)
        g.node_counts["lonely"] = 1
        part = louvain(g, seed=0)
        assert part.assignment["lonely"] not in {
            part.assignment[u] for u in g.nodes if u != "lonely"}

    def test_pass_modularity_never_decreases(self):
        rng = random.Random(17)
        for _ in range(20):
            g = random_city_graph(rng)
            part = louvain(g, seed=rng.randint(0, 99))
            trace = part.pass_modularity
            assert all(b >= a - 1e-9 for a, b in zip(trace, trace[1:]))

    def test_deterministic_per_seed(self):
        rng = random.Random(23)
        g = random_city_graph(rng)
        assert louvain(g, seed=9) == louvain(g, seed=9)

    def test_community_ids_dense_from_zero(self):
        g, _, _ = bridged_cliques(3)
        part = louvain(g, seed=2)
        ids = set(part.assignment.values())
        assert ids == set(range(len(ids)))


class TestKamadaKawai:
    def test_two_nodes_at_ideal_length(self):
        g = CityGraph(node_counts={"a": 1, "b": 1}, edges={("a", "b"): 1})
        layout = kamada_kawai(g, seed=0)
        (xa, ya), (xb, yb) = layout.coords["a"], layout.coords["b"]
        assert math.hypot(xa - xb, ya - yb) == pytest.approx(1.0, abs=1e-6)

    def test_triangle_equilateral(self):
        layout = kamada_kawai(clique("abc"), seed=1)
        pts = [layout.coords[c] for c in "abc"]
        d01 = math.dist(pts[0], pts[1])
        d02 = math.dist(pts[0], pts[2])
        d12 = math.dist(pts[1], pts[2])
        assert d01 == pytest.approx(d02, abs=1e-4)
        assert d01 == pytest.approx(d12, abs=1e-4)

    def test_same_seed_identical_coordinates(self):
        g, _, _ = bridged_cliques(4)
        assert kamada_kawai(g, seed=7) == kamada_kawai(g, seed=7)

    def test_stress_never_increases(self):
        rng = random.Random(31)
        done = 0
        while done < 10:
            g = random_city_graph(rng, max_nodes=15)
            comps = components(g)
            if not comps or len(comps[0]) < 3:
                continue
            sub = g.subgraph(comps[0])
            layout = kamada_kawai(sub, seed=done)
            trace = layout.stress_trace
            assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))
            assert trace[-1] <= trace[0]
            done += 1

    def test_disconnected_fatal(self):
        g = CityGraph(node_counts={"a": 1, "b": 1})
        with pytest.raises(ValueError, match="disconnected"):
            kamada_kawai(g, seed=0)

    def test_single_node(self):
        layout = kamada_kawai(CityGraph(node_counts={"a": 1}), seed=0)
        assert layout.coords == {"a": (0.0, 0.0)}

    def test_distances_respect_edge_lengths(self):
        g = CityGraph(node_counts={u: 1 for u in "abc"},
                      edges={("a", "b"): 1, ("b", "c"): 1})
        nodes, dist = graph_distances(g, {("a", "b"): 0.5, ("b", "c"): 0.25})
        index = {u: i for i, u in enumerate(nodes)}
        assert dist[index["a"], index["c"]] == pytest.approx(0.75)

    def test_stress_of_perfect_layout_is_zero(self):
        g = CityGraph(node_counts={"a": 1, "b": 1}, edges={("a", "b"): 1})
        _, dist = graph_distances(g)
        import numpy as np

        coords = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert layout_stress(coords, dist) == pytest.approx(0.0, abs=1e-15)


class TestPajek:
    def test_one_node_file(self, tmp_path):
        g = CityGraph(window="w", node_counts={"solo|US": 1})
        path = tmp_path / "one.net"
        write_pajek(g, path)
        assert path.read_text().splitlines() == ['*Vertices 1', '1 "solo|US"', '*Edges']

    def test_triangle_weight_two(self, tmp_path):
        g = clique("abc")
        for e in g.edges:
            g.edges[e] = 2
        path = tmp_path / "tri.net"
        write_pajek(g, path)
        lines = path.read_text().splitlines()
        assert lines[5:] == ["1 2 2", "1 3 2", "2 3 2"]

    def test_round_trip_50_nodes(self, tmp_path):
        rng = random.Random(41)
        g = CityGraph(window="w",
                      node_counts={f"city {i}|US": 1 for i in range(50)})
        names = sorted(g.node_counts)
        for a, b in itertools.combinations(names, 2):
            if rng.random() < 0.1:
                g.edges[edge_key(a, b)] = rng.randint(1, 9)
        path = tmp_path / "big.net"
        write_pajek(g, path)
        assert read_pajek(path, window="w") == g

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2 ** 31))
    def test_round_trip_property(self, tmp_path_factory, seed):
        rng = random.Random(seed)
        g = random_city_graph(rng)
        path = tmp_path_factory.mktemp("pajek") / "g.net"
        write_pajek(g, path)
        assert read_pajek(path, window=g.window) == g

    def test_malformed_file_reports_line(self, tmp_path):
        path = tmp_path / "bad.net"
        path.write_text('*Vertices 2\n1 "a"\nnot a vertex\n*Edges\n')
        with pytest.raises(PajekError, match=":3"):
            read_pajek(path)

    def test_missing_header_fatal(self, tmp_path):
        path = tmp_path / "bad.net"
        path.write_text("1 2 3\n")
        with pytest.raises(PajekError, match=":1"):
            read_pajek(path)
