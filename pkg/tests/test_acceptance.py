"""Acceptance suite: the exit criteria of the toolkit, one test each.

Every test prints a single PASS line when its criterion holds; a failing
criterion fails the test outright. Run with ``pytest tests/test_acceptance.py
-v -s`` to see the lines.
"""

import itertools
import math
import random
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from patmaps.citystats import (
    classify_ztest,
    percentile_classes,
    top_cited_threshold,
    ztest_proportion,
    PERCENTILE_CLASSES,
    ZTEST_CLASSES,
)
from patmaps.diversity import (
    CitationMatrix,
    DisparityMatrix,
    disparity_from_citations,
    profile_disparity,
    rao_stirling,
    spearman,
)
from patmaps.network import (
    CityGraph,
    components,
    density,
    edge_key,
    kamada_kawai,
    louvain,
    read_pajek,
    write_pajek,
)
from patmaps.pipeline import parse_bundle
from patmaps.records import WindowSpec, window_slices

from conftest import REPO_ROOT, make_record, random_city_graph, synthetic_corpus_text


def report(name: str) -> None:
    print(f"ACCEPTANCE {name}: PASS")


def test_rao_stirling_oracle():
    """1,000 random instances agree with a brute-force double loop at 1e-12."""
    started = time.perf_counter()
    rng = random.Random(2024)
    for _ in range(1000):
        k = rng.randint(1, 12)
        classes = tuple(f"C{i:02d}" for i in range(k))
        raw = [rng.random() for _ in range(k)]
        p = {c: v / sum(raw) for c, v in zip(classes, raw)}
        d = np.zeros((k, k))
        for i in range(k):
            for j in range(i + 1, k):
                d[i, j] = d[j, i] = rng.random()
        dm = DisparityMatrix(classes, d)
        index = {c: i for i, c in enumerate(classes)}
        brute = sum(pi * pj * d[index[ci], index[cj]]
                    for ci, pi in p.items() for cj, pj in p.items())
        assert abs(rao_stirling(p, dm) - brute) <= 1e-12

    single = DisparityMatrix(("A",), np.zeros((1, 1)))
    assert abs(rao_stirling({"A": 1.0}, single) - 0.0) <= 1e-12
    for k in (2, 3, 6, 12):
        classes = tuple(f"C{i}" for i in range(k))
        dm = DisparityMatrix(classes, np.ones((k, k)) - np.eye(k))
        delta = rao_stirling({c: 1.0 / k for c in classes}, dm)
        assert abs(delta - (1.0 - 1.0 / k)) <= 1e-12

    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"rao oracle took {elapsed:.1f}s"
    report("rao-stirling oracle")


def test_disparity_kernel():
    """Random citation matrices give symmetric zero-diagonal [0,1] distances."""
    rng = np.random.default_rng(7)
    for _ in range(50):
        k = int(rng.integers(2, 12))
        counts = rng.integers(0, 40, size=(k, k)).astype(float)
        dm = disparity_from_citations(
            CitationMatrix(tuple(f"C{i}" for i in range(k)), counts))
        assert np.allclose(dm.d, dm.d.T)
        assert np.allclose(np.diag(dm.d), 0.0)
        assert dm.d.min() >= 0.0 and dm.d.max() <= 1.0
    hand = profile_disparity((1.0, 1.0), (1.0, 0.0))
    assert abs(hand - (1.0 - 1.0 / math.sqrt(2.0))) <= 1e-9
    report("disparity kernel")


def test_ztest_and_coloring():
    """Reference z-values, gate behavior, and six-class totality."""
    z = ztest_proportion(20, 10)
    assert abs(z - 2.582) <= 1e-3
    assert classify_ztest(20, 10, z) == "dark-green"  # n >= 20 passes the gate
    assert classify_ztest(4, 4, ztest_proportion(4, 4)) == "lime-green"
    for n in range(1, 201):
        for k in range(n + 1):
            assert classify_ztest(n, k, ztest_proportion(n, k)) in ZTEST_CLASSES
    report("z-test and coloring")


def test_percentile_scheme():
    """Exact bracket sizes on 100 distinct counts; ties collapse to one class."""
    counts = {f"c{i:03d}": 10_000 - i for i in range(100)}
    classes = percentile_classes(counts)
    sizes = {name: sum(1 for v in classes.values() if v == name)
             for name in PERCENTILE_CLASSES}
    assert sizes == {"red": 1, "fuchsia": 4, "pink": 5,
                     "orange": 15, "cyan": 25, "blue": 50}
    tied = percentile_classes({f"c{i}": 3 for i in range(57)})
    assert set(tied.values()) == {"red"}
    report("percentile scheme")


def test_network_suite():
    """Density, components, community recovery, Pajek, and layout together."""
    started = time.perf_counter()

    for n in (2, 4, 7):
        g = CityGraph(node_counts={f"v{i}": 1 for i in range(n)})
        for a, b in itertools.combinations(sorted(g.node_counts), 2):
            g.edges[(a, b)] = 1
        assert density(g) == 1.0

    rng = random.Random(55)
    for _ in range(30):
        g = random_city_graph(rng)
        comps = components(g)
        assert sorted(u for c in comps for u in c) == g.nodes

    left = [f"l{i}" for i in range(5)]
    right = [f"r{i}" for i in range(5)]
    g = CityGraph(node_counts={u: 1 for u in left + right})
    for side in (left, right):
        for a, b in itertools.combinations(side, 2):
            g.edges[edge_key(a, b)] = 1
    g.edges[edge_key(left[0], right[0])] = 1
    part = louvain(g, seed=3)
    groups = sorted(map(sorted, (set(c) for c in part.communities())))
    assert groups == sorted(map(sorted, (set(left), set(right))))
    trace = part.pass_modularity
    assert all(b >= a - 1e-9 for a, b in zip(trace, trace[1:]))

    for i in range(200):
        g = random_city_graph(rng)
        path = Path("/tmp") / f"patmaps_accept_{i}.net"
        write_pajek(g, path)
        assert read_pajek(path, window=g.window) == g
        path.unlink()

    for seed in range(5):
        g = random_city_graph(rng, max_nodes=12)
        comp = components(g)
        if not comp:
            continue
        sub = g.subgraph(comp[0])
        layout_a = kamada_kawai(sub, seed=seed)
        layout_b = kamada_kawai(sub, seed=seed)
        assert layout_a == layout_b
        stress = layout_a.stress_trace
        assert all(b <= a + 1e-12 for a, b in zip(stress, stress[1:]))
        assert stress[-1] <= stress[0]

    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"network suite took {elapsed:.1f}s"
    report("network suite")


def test_window_labels():
    """The reference five-year labels and interior-year membership count."""
    slices = window_slices([], WindowSpec(1974, 1982, length=5, step=1))
    assert [s.label for s in slices] == [
        "1974-1978", "1975-1979", "1976-1980", "1977-1981", "1978-1982"]
    record = make_record("P", 1976)
    slices = window_slices([record], WindowSpec(1970, 1984, length=5, step=1))
    assert sum(record in s.records for s in slices) == 5
    report("window labels")


COMPARED_ARTIFACTS = ("z", "pat", "paj", "ipc", "geo.csv", "rao.csv",
                      "network.csv", "bundle.json", "basemap", "manifest.json")


def _comparable(name: str) -> bool:
    return name.startswith(COMPARED_ARTIFACTS)


def test_end_to_end_determinism(tmp_path):
    """Two CLI runs with fixed seeds are byte-identical; 5k records < 60 s."""
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / f"run_{run}"
        proc = subprocess.run(
            [sys.executable, "-m", "patmaps.cli", "analyze",
             "--config", "demos/data/demo_uspto.cfg", "--out", str(out)],
            cwd=REPO_ROOT, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())
                        if _comparable(p.name)})
    assert outputs[0].keys() == outputs[1].keys()
    for name, blob in outputs[0].items():
        assert blob == outputs[1][name], f"{name} differs between runs"

    big = tmp_path / "big_records.tsv"
    big.write_text(synthetic_corpus_text(5000), encoding="utf-8")
    started = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "patmaps.cli", "analyze",
         "--records", str(big), "--schema", "uspto",
         "--citation-pairs", "demos/data/citation_pairs.tsv",
         "--scheme", "ztest", "--seed", "1",
         "--out", str(tmp_path / "big_out")],
        cwd=REPO_ROOT, capture_output=True, text=True)
    elapsed = time.perf_counter() - started
    assert proc.returncode == 0, proc.stderr
    assert elapsed < 60.0, f"5,000-record run took {elapsed:.1f}s"
    assert (tmp_path / "big_out" / "bundle.json").exists()
    report("end-to-end determinism")


def test_file_conventions(tmp_path):
    """Overlay naming, table headers, and bundle round-trip."""
    from patmaps.pipeline import RunConfig, build_bundle, run_pipeline

    for scheme, prefix in (("ztest", "z"), ("percentile", "pat")):
        records = "records_uspto.tsv" if scheme == "ztest" else "records_patstat.tsv"
        schema = "uspto" if scheme == "ztest" else "patstat"
        out = tmp_path / scheme
        cfg = RunConfig(
            records=str(REPO_ROOT / "demos" / "data" / records),
            schema=schema, scheme=scheme, seed=42, out=str(out),
            citation_pairs=str(REPO_ROOT / "demos" / "data" / "citation_pairs.tsv"))
        run_pipeline(cfg)
        overlays = sorted(p.name for p in out.glob(f"{prefix}[0-9]*.txt"))
        assert overlays, f"no {prefix}<YEAR>.txt overlays emitted"
        for name in overlays:
            year = name[len(prefix):-4]
            assert year.isdigit() and len(year) == 4

        geo_header = (out / "geo.csv").read_text().splitlines()[0]
        assert geo_header == "window,city,n,k,expected,z,color,lat,lon"
        rao_header = (out / "rao.csv").read_text().splitlines()[0]
        assert rao_header == "window,delta_ipc3,delta_ipc4,n_patents"

        bundle = parse_bundle(out / "bundle.json")
        assert parse_bundle(build_bundle(out)) == bundle
    report("file conventions")


def test_spearman_criteria():
    """Identity, reversal, the 4-point case, and monotone invariance."""
    a = [0.2, 0.5, 0.1, 0.9, 0.7]
    assert abs(spearman(a, a) - 1.0) <= 1e-12
    ranked = sorted(a)
    assert abs(spearman(ranked, ranked[::-1]) + 1.0) <= 1e-12
    assert abs(spearman([1, 2, 3, 4], [1, 3, 2, 4]) - 0.8) <= 1e-12

    rng = random.Random(31)
    for _ in range(50):
        n = rng.randint(3, 25)
        x = [rng.random() for _ in range(n)]
        y = [rng.random() for _ in range(n)]
        base = spearman(x, y)
        grown = [math.exp(3.0 * v) for v in x]
        shifted = [10.0 * v + 2.0 for v in y]
        assert abs(spearman(grown, shifted) - base) <= 1e-12
    report("spearman")


def test_top_cited_threshold_supporting_case():
    """The enumerated threshold cases backing the z-test scheme."""
    assert top_cited_threshold(list(range(100)), 0.25) == 75
    assert top_cited_threshold([3, 3, 3], 0.25) == 3
    assert top_cited_threshold([0, 0, 0, 10], 0.25) == 10
    report("top-cited threshold")
