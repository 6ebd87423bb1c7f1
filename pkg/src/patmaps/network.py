"""City co-occurrence networks and the graph machinery that analyzes them.

Graphs are weighted and undirected: nodes are city keys with a per-node
patent count, an edge weight counts the patents on which both cities appear
together. Community detection uses weighted-modularity local moving with
aggregation passes; layouts minimize distance-weighted stress over
graph-theoretic distances by iterated majorization, which never increases
the stress.
"""

from __future__ import annotations

import heapq
import random
import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import PajekError
from .records import PatentRecord

Edge = tuple[str, str]


def edge_key(a: str, b: str) -> Edge:
    """Canonical undirected edge key; self-loops are rejected."""
    if a == b:
        raise ValueError(f"self-loop on {a!r}")
    return (a, b) if a < b else (b, a)


@dataclass
class CityGraph:
    """Weighted undirected co-occurrence network for one window."""

    window: str = ""
    node_counts: dict[str, int] = field(default_factory=dict)
    edges: dict[Edge, int] = field(default_factory=dict)

    @property
    def nodes(self) -> list[str]:
        return sorted(self.node_counts)

    @property
    def n_nodes(self) -> int:
        return len(self.node_counts)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> dict[str, dict[str, float]]:
        adj: dict[str, dict[str, float]] = {u: {} for u in self.node_counts}
        for (a, b), w in self.edges.items():
            adj[a][b] = w
            adj[b][a] = w
        return adj

    def degree_weights(self) -> dict[str, float]:
        deg = {u: 0.0 for u in self.node_counts}
        for (a, b), w in self.edges.items():
            deg[a] += w
            deg[b] += w
        return deg

    def subgraph(self, members: Iterable[str]) -> "CityGraph":
        keep = set(members)
        return CityGraph(
            window=self.window,
            node_counts={u: c for u, c in self.node_counts.items() if u in keep},
            edges={e: w for e, w in self.edges.items() if e[0] in keep and e[1] in keep},
        )


def build_co_network(records: Iterable[PatentRecord], dimension: str,
                     window: str = "") -> CityGraph:
    """Build the city co-occurrence network of a (sub-)corpus.

    Each patent contributes 1 to every unordered pair of distinct city keys
    among its located parties, regardless of how many individual parties span
    the pair, and 1 to each distinct city's node count. Unlocatable parties
    are skipped; an empty corpus yields an empty graph.
    """
    g = CityGraph(window=window)
    for record in records:
        keys = sorted({p.key for p in record.parties(dimension) if p.locatable})
        for k in keys:
            g.node_counts[k] = g.node_counts.get(k, 0) + 1
        for i in range(len(keys)):
            for j in range(i + 1, len(keys)):
                e = edge_key(keys[i], keys[j])
                g.edges[e] = g.edges.get(e, 0) + 1
    return g


def density(g: CityGraph) -> float:
    """Unweighted density 2m / (n(n-1)); 0 for graphs with fewer than 2 nodes."""
    n = g.n_nodes
    if n <= 1:
        return 0.0
    return 2.0 * g.n_edges / (n * (n - 1))


def components(g: CityGraph) -> list[list[str]]:
    """Connected components, largest first.

    Members are sorted; components order by size descending, then by their
    lexicographically smallest member. Isolates appear as size-1 components.
    """
    adj = g.adjacency()
    seen: set[str] = set()
    comps: list[list[str]] = []
    for start in g.nodes:
        if start in seen:
            continue
        queue = deque([start])
        seen.add(start)
        comp = []
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


@dataclass(frozen=True)
class Partition:
    """Node -> community assignment with its modularity score."""

    assignment: dict[str, int]
    modularity: float
    pass_modularity: tuple[float, ...] = ()

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment.values()))

    def communities(self) -> list[list[str]]:
        groups: dict[int, list[str]] = defaultdict(list)
        for node in sorted(self.assignment):
            groups[self.assignment[node]].append(node)
        return [groups[c] for c in sorted(groups)]


def modularity(g: CityGraph, assignment: Mapping[str, int]) -> float:
    """Weighted modularity Q of a node partition.

    Q = sum over communities of [w_in/m2 - (w_tot/m2)^2] with m2 twice the
    total edge weight. Zero-edge graphs score 0. A node missing from the
    assignment is a caller error.
    """
    for node in g.node_counts:
        if node not in assignment:
            raise ValueError(f"partition does not cover node {node!r}")
    m2 = 2.0 * sum(g.edges.values())
    if m2 == 0:
        return 0.0
    w_in: dict[int, float] = defaultdict(float)
    w_tot: dict[int, float] = defaultdict(float)
    for (a, b), w in g.edges.items():
        if assignment[a] == assignment[b]:
            w_in[assignment[a]] += 2.0 * w
        w_tot[assignment[a]] += w
        w_tot[assignment[b]] += w
    communities = set(assignment[u] for u in g.node_counts)
    return sum(w_in[c] / m2 - (w_tot[c] / m2) ** 2 for c in communities)


def _local_move(adj: list[dict[int, float]], loops: list[float],
                order: Sequence[int], m2: float) -> list[int]:
    """One level of local moving; returns the community of each node.

    Nodes are visited in the given order, repeatedly, until a full sweep
    moves nothing. Gains are compared on the modularity scale up to the
    constant factor 1/m2; ties break toward the smallest community id.
    """
    n = len(adj)
    comm = list(range(n))
    degree = [sum(adj[i].values()) + 2.0 * loops[i] for i in range(n)]
    c_tot = degree[:]
    moved = True
    while moved:
        moved = False
        for u in order:
            cu = comm[u]
            link: dict[int, float] = defaultdict(float)
            for v, w in adj[u].items():
                link[comm[v]] += w
            c_tot[cu] -= degree[u]
            best_c, best_gain = cu, link.get(cu, 0.0) - c_tot[cu] * degree[u] / m2
            for c in sorted(link):
                gain = link[c] - c_tot[c] * degree[u] / m2
                if gain > best_gain + 1e-12 or (
                    abs(gain - best_gain) <= 1e-12 and c < best_c
                ):
                    best_c, best_gain = c, gain
            c_tot[best_c] += degree[u]
            if best_c != cu:
                comm[u] = best_c
                moved = True
    return comm


def louvain(g: CityGraph, seed: int = 0) -> Partition:
    """Community detection by local moving plus graph aggregation.

    The node visiting order is a seed-derived shuffle, which makes the
    otherwise order-dependent algorithm deterministic for a given seed.
    Modularity is re-evaluated on the original graph after every
    aggregation pass and never decreases across passes.
    """
    nodes = g.nodes
    if not nodes:
        return Partition({}, 0.0, ())
    m2 = 2.0 * sum(g.edges.values())
    if m2 == 0:
        assignment = {u: i for i, u in enumerate(nodes)}
        return Partition(assignment, 0.0, (0.0,))

    rng = random.Random(seed)
    index = {u: i for i, u in enumerate(nodes)}
    adj: list[dict[int, float]] = [dict() for _ in nodes]
    for (a, b), w in g.edges.items():
        adj[index[a]][index[b]] = float(w)
        adj[index[b]][index[a]] = float(w)
    loops = [0.0] * len(nodes)

    # membership[i] = supernode of original node i in the current level graph
    membership = list(range(len(nodes)))
    passes: list[float] = []
    best = {u: index[u] for u in nodes}
    prev_q = modularity(g, best) - 1.0

    while True:
        order = list(range(len(adj)))
        rng.shuffle(order)
        comm = _local_move(adj, loops, order, m2)

        # densify community labels in first-seen order over supernode ids
        relabel: dict[int, int] = {}
        for c in comm:
            if c not in relabel:
                relabel[c] = len(relabel)
        comm = [relabel[c] for c in comm]

        membership = [comm[s] for s in membership]
        assignment = {u: membership[index[u]] for u in nodes}
        q = modularity(g, assignment)
        if passes:
            assert q >= passes[-1] - 1e-9, "modularity decreased across passes"
        passes.append(q)
        if q <= prev_q + 1e-9:
            break
        prev_q = q
        best = assignment
        n_comms = len(relabel)
        if n_comms == len(adj):
            break

        # aggregate: communities become the next level's nodes
        new_adj: list[dict[int, float]] = [dict() for _ in range(n_comms)]
        new_loops = [0.0] * n_comms
        for i in range(len(adj)):
            ci = comm[i]
            new_loops[ci] += loops[i]
            for j, w in adj[i].items():
                cj = comm[j]
                if ci == cj:
                    if i < j:
                        new_loops[ci] += w
                else:
                    new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
        adj, loops = new_adj, new_loops

    # final dense relabel over sorted node order for stable ids
    relabel = {}
    for u in nodes:
        c = best[u]
        if c not in relabel:
            relabel[c] = len(relabel)
    final = {u: relabel[best[u]] for u in nodes}
    return Partition(final, modularity(g, final), tuple(passes))


@dataclass(frozen=True)
class Layout:
    """2-D node coordinates plus the seed and stress trace that produced them."""

    coords: dict[str, tuple[float, float]]
    seed: int
    stress_trace: tuple[float, ...] = ()


def graph_distances(g: CityGraph,
                    edge_length: Mapping[Edge, float] | None = None) -> tuple[list[str], np.ndarray]:
    """All-pairs graph distances; unit hop lengths unless lengths are given."""
    nodes = g.nodes
    index = {u: i for i, u in enumerate(nodes)}
    n = len(nodes)
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    adj: list[list[tuple[int, float]]] = [[] for _ in nodes]
    for (a, b), w in g.edges.items():
        length = 1.0 if edge_length is None else float(edge_length[(a, b)])
        adj[index[a]].append((index[b], length))
        adj[index[b]].append((index[a], length))
    for s in range(n):
        # Dijkstra; with unit lengths this degenerates to BFS cost
        pq = [(0.0, s)]
        done = [False] * n
        while pq:
            d, u = heapq.heappop(pq)
            if done[u]:
                continue
            done[u] = True
            dist[s, u] = d
            for v, length in adj[u]:
                if not done[v] and d + length < dist[s, v]:
                    dist[s, v] = d + length
                    heapq.heappush(pq, (d + length, v))
    return nodes, dist


def layout_stress(coords: np.ndarray, dist: np.ndarray) -> float:
    """Weighted stress sum_{i<j} (1/d_ij^2) (||x_i-x_j|| - d_ij)^2."""
    diff = coords[:, None, :] - coords[None, :, :]
    eu = np.sqrt((diff ** 2).sum(axis=2))
    iu = np.triu_indices(len(coords), k=1)
    w = 1.0 / dist[iu] ** 2
    return float((w * (eu[iu] - dist[iu]) ** 2).sum())


def kamada_kawai(g: CityGraph, seed: int = 0, max_iter: int = 500,
                 tol: float = 1e-6,
                 edge_length: Mapping[Edge, float] | None = None) -> Layout:
    """Stress-minimizing layout over graph-theoretic distances.

    The input must be connected (lay out per component). Iterated
    majorization from a seed-derived start runs until the relative stress
    drop falls below ``tol`` or ``max_iter`` is hit; each step is
    non-increasing in stress, and the result is reproducible per seed.
    """
    if g.n_nodes == 0:
        raise ValueError("cannot lay out an empty graph")
    if g.n_nodes == 1:
        return Layout({g.nodes[0]: (0.0, 0.0)}, seed, (0.0,))
    if len(components(g)) > 1:
        raise ValueError("disconnected graph: lay out each component separately")

    nodes, dist = graph_distances(g, edge_length)
    n = len(nodes)
    rng = np.random.default_rng(seed)
    coords = rng.random((n, 2)) * float(dist.max())

    weights = np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    weights[off] = 1.0 / dist[off] ** 2
    laplacian = np.diag(weights.sum(axis=1)) - weights
    pinv = np.linalg.pinv(laplacian)

    trace = [layout_stress(coords, dist)]
    for _ in range(max_iter):
        diff = coords[:, None, :] - coords[None, :, :]
        eu = np.sqrt((diff ** 2).sum(axis=2))
        ratio = np.zeros((n, n))
        mask = off & (eu > 1e-12)
        ratio[mask] = dist[mask] / eu[mask]
        b = -weights * ratio
        np.fill_diagonal(b, 0.0)
        np.fill_diagonal(b, -b.sum(axis=1))
        coords = pinv @ (b @ coords)
        trace.append(layout_stress(coords, dist))
        if trace[-2] - trace[-1] <= tol * max(trace[-2], 1e-30):
            break

    assert trace[-1] <= trace[0] + 1e-12, "stress increased during layout"
    placed = {u: (float(coords[i, 0]), float(coords[i, 1])) for i, u in enumerate(nodes)}
    if not all(np.isfinite(c).all() for c in coords):
        raise ValueError("layout produced non-finite coordinates")
    return Layout(placed, seed, tuple(trace))


_VERTEX_RE = re.compile(r'^\s*(\d+)\s+"((?:[^"])*)"\s*$')


def write_pajek(g: CityGraph, path: str | Path) -> None:
    """Write the graph in Pajek .net format.

    Vertices carry quoted labels only; per-node patent counts have no slot
    in the format and are restored as 1 on read.
    """
    nodes = g.nodes
    index = {u: i + 1 for i, u in enumerate(nodes)}
    lines = [f"*Vertices {len(nodes)}"]
    for u in nodes:
        if '"' in u:
            raise PajekError(f"label contains a quote: {u!r}")
        lines.append(f'{index[u]} "{u}"')
    lines.append("*Edges")
    for (a, b) in sorted(g.edges, key=lambda e: (index[e[0]], index[e[1]])):
        i, j = sorted((index[a], index[b]))
        lines.append(f"{i} {j} {g.edges[(a, b)]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_pajek(path: str | Path, window: str = "") -> CityGraph:
    """Read a Pajek .net file written by :func:`write_pajek`."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].lower().startswith("*vertices"):
        raise PajekError(f"{path}:1: expected '*Vertices n'")
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise PajekError(f"{path}:1: bad vertex count") from exc

    labels: dict[int, str] = {}
    g = CityGraph(window=window)
    line_no = 1
    for line_no in range(2, 2 + n):
        if line_no - 1 >= len(lines):
            raise PajekError(f"{path}:{line_no}: missing vertex line")
        m = _VERTEX_RE.match(lines[line_no - 1])
        if not m:
            raise PajekError(f"{path}:{line_no}: bad vertex line {lines[line_no - 1]!r}")
        labels[int(m.group(1))] = m.group(2)
        g.node_counts[m.group(2)] = 1

    pos = 1 + n
    if pos >= len(lines) or not lines[pos].lower().startswith("*edges"):
        raise PajekError(f"{path}:{pos + 1}: expected '*Edges'")
    for line_no in range(pos + 2, len(lines) + 1):
        line = lines[line_no - 1].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise PajekError(f"{path}:{line_no}: bad edge line {line!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
            w = int(float(parts[2])) if len(parts) == 3 else 1
        except ValueError as exc:
            raise PajekError(f"{path}:{line_no}: bad edge line {line!r}") from exc
        if i not in labels or j not in labels:
            raise PajekError(f"{path}:{line_no}: edge references unknown vertex")
        e = edge_key(labels[i], labels[j])
        g.edges[e] = g.edges.get(e, 0) + w
    return g
