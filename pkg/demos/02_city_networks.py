"""Build a co-inventor city network for one window and analyze it.

Run from the repository root:  python3 demos/02_city_networks.py
"""

from pathlib import Path

from patmaps import (
    WindowSpec,
    build_co_network,
    components,
    density,
    kamada_kawai,
    louvain,
    parse_records,
    window_slices,
    write_pajek,
)

DATA = Path(__file__).parent / "data"

corpus = parse_records(DATA / "records_uspto.tsv", "uspto").normalized()
window = window_slices(corpus.records, WindowSpec(1981, 1985, length=5))[0]
graph = build_co_network(window.records, "inventors", window.label)

print(f"window {window.label}: {graph.n_nodes} cities, {graph.n_edges} links")
print(f"density = {density(graph):.4f}")

comps = components(graph)
isolates = sum(1 for c in comps if len(c) == 1)
print(f"{len(comps)} components ({isolates} isolates); largest: {comps[0]}")

part = louvain(graph, seed=42)
print(f"{part.n_communities} communities, modularity {part.modularity:.4f}")
for i, community in enumerate(part.communities()):
    print(f"  community {i}: {', '.join(community)}")

# lay out the largest component for plotting
layout = kamada_kawai(graph.subgraph(comps[0]), seed=42)
print("\nlargest-component layout:")
for city, (x, y) in sorted(layout.coords.items()):
    print(f"  {city:24} ({x:7.3f}, {y:7.3f})")

out = Path("demo_out")
out.mkdir(exist_ok=True)
write_pajek(graph, out / f"paj{window.first_year}.net")
print(f"\nwrote {out / f'paj{window.first_year}.net'}")
