"""City excellence coloring: z-tested citation shares and percentile classes.

Run from the repository root:  python3 demos/03_excellence_maps.py
"""

from pathlib import Path

from patmaps import (
    WindowSpec,
    build_co_network,
    parse_records,
    percentile_classes,
    top_cited_threshold,
    window_slices,
)
from patmaps.citystats import node_scale, write_overlay, ztest_city_stats
from patmaps.geocode import GeoCache, geocode_batch, load_gazetteer

DATA = Path(__file__).parent / "data"

corpus = parse_records(DATA / "records_uspto.tsv", "uspto").normalized()
citations = [r.forward_citations for r in corpus.records]
threshold = top_cited_threshold(citations, 0.25)
print(f"top-25% citation threshold over {len(citations)} patents: {threshold}")

window = window_slices(corpus.records, WindowSpec(1981, 1985, length=5))[0]
graph = build_co_network(window.records, "inventors", window.label)
top_counts = {}
for r in window.records:
    if r.forward_citations >= threshold:
        for key in {p.key for p in r.inventors if p.locatable}:
            top_counts[key] = top_counts.get(key, 0) + 1

stats = ztest_city_stats(graph.node_counts, top_counts)
print(f"\nwindow {window.label} under the z-test scheme:")
for s in stats:
    print(f"  {s.city:24} n={s.n} k={s.k} z={s.z:+.2f} -> {s.color}"
          f"  (node scale {node_scale(s.n):.3f})")

print("\nsame cities under the percentile scheme:")
for city, cls in sorted(percentile_classes(graph.node_counts).items()):
    print(f"  {city:24} -> {cls}")

# resolve coordinates offline and emit the overlay file
cache = GeoCache()
points, unresolved = geocode_batch(graph.node_counts, cache,
                                   gazetteer=load_gazetteer())
coords = {k: (pt.lat, pt.lon) for k, pt in points.items()}
out = Path("demo_out")
out.mkdir(exist_ok=True)
links = sorted((a, b, w) for (a, b), w in graph.edges.items())
skipped = write_overlay(out / f"z{window.first_year}.txt", stats, coords, links)
print(f"\nwrote {out / f'z{window.first_year}.txt'}"
      f" ({len(stats) - len(skipped)} cities, {len(unresolved)} unresolved)")
