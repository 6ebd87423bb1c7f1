"""Classification diversity over time from aggregated citation relations.

Run from the repository root:  python3 demos/04_diversity_series.py
"""

from pathlib import Path

from patmaps import WindowSpec, parse_records, spearman, window_slices
from patmaps.diversity import (
    base_map_layout,
    disparity_from_citations,
    diversity_series,
    read_citation_pairs,
)

DATA = Path(__file__).parent / "data"

# aggregated class-to-class citations -> (1 - cosine) disparity per level
matrices = {}
for level in (3, 4):
    cm = read_citation_pairs(DATA / "citation_pairs.tsv", level=level)
    matrices[level] = disparity_from_citations(cm)
    print(f"IPC{level}: {len(cm.classes)} classes "
          f"{cm.classes}")

corpus = parse_records(DATA / "records_uspto.tsv", "uspto").normalized()
first, last = corpus.year_span()
slices = window_slices(corpus.records, WindowSpec(first, last, length=5))
points = diversity_series(((s.label, s.records) for s in slices), matrices)

print("\nwindow        delta(IPC3)  delta(IPC4)  patents")
for pt in points:
    print(f"{pt.window}   {pt.delta3:10.4f}  {pt.delta4:10.4f}  {pt.n_patents:7d}")

rho = spearman([pt.delta3 for pt in points], [pt.delta4 for pt in points])
print(f"\nSpearman rank correlation of the two series: {rho:.3f}")

base = base_map_layout(matrices[3], seed=42)
print(f"\nIPC3 base map (threshold {base.threshold:g}):")
for cls, (x, y) in sorted(base.coords.items()):
    print(f"  {cls}  ({x:7.3f}, {y:7.3f})")
