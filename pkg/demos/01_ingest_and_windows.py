"""Parse a record file, normalize addresses, and slice filing-year windows.

Run from the repository root:  python3 demos/01_ingest_and_windows.py
"""

from pathlib import Path

from patmaps import WindowSpec, normalize_party, parse_records, truncate_ipc, window_slices
from patmaps.records import Party

DATA = Path(__file__).parent / "data"

corpus = parse_records(DATA / "records_patstat.tsv", "patstat")
print(f"accepted {len(corpus)} records, rejected {len(corpus.rejections)} lines")

# the same city spelled three ways collapses to one key
for city in ("Jülich", "Juelich", "JUELICH"):
    party = normalize_party(Party("demo", city, city, "", "DE"))
    print(f"  {city!r:12} -> {party.key}")

# classification codes truncate to 3- and 4-character classes
for code in ("H01L31/032", "C23C14/34"):
    print(f"  {code:12} -> IPC3 {truncate_ipc(code, 3)}  IPC4 {truncate_ipc(code, 4)}")

# overlapping five-year windows over the corpus span
corpus = corpus.normalized()
first, last = corpus.year_span()
slices = window_slices(corpus.records, WindowSpec(first, last, length=5, step=1))
print(f"\n{len(slices)} windows from {first} to {last}:")
for s in slices:
    print(f"  {s.label}: {len(s.records):3d} records")
