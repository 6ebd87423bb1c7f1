"""The whole pipeline in one call, plus a window comparison report.

Run from the repository root:  python3 demos/05_full_pipeline.py
Equivalent CLI:  patmaps analyze --config demos/data/demo_uspto.cfg
"""

from pathlib import Path

from patmaps import RunConfig, compare_windows, parse_bundle, run_pipeline

DATA = Path(__file__).parent / "data"

cfg = RunConfig.from_file(DATA / "demo_uspto.cfg")
cfg.records = str(DATA / "records_uspto.tsv")
cfg.citation_pairs = str(DATA / "citation_pairs.tsv")
cfg.out = "demo_out/uspto"

report = run_pipeline(cfg)
print(f"run ok={report.ok}; artifacts in {cfg.out}")
for key in sorted(report.counts):
    print(f"  {key} = {report.counts[key]}")

bundle = parse_bundle(Path(cfg.out) / "bundle.json")
print(f"\nbundle: scheme={bundle['scheme']}, windows={bundle['windows']}")
entry = bundle["entries"][-1]
print(f"last window {entry['window']}: {len(entry['cities'])} cities, "
      f"density {entry['network']['density']:.4f}, "
      f"delta(IPC3) {entry['diversity']['ipc3']:.4f}")

text = compare_windows(Path(cfg.out) / "bundle.json",
                       bundle["windows"][0], bundle["windows"][-1])
print("\n" + text)
