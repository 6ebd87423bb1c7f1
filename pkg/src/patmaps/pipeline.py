"""End-to-end pipeline: config, per-window artifacts, bundle, comparison.

A run reads one record file and emits, per window, an overlay file
(z<YEAR>.txt or pat<YEAR>.txt), a Pajek network file, and class overlay
files, plus corpus-wide tables (geo.csv, rao.csv, network.csv), a run
report, and a single bundle file that drives the interactive viewer. Fixed
inputs and seeds give byte-identical outputs.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping

from . import citystats, diversity, geocode, network, records
from .errors import BundleError, ConfigError, PipelineError

log = logging.getLogger(__name__)

BUNDLE_SCHEMA = "patmaps-bundle/1"
MANIFEST_SCHEMA = "patmaps-manifest/1"

NETWORK_HEADER = ("window", "nodes", "edges", "density", "component_sizes",
                  "communities", "isolates", "modularity")

ZTEST_LEGEND = (
    {"class": "dark-green", "color": "#006400",
     "meaning": "top-cited share significantly above the expected 25%"},
    {"class": "light-green", "color": "#90EE90",
     "meaning": "above expectation, not significant"},
    {"class": "lime-green", "color": "#32CD32",
     "meaning": "above expectation, expected count below 5 (untested)"},
    {"class": "red-orange", "color": "#FF4500",
     "meaning": "below expectation, expected count below 5 (untested)"},
    {"class": "orange", "color": "#FFA500",
     "meaning": "below expectation, not significant"},
    {"class": "dark-red", "color": "#8B0000",
     "meaning": "top-cited share significantly below the expected 25%"},
)
PERCENTILE_LEGEND = (
    {"class": "red", "color": "#FF0000", "meaning": "top 1% of cities by patent count"},
    {"class": "fuchsia", "color": "#FF00FF", "meaning": "top 5% of cities"},
    {"class": "pink", "color": "#FFC0CB", "meaning": "top 10% of cities"},
    {"class": "orange", "color": "#FFA500", "meaning": "top 25% of cities"},
    {"class": "cyan", "color": "#00FFFF", "meaning": "top 50% of cities"},
    {"class": "blue", "color": "#0000FF", "meaning": "bottom 50% of cities"},
)


@dataclass
class RunConfig:
    """Resolved configuration of one pipeline run."""

    records: str = ""
    schema: str = "uspto"
    dimension: str = "inventors"
    scheme: str = "ztest"
    counting: str = "fractional"
    seed: int = 0
    out: str = "out"
    window_first: int | None = None
    window_last: int | None = None
    window_length: int = 5
    window_step: int = 1
    ipc_levels: tuple[int, ...] = (3, 4)
    citation_pairs: str = ""
    disparity_ipc3: str = ""
    disparity_ipc4: str = ""
    base_map_ipc3: str = ""
    base_map_ipc4: str = ""
    cache: str = ""
    gazetteer: str = ""
    provider_url: str = ""
    pajek_txt: bool = False
    dedup_family: bool = False
    top_fraction: float = 0.25
    alpha: float = 0.05

    _BOOLS = ("pajek_txt", "dedup_family")
    _INTS = ("seed", "window_first", "window_last", "window_length", "window_step")
    _FLOATS = ("top_fraction", "alpha")

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        """Load a line-oriented key=value config file."""
        cfg = cls()
        known = {f.name for f in fields(cls) if not f.name.startswith("_")}
        for line_no, line in enumerate(
                Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in known:
                raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
            cfg.set_option(key, value)
        return cfg

    def set_option(self, key: str, value: str) -> None:
        if key == "ipc_levels":
            self.ipc_levels = tuple(sorted(int(v) for v in value.split(",") if v.strip()))
        elif key in self._BOOLS:
            setattr(self, key, value.lower() in ("1", "true", "yes", "on"))
        elif key in self._INTS:
            setattr(self, key, int(value))
        elif key in self._FLOATS:
            setattr(self, key, float(value))
        else:
            setattr(self, key, value)

    def validate(self) -> None:
        if not self.records:
            raise ConfigError("no record file configured")
        if self.schema not in records.OFFICES:
            raise ConfigError(f"unknown schema {self.schema!r}")
        if self.dimension not in ("inventors", "assignees"):
            raise ConfigError(f"dimension must be inventors or assignees, got {self.dimension!r}")
        if self.scheme not in ("ztest", "percentile"):
            raise ConfigError(f"scheme must be ztest or percentile, got {self.scheme!r}")
        if self.counting not in ("fractional", "whole"):
            raise ConfigError(f"counting must be fractional or whole, got {self.counting!r}")
        bad_levels = [lv for lv in self.ipc_levels if lv not in (3, 4)]
        if bad_levels or not self.ipc_levels:
            raise ConfigError(f"ipc_levels must be a subset of 3,4, got {self.ipc_levels}")
        if not self.citation_pairs and not (self.disparity_ipc3 or self.disparity_ipc4):
            raise ConfigError("either citation_pairs or disparity files are required")

    def resolved_items(self) -> list[tuple[str, str]]:
        items = []
        for f in sorted(f.name for f in fields(self) if not f.name.startswith("_")):
            value = getattr(self, f)
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            items.append((f, "" if value is None else str(value)))
        return items


@dataclass
class RunReport:
    """Summary of one run; fatal entries force a nonzero exit."""

    config: RunConfig
    counts: dict[str, int] = field(default_factory=dict)
    values: dict[str, str] = field(default_factory=dict)
    unresolved_geocodes: list[str] = field(default_factory=list)
    skipped_cities: list[tuple[str, str]] = field(default_factory=list)
    fatal: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.fatal

    def render(self) -> str:
        lines = ["# run report"]
        for key in sorted(self.counts):
            lines.append(f"{key}={self.counts[key]}")
        for key in sorted(self.values):
            lines.append(f"{key}={self.values[key]}")
        lines.append("")
        lines.append("# unresolved geocodes")
        lines += [f"  {k}" for k in sorted(self.unresolved_geocodes)] or ["  (none)"]
        lines.append("")
        lines.append("# cities omitted from overlays (no coordinates)")
        lines += [f"  {w}\t{c}" for w, c in sorted(self.skipped_cities)] or ["  (none)"]
        lines.append("")
        lines.append("# fatal")
        lines += [f"  {m}" for m in self.fatal] or ["  (none)"]
        lines.append("")
        lines.append("# resolved config")
        lines += [f"  {k}={v}" for k, v in self.config.resolved_items()]
        return "\n".join(lines) + "\n"


def _legend(scheme: str) -> tuple[dict, ...]:
    return ZTEST_LEGEND if scheme == "ztest" else PERCENTILE_LEGEND


def _disparity_matrices(cfg: RunConfig) -> dict[int, diversity.DisparityMatrix]:
    matrices: dict[int, diversity.DisparityMatrix] = {}
    for level in cfg.ipc_levels:
        explicit = getattr(cfg, f"disparity_ipc{level}")
        if explicit:
            matrices[level] = diversity.read_disparity(explicit)
        elif cfg.citation_pairs:
            cm = diversity.read_citation_pairs(cfg.citation_pairs, level=level)
            matrices[level] = diversity.disparity_from_citations(cm)
        else:
            raise ConfigError(f"no disparity source for ipc level {level}")
    return matrices


def _base_maps(cfg: RunConfig,
               matrices: Mapping[int, diversity.DisparityMatrix],
               ) -> dict[int, diversity.BaseMap]:
    maps = {}
    for level in cfg.ipc_levels:
        user_path = getattr(cfg, f"base_map_ipc{level}")
        if user_path:
            maps[level] = diversity.read_base_map(user_path)
        else:
            maps[level] = diversity.base_map_layout(matrices[level], seed=cfg.seed)
    return maps


def run_pipeline(cfg: RunConfig) -> RunReport:
    """Run the whole analysis; on a fatal error remove this run's outputs."""
    cfg.validate()
    out_dir = Path(cfg.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise PipelineError(f"output directory not writable: {exc}") from exc
    created: list[Path] = []

    def emit(name: str) -> Path:
        path = out_dir / name
        created.append(path)
        return path

    report = RunReport(config=cfg)
    try:
        _run(cfg, out_dir, emit, report)
    except Exception as exc:
        for path in created:
            path.unlink(missing_ok=True)
        if isinstance(exc, (ConfigError, PipelineError)):
            report.fatal.append(str(exc))
            raise PipelineError(str(exc)) from exc
        raise
    return report


def _run(cfg: RunConfig, out_dir: Path, emit, report: RunReport) -> None:
    corpus = records.parse_records(cfg.records, cfg.schema)
    records.write_rejections(corpus.rejections, emit("rejections.tsv"))
    report.counts["records_accepted"] = len(corpus)
    report.counts["records_rejected"] = len(corpus.rejections)
    if cfg.dedup_family:
        corpus.records = records.dedup_families(corpus.records)
        report.counts["records_after_family_dedup"] = len(corpus)
    corpus = corpus.normalized()

    threshold = None
    if cfg.scheme == "ztest":
        missing = [r.patent_id for r in corpus.records if r.forward_citations is None]
        if missing or not corpus.records:
            raise ConfigError(
                "scheme ztest needs the forward_citations column on every record; "
                f"missing for {len(missing)} records"
            )
        threshold = citystats.top_cited_threshold(
            [r.forward_citations for r in corpus.records], cfg.top_fraction)
        report.values["top_cited_threshold"] = str(threshold)
        report.values["top_cited_fraction"] = f"{cfg.top_fraction:g}"
        report.values["top_cited_tie_policy"] = "inclusive"

    first = cfg.window_first
    last = cfg.window_last
    if first is None or last is None:
        span = corpus.year_span() if corpus.records else (0, -1)
        first = span[0] if first is None else first
        last = span[1] if last is None else last
    windows = []
    if corpus.records or (cfg.window_first is not None and cfg.window_last is not None):
        spec = records.WindowSpec(first, last, cfg.window_length, cfg.window_step)
        windows = records.window_slices(corpus.records, spec)
    report.counts["windows"] = len(windows)

    cache_path = Path(cfg.cache) if cfg.cache else out_dir / "geocache.tsv"
    cache = geocode.GeoCache.load(cache_path)
    gazetteer = geocode.load_gazetteer(cfg.gazetteer or None)
    provider = geocode.UrlTemplateProvider(cfg.provider_url) if cfg.provider_url else None
    keys = set(records.iter_city_keys(corpus.records, cfg.dimension))
    points_by_key, unresolved = geocode.geocode_batch(keys, cache, provider, gazetteer)
    cache.save(cache_path)
    coords = {k: (pt.lat, pt.lon) for k, pt in points_by_key.items()}
    report.counts["city_keys"] = len(keys)
    report.counts["geocoded"] = len(coords)
    report.unresolved_geocodes = sorted(unresolved)

    matrices = _disparity_matrices(cfg)
    for level, dm in matrices.items():
        for r in corpus.records:
            dm.submatrix(sorted(records.record_classes(r, level)))
    base_maps = _base_maps(cfg, matrices)
    for level, bm in base_maps.items():
        diversity.write_base_map(bm, emit(f"basemap_ipc{level}.tsv"))
        if bm.threshold is not None:
            report.values[f"base_map_threshold_ipc{level}"] = f"{bm.threshold:g}"
        report.values[f"base_map_provenance_ipc{level}"] = bm.provenance

    geo_rows = []
    network_rows = []
    manifest_windows = []
    pajek_ext = "txt" if cfg.pajek_txt else "net"
    for w in windows:
        graph = network.build_co_network(w.records, cfg.dimension, w.label)
        network.write_pajek(graph, emit(f"paj{w.first_year}.{pajek_ext}"))

        if cfg.scheme == "ztest":
            top_counts: dict[str, int] = {}
            for r in w.records:
                if r.forward_citations >= threshold:
                    for key in {p.key for p in r.parties(cfg.dimension) if p.locatable}:
                        top_counts[key] = top_counts.get(key, 0) + 1
            stats = citystats.ztest_city_stats(
                graph.node_counts, top_counts, cfg.top_fraction, cfg.alpha)
        else:
            stats = citystats.percentile_city_stats(graph.node_counts)

        overlay_name = citystats.overlay_filename(cfg.scheme, w.first_year)
        links = sorted((a, b, wt) for (a, b), wt in graph.edges.items())
        skipped = citystats.write_overlay(emit(overlay_name), stats, coords, links)
        report.skipped_cities += [(w.label, c) for c in skipped]
        geo_rows += [(w.label, s, coords.get(s.city)) for s in stats]

        partition = network.louvain(graph, seed=cfg.seed)
        comps = network.components(graph)
        network_rows.append([
            w.label,
            graph.n_nodes,
            graph.n_edges,
            f"{network.density(graph):.6f}",
            ";".join(str(len(c)) for c in comps),
            partition.n_communities,
            sum(1 for c in comps if len(c) == 1),
            f"{partition.modularity:.6f}",
        ])

        for level in cfg.ipc_levels:
            vector = diversity.class_proportions(
                w.records, level, cfg.counting, w.label)
            if vector is None:
                log.info("window %s: no classified patents, class overlay skipped", w.label)
                continue
            diversity.write_ipc_overlay(
                vector, base_maps[level],
                emit(diversity.ipc_overlay_filename(level, w.first_year)))

        manifest_windows.append({"label": w.label, "first_year": w.first_year})

    citystats.write_geo_table(emit("geo.csv"), geo_rows)

    points = diversity.diversity_series(
        ((w.label, w.records) for w in windows), matrices, cfg.counting)
    diversity.write_rao_csv(points, emit("rao.csv"))
    if len(points) >= 2 and 3 in cfg.ipc_levels and 4 in cfg.ipc_levels:
        d3 = [pt.delta3 for pt in points]
        d4 = [pt.delta4 for pt in points]
        if None not in d3 and None not in d4:
            try:
                rho = diversity.spearman(d3, d4)
                report.values["spearman_delta3_delta4"] = f"{rho:.6f}"
            except ValueError:
                pass

    with open(emit("network.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(NETWORK_HEADER)
        writer.writerows(network_rows)

    manifest = {
        "schema": MANIFEST_SCHEMA,
        "scheme": cfg.scheme,
        "dimension": cfg.dimension,
        "counting": cfg.counting,
        "seed": cfg.seed,
        "ipc_levels": list(cfg.ipc_levels),
        "pajek_ext": pajek_ext,
        "windows": manifest_windows,
    }
    emit("manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=False) + "\n", encoding="utf-8")

    emit("bundle.json")  # register before building so a failure cleans it up
    build_bundle(out_dir)

    report.values["seed"] = str(cfg.seed)
    emit("run_report.txt").write_text(report.render(), encoding="utf-8")


def build_bundle(out_dir: str | Path) -> Path:
    """Assemble the viewer bundle from a run's loose artifacts.

    Reads manifest.json plus the per-window overlay, class overlay, and
    table files; any missing artifact is fatal. Windows appear exactly once,
    in chronological order.
    """
    out_dir = Path(out_dir)
    manifest_path = out_dir / "manifest.json"
    if not manifest_path.exists():
        raise PipelineError(f"missing artifact: {manifest_path}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if manifest.get("schema") != MANIFEST_SCHEMA:
        raise PipelineError(f"{manifest_path}: unknown manifest schema")

    def require(name: str) -> Path:
        path = out_dir / name
        if not path.exists():
            raise PipelineError(f"missing artifact: {path}")
        return path

    network_stats: dict[str, dict] = {}
    with open(require("network.csv"), newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            network_stats[row["window"]] = {
                "nodes": int(row["nodes"]),
                "edges": int(row["edges"]),
                "density": float(row["density"]),
                "component_sizes": [int(s) for s in row["component_sizes"].split(";") if s],
                "communities": int(row["communities"]),
                "isolates": int(row["isolates"]),
                "modularity": float(row["modularity"]),
            }

    diversity_by_window: dict[str, dict] = {}
    with open(require("rao.csv"), newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            diversity_by_window[row["window"]] = {
                "ipc3": float(row["delta_ipc3"]) if row["delta_ipc3"] else None,
                "ipc4": float(row["delta_ipc4"]) if row["delta_ipc4"] else None,
                "patents": int(row["n_patents"]),
            }

    entries = []
    for w in manifest["windows"]:
        label, first_year = w["label"], w["first_year"]
        overlay = require(citystats.overlay_filename(manifest["scheme"], first_year))
        cities, links = citystats.read_overlay(overlay)
        ipc = {}
        for level in manifest["ipc_levels"]:
            path = out_dir / diversity.ipc_overlay_filename(level, first_year)
            if path.exists():
                ipc[str(level)] = diversity.read_ipc_overlay(path)
        stats = network_stats.get(label)
        if stats is None:
            raise PipelineError(f"network.csv lacks window {label}")
        entries.append({
            "window": label,
            "first_year": first_year,
            "cities": cities,
            "links": [[a, b, wt] for a, b, wt in links],
            "ipc": ipc,
            "network": stats,
            "diversity": diversity_by_window.get(label),
        })

    bundle = {
        "schema": BUNDLE_SCHEMA,
        "scheme": manifest["scheme"],
        "dimension": manifest["dimension"],
        "counting": manifest["counting"],
        "seed": manifest["seed"],
        "legend": list(_legend(manifest["scheme"])),
        "windows": [w["label"] for w in manifest["windows"]],
        "entries": entries,
    }
    path = out_dir / "bundle.json"
    path.write_text(json.dumps(bundle, indent=2) + "\n", encoding="utf-8")
    return path


def parse_bundle(path: str | Path) -> dict:
    """Load and validate a bundle file; unknown schema tags are rejected."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise BundleError(f"cannot read bundle {path}: {exc}") from exc
    if not isinstance(data, dict) or data.get("schema") != BUNDLE_SCHEMA:
        raise BundleError(f"{path}: unknown bundle schema tag")
    labels = [e["window"] for e in data.get("entries", [])]
    if labels != data.get("windows") or len(set(labels)) != len(labels):
        raise BundleError(f"{path}: window entries out of order or duplicated")
    return data


def _entry(bundle: dict, label: str, source: str) -> dict:
    for entry in bundle["entries"]:
        if entry["window"] == label:
            return entry
    raise ConfigError(f"window {label!r} not found in {source}")


def compare_windows(bundle_a: str | Path, window_a: str, window_b: str,
                    bundle_b: str | Path | None = None,
                    out: str | Path | None = None) -> str:
    """Static side-by-side report of two windows, possibly across bundles."""
    a = parse_bundle(bundle_a)
    b = a if bundle_b is None else parse_bundle(bundle_b)
    left = _entry(a, window_a, str(bundle_a))
    right = _entry(b, window_b, str(bundle_b if bundle_b is not None else bundle_a))

    cities_l = {c["name"] for c in left["cities"]}
    cities_r = {c["name"] for c in right["cities"]}
    only_l = sorted(cities_l - cities_r)
    only_r = sorted(cities_r - cities_l)

    def describe(side: str, src, entry: dict) -> list[str]:
        div = entry.get("diversity") or {}
        net = entry.get("network") or {}
        return [
            f"[{side}] bundle={src} window={entry['window']}",
            f"[{side}] cities={len(entry['cities'])} links={len(entry['links'])}",
            f"[{side}] density={net.get('density')} communities={net.get('communities')} "
            f"isolates={net.get('isolates')}",
            f"[{side}] delta_ipc3={div.get('ipc3')} delta_ipc4={div.get('ipc4')} "
            f"patents={div.get('patents')}",
        ]

    lines = ["# window comparison"]
    lines += describe("left", bundle_a, left)
    lines += describe("right", bundle_b if bundle_b is not None else bundle_a, right)
    lines.append("")
    lines.append("# cities only in left")
    lines += [f"  {c}" for c in only_l] or ["  (none)"]
    lines.append("# cities only in right")
    lines += [f"  {c}" for c in only_r] or ["  (none)"]
    lines.append("")
    dl = (left.get("network") or {}).get("density")
    dr = (right.get("network") or {}).get("density")
    if dl is not None and dr is not None:
        lines.append(f"density_diff={dr - dl:+.6f}")
    for lv in ("ipc3", "ipc4"):
        vl = (left.get("diversity") or {}).get(lv)
        vr = (right.get("diversity") or {}).get(lv)
        if vl is not None and vr is not None:
            lines.append(f"delta_{lv}_diff={vr - vl:+.9f}")
    text = "\n".join(lines) + "\n"
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    return text
