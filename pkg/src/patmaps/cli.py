"""Command-line entry points: ingest, geocode, analyze, bundle, compare."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import geocode, pipeline, records
from .errors import PatmapsError


def _add_override_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--records", help="record file (TSV)")
    parser.add_argument("--schema", choices=records.OFFICES)
    parser.add_argument("--dimension", choices=("inventors", "assignees"))
    parser.add_argument("--scheme", choices=("ztest", "percentile"))
    parser.add_argument("--counting", choices=("fractional", "whole"))
    parser.add_argument("--window-first", type=int, dest="window_first")
    parser.add_argument("--window-last", type=int, dest="window_last")
    parser.add_argument("--window-length", type=int, dest="window_length")
    parser.add_argument("--window-step", type=int, dest="window_step")
    parser.add_argument("--ipc-level", choices=("3", "4", "both"), dest="ipc_level")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out")
    parser.add_argument("--citation-pairs", dest="citation_pairs")
    parser.add_argument("--disparity-ipc3", dest="disparity_ipc3")
    parser.add_argument("--disparity-ipc4", dest="disparity_ipc4")
    parser.add_argument("--base-map-ipc3", dest="base_map_ipc3")
    parser.add_argument("--base-map-ipc4", dest="base_map_ipc4")
    parser.add_argument("--cache", help="geocode cache TSV")
    parser.add_argument("--gazetteer", help="gazetteer TSV (default: bundled)")
    parser.add_argument("--provider-url", dest="provider_url",
                        help="geocoder URL template with a {query} placeholder")
    parser.add_argument("--pajek-txt", action="store_true", default=None,
                        dest="pajek_txt", help="name Pajek files .txt instead of .net")
    parser.add_argument("--dedup-family", action="store_true", default=None,
                        dest="dedup_family", help="collapse records sharing a family id")


def _build_config(args: argparse.Namespace) -> pipeline.RunConfig:
    cfg = pipeline.RunConfig.from_file(args.config) if args.config else pipeline.RunConfig()
    simple = ("records", "schema", "dimension", "scheme", "counting",
              "window_first", "window_last", "window_length", "window_step",
              "seed", "out", "citation_pairs", "disparity_ipc3", "disparity_ipc4",
              "base_map_ipc3", "base_map_ipc4", "cache", "gazetteer",
              "provider_url", "pajek_txt", "dedup_family")
    for name in simple:
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "ipc_level", None):
        cfg.ipc_levels = (3, 4) if args.ipc_level == "both" else (int(args.ipc_level),)
    if not cfg.provider_url:
        cfg.provider_url = os.environ.get("PATMAPS_PROVIDER_URL", "")
    return cfg


def cmd_ingest(args: argparse.Namespace) -> int:
    corpus = records.parse_records(args.records, args.schema or "uspto")
    if args.dedup_family:
        corpus.records = records.dedup_families(corpus.records)
    corpus = corpus.normalized()
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    records.write_records(corpus.records, out_dir / "records_clean.tsv")
    records.write_rejections(corpus.rejections, out_dir / "rejections.tsv")
    print(f"accepted={len(corpus)} rejected={len(corpus.rejections)} -> {out_dir}")
    return 0


def cmd_geocode(args: argparse.Namespace) -> int:
    corpus = records.parse_records(args.records, args.schema or "uspto").normalized()
    keys = set(records.iter_city_keys(corpus.records, args.dimension or "inventors"))
    cache_path = Path(args.cache or "geocache.tsv")
    cache = geocode.GeoCache.load(cache_path)
    gazetteer = geocode.load_gazetteer(args.gazetteer)
    url = args.provider_url or os.environ.get("PATMAPS_PROVIDER_URL", "")
    provider = geocode.UrlTemplateProvider(url) if url else None
    resolved, unresolved = geocode.geocode_batch(keys, cache, provider, gazetteer)
    cache.save(cache_path)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["key"] + sorted(unresolved)
    (out_dir / "unresolved_geocodes.tsv").write_text("\n".join(lines) + "\n", "utf-8")
    print(f"keys={len(keys)} resolved={len(resolved)} unresolved={len(unresolved)} "
          f"cache={cache_path}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    report = pipeline.run_pipeline(cfg)
    print(f"windows={report.counts.get('windows', 0)} "
          f"records={report.counts.get('records_accepted', 0)} -> {cfg.out}")
    return 0 if report.ok else 1


def cmd_bundle(args: argparse.Namespace) -> int:
    path = pipeline.build_bundle(args.dir)
    print(f"bundle -> {path}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    text = pipeline.compare_windows(
        args.bundle, args.window_a, args.window_b,
        bundle_b=args.bundle_b, out=args.out)
    if args.out:
        print(f"comparison -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patmaps",
        description="Geographic and classification-space maps of patenting activity")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, validate, and normalize a record file")
    p.add_argument("--records", required=True)
    p.add_argument("--schema", choices=records.OFFICES)
    p.add_argument("--out")
    p.add_argument("--dedup-family", action="store_true", dest="dedup_family")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("geocode", help="resolve city keys against cache/provider/gazetteer")
    p.add_argument("--records", required=True)
    p.add_argument("--schema", choices=records.OFFICES)
    p.add_argument("--dimension", choices=("inventors", "assignees"))
    p.add_argument("--cache")
    p.add_argument("--gazetteer")
    p.add_argument("--provider-url", dest="provider_url")
    p.add_argument("--out")
    p.set_defaults(func=cmd_geocode)

    p = sub.add_parser("analyze", help="run the full per-window pipeline")
    p.add_argument("--config", help="key=value config file; flags override")
    _add_override_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bundle", help="assemble the viewer bundle from run artifacts")
    p.add_argument("--dir", required=True, help="output directory of an analyze run")
    p.set_defaults(func=cmd_bundle)

    p = sub.add_parser("compare", help="side-by-side report of two windows")
    p.add_argument("--bundle", required=True)
    p.add_argument("--window-a", required=True, dest="window_a")
    p.add_argument("--window-b", required=True, dest="window_b")
    p.add_argument("--bundle-b", dest="bundle_b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PatmapsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
