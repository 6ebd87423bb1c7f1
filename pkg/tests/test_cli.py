from pathlib import Path

import pytest

from patmaps.cli import main

from conftest import REPO_ROOT

DATA = REPO_ROOT / "demos" / "data"


def test_ingest_writes_clean_records_and_rejections(tmp_path, capsys):
    rc = main(["ingest", "--records", str(DATA / "records_uspto.tsv"),
               "--schema", "uspto", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "records_clean.tsv").exists()
    assert (tmp_path / "rejections.tsv").read_text().splitlines()[0] == "line_no\treason"
    assert "accepted=30" in capsys.readouterr().out


def test_ingest_dedup_family(tmp_path, capsys):
    rc = main(["ingest", "--records", str(DATA / "records_patstat.tsv"),
               "--schema", "patstat", "--dedup-family", "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "accepted=19" in out  # three cross-office family duplicates collapse


def test_geocode_resolves_demo_cities(tmp_path, capsys):
    cache = tmp_path / "cache.tsv"
    rc = main(["geocode", "--records", str(DATA / "records_uspto.tsv"),
               "--schema", "uspto", "--cache", str(cache),
               "--out", str(tmp_path)])
    assert rc == 0
    assert "unresolved=0" in capsys.readouterr().out
    assert cache.exists()
    assert (tmp_path / "unresolved_geocodes.tsv").exists()


def test_analyze_missing_citations_exits_nonzero(tmp_path, capsys):
    rc = main(["analyze",
               "--records", str(DATA / "records_patstat.tsv"),
               "--schema", "patstat", "--scheme", "ztest",
               "--citation-pairs", str(DATA / "citation_pairs.tsv"),
               "--out", str(tmp_path / "out")])
    assert rc == 1
    assert "forward_citations" in capsys.readouterr().err


def test_analyze_then_bundle_and_compare(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["analyze", "--config", str(DATA / "demo_uspto.cfg"),
               "--records", str(DATA / "records_uspto.tsv"),
               "--citation-pairs", str(DATA / "citation_pairs.tsv"),
               "--out", str(out)])
    assert rc == 0
    rc = main(["bundle", "--dir", str(out)])
    assert rc == 0
    report = tmp_path / "cmp.txt"
    rc = main(["compare", "--bundle", str(out / "bundle.json"),
               "--window-a", "1974-1978", "--window-b", "1975-1979",
               "--out", str(report)])
    assert rc == 0
    assert "window comparison" in report.read_text()


def test_compare_unknown_window_fails(tmp_path, capsys):
    out = tmp_path / "out"
    main(["analyze", "--config", str(DATA / "demo_uspto.cfg"),
          "--records", str(DATA / "records_uspto.tsv"),
          "--citation-pairs", str(DATA / "citation_pairs.tsv"),
          "--out", str(out)])
    rc = main(["compare", "--bundle", str(out / "bundle.json"),
               "--window-a", "1900-1904", "--window-b", "1974-1978"])
    assert rc == 1
    assert "1900-1904" in capsys.readouterr().err


def test_ipc_level_flag_restricts_levels(tmp_path):
    out = tmp_path / "out"
    rc = main(["analyze", "--config", str(DATA / "demo_uspto.cfg"),
               "--records", str(DATA / "records_uspto.tsv"),
               "--citation-pairs", str(DATA / "citation_pairs.tsv"),
               "--ipc-level", "3", "--out", str(out)])
    assert rc == 0
    assert list(out.glob("ipc3_*.txt"))
    assert not list(out.glob("ipc4_*.txt"))
    rao = (out / "rao.csv").read_text().splitlines()
    assert rao[1].split(",")[2] == ""  # delta_ipc4 column empty
