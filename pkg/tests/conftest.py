"""Shared builders for the test suite."""

from __future__ import annotations

import io
import random
from pathlib import Path

import pytest

from patmaps.network import CityGraph, edge_key
from patmaps.records import Party, PatentRecord

REPO_ROOT = Path(__file__).resolve().parents[1]

CITY_POOL = [
    ("golden", "CO", "US"), ("boulder", "CO", "US"), ("denver", "CO", "US"),
    ("palo alto", "CA", "US"), ("san jose", "CA", "US"), ("austin", "TX", "US"),
    ("boston", "MA", "US"), ("seattle", "WA", "US"), ("toledo", "OH", "US"),
    ("munich", "", "DE"), ("stuttgart", "", "DE"), ("berlin", "", "DE"),
    ("paris", "", "FR"), ("grenoble", "", "FR"), ("tokyo", "", "JP"),
    ("osaka", "", "JP"), ("chennai", "", "IN"), ("london", "", "GB"),
]

IPC_POOL = ["H01L31/04", "H01L31/032", "C23C14/34", "C01G15/00",
            "H01B1/06", "B05D5/12", "C30B23/00", "C03C17/00"]


def make_party(city: str, region: str = "", country: str = "US",
               name: str = "A. Tester") -> Party:
    return Party(name, f"{city}|{region}|{country}", city, region, country)


def make_record(pid: str, year: int, cities=(), ipc=("H01L31/04",),
                citations: int | None = 0, office: str = "uspto",
                grant_year: int | None = None, family_id: str | None = None,
                assignee_cities=()) -> PatentRecord:
    inventors = tuple(make_party(*c) if isinstance(c, tuple) else make_party(c)
                      for c in cities)
    assignees = tuple(make_party(*c) if isinstance(c, tuple) else make_party(c)
                      for c in assignee_cities)
    return PatentRecord(
        patent_id=pid, office=office, filing_year=year,
        ipc_codes=frozenset(ipc), inventors=inventors, assignees=assignees,
        grant_year=grant_year, forward_citations=citations, family_id=family_id,
    )


def synthetic_corpus_text(n: int, seed: int = 7,
                          first_year: int = 1974, last_year: int = 2008) -> str:
    """A record file of n rows with distinct ids, drawn from fixed pools."""
    rng = random.Random(seed)
    rows = ["\t".join((
        "patent_id", "office", "filing_year", "ipc_codes", "inventors",
        "assignees", "grant_year", "cpc_tags", "forward_citations", "family_id",
    ))]
    for i in range(n):
        year = rng.randint(first_year, last_year)
        n_inv = rng.choice((1, 1, 1, 2, 2, 3))
        cities = rng.sample(CITY_POOL, n_inv)
        inventors = ";".join(
            f"Inv {i}-{j}|{c}|{r}|{cc}" for j, (c, r, cc) in enumerate(cities))
        assignee = cities[0]
        codes = ";".join(sorted(rng.sample(IPC_POOL, rng.choice((1, 1, 2)))))
        rows.append("\t".join((
            f"SYN{i:06d}", "uspto", str(year), codes, inventors,
            f"Org {i}|{assignee[0]}|{assignee[1]}|{assignee[2]}",
            str(year + 2), "Y02E10/541", str(rng.randint(0, 60)), "",
        )))
    return "\n".join(rows) + "\n"


def random_city_graph(rng: random.Random, max_nodes: int = 30) -> CityGraph:
    """Random graph with unit node counts and integer edge weights."""
    n = rng.randint(1, max_nodes)
    nodes = [f"city {i}|{rng.choice(('US', 'DE', 'JP'))}" for i in range(n)]
    g = CityGraph(window="test", node_counts={u: 1 for u in nodes})
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.15:
                g.edges[edge_key(nodes[i], nodes[j])] = rng.randint(1, 5)
    return g


@pytest.fixture
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture
def demo_records(repo_root) -> Path:
    return repo_root / "demos" / "data" / "records_uspto.tsv"


@pytest.fixture
def demo_pairs(repo_root) -> Path:
    return repo_root / "demos" / "data" / "citation_pairs.tsv"


def records_file(text: str):
    return io.StringIO(text)
