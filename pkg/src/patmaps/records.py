"""Patent record ingestion.

Parses tab-separated record files into validated records, normalizes party
addresses to stable city keys, truncates classification codes, and slices a
corpus into overlapping filing-year windows.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import CorpusError

OFFICES = ("uspto", "patstat")

REQUIRED_COLUMNS = (
    "patent_id",
    "office",
    "filing_year",
    "ipc_codes",
    "inventors",
    "assignees",
)
OPTIONAL_COLUMNS = ("grant_year", "cpc_tags", "forward_citations", "family_id")

# Section letter + two-digit class + subclass letter; full codes continue
# with group digits that truncation discards.
_IPC_PREFIX = re.compile(r"^[A-H]\d\d[A-Z]")

# German umlauts expand by convention; every other diacritic is stripped.
_GERMAN_FOLD = {"ä": "ae", "ö": "oe", "ü": "ue", "ß": "ss"}


def fold_city(name: str) -> str:
    """Normalize a city name to its canonical key form.

    Case-folds, expands German umlauts (Juelich == Jülich), strips all other
    diacritics, unifies hyphens with spaces, and collapses whitespace. The
    result is idempotent under re-folding.
    """
    s = name.casefold()
    for src, repl in _GERMAN_FOLD.items():
        s = s.replace(src, repl)
    s = unicodedata.normalize("NFKD", s)
    s = "".join(ch for ch in s if not unicodedata.combining(ch))
    s = s.replace("-", " ")
    return " ".join(s.split())


@dataclass(frozen=True)
class Party:
    """One inventor or assignee with its address fields."""

    name: str
    raw_address: str
    city: str
    region: str = ""
    country: str = ""

    @property
    def locatable(self) -> bool:
        """A party joins geographic maps only with both a city and a country."""
        return bool(self.city) and bool(self.country)

    @property
    def key(self) -> str:
        """Normalized city key 'city|region|country' used for geocoding."""
        return f"{self.city}|{self.region}|{self.country}"


def normalize_party(p: Party) -> Party:
    """Return the party with folded city, uppercased region and country.

    Normalization is idempotent. Parties whose city or country cannot be
    normalized to a non-empty value stay in the corpus but report
    ``locatable == False`` and are excluded from geographic maps.
    """
    return replace(
        p,
        name=p.name.strip(),
        city=fold_city(p.city),
        region=p.region.strip().upper(),
        country=p.country.strip().upper(),
    )


@dataclass(frozen=True)
class PatentRecord:
    patent_id: str
    office: str
    filing_year: int
    ipc_codes: frozenset[str]
    inventors: tuple[Party, ...]
    assignees: tuple[Party, ...]
    grant_year: int | None = None
    cpc_tags: frozenset[str] = frozenset()
    forward_citations: int | None = None
    family_id: str | None = None

    def parties(self, dimension: str) -> tuple[Party, ...]:
        if dimension == "inventors":
            return self.inventors
        if dimension == "assignees":
            return self.assignees
        raise ValueError(f"unknown dimension: {dimension!r}")


@dataclass
class Corpus:
    """Accepted records plus provenance of where they came from."""

    records: list[PatentRecord]
    schema: str
    source: str = ""
    rejections: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def has_citations(self) -> bool:
        return bool(self.records) and all(
            r.forward_citations is not None for r in self.records
        )

    def year_span(self) -> tuple[int, int]:
        years = [r.filing_year for r in self.records]
        if not years:
            raise CorpusError("corpus is empty, no filing-year span")
        return min(years), max(years)

    def normalized(self) -> "Corpus":
        recs = [
            replace(
                r,
                inventors=tuple(normalize_party(p) for p in r.inventors),
                assignees=tuple(normalize_party(p) for p in r.assignees),
            )
            for r in self.records
        ]
        return Corpus(recs, self.schema, self.source, list(self.rejections))


def _parse_parties(cell: str) -> tuple[Party, ...]:
    parties = []
    for token in cell.split(";"):
        token = token.strip()
        if not token:
            continue
        fields = token.split("|")
        if len(fields) != 4:
            raise ValueError(f"party needs name|city|region|country: {token!r}")
        name, city, region, country = (f.strip() for f in fields)
        parties.append(Party(name, f"{city}|{region}|{country}", city, region, country))
    return tuple(parties)


def _parse_year(cell: str, lo: int = 1900, hi: int = 2100) -> int:
    year = int(cell)
    if not lo <= year <= hi:
        raise ValueError(f"year {year} outside [{lo}, {hi}]")
    return year


def _parse_ipc_codes(cell: str) -> frozenset[str]:
    codes = set()
    for code in cell.split(";"):
        code = code.strip()
        if not code:
            continue
        if not _IPC_PREFIX.match(code.upper()):
            raise ValueError(f"malformed ipc code: {code!r}")
        codes.add(code.upper())
    return frozenset(codes)


def _parse_line(row: dict[str, str]) -> PatentRecord:
    patent_id = row["patent_id"].strip()
    if not patent_id:
        raise ValueError("empty patent_id")
    office = row["office"].strip().lower()
    if office not in OFFICES:
        raise ValueError(f"unknown office: {office!r}")
    filing_year = _parse_year(row["filing_year"])

    grant_year = None
    if row.get("grant_year", "").strip():
        grant_year = _parse_year(row["grant_year"])
        if grant_year < filing_year:
            raise ValueError(f"grant_year {grant_year} before filing_year {filing_year}")

    citations = None
    if row.get("forward_citations", "").strip():
        citations = int(row["forward_citations"])
        if citations < 0:
            raise ValueError(f"negative forward_citations: {citations}")

    family_id = row.get("family_id", "").strip() or None
    cpc_tags = frozenset(
        t.strip() for t in row.get("cpc_tags", "").split(";") if t.strip()
    )

    return PatentRecord(
        patent_id=patent_id,
        office=office,
        filing_year=filing_year,
        ipc_codes=_parse_ipc_codes(row["ipc_codes"]),
        inventors=_parse_parties(row["inventors"]),
        assignees=_parse_parties(row["assignees"]),
        grant_year=grant_year,
        cpc_tags=cpc_tags,
        forward_citations=citations,
        family_id=family_id,
    )


def parse_records(source: str | Path | IO[str], schema: str) -> Corpus:
    """Parse a tab-separated record file into a corpus.

    Every data line either yields a record or a line-numbered rejection; a
    malformed header is fatal. Duplicate (office, patent_id) pairs reject the
    later line. Rejections never abort the parse.
    """
    if schema not in OFFICES:
        raise CorpusError(f"unknown schema: {schema!r}")

    if hasattr(source, "read"):
        lines = source.read().splitlines()
        name = getattr(source, "name", "<stream>")
    else:
        path = Path(source)
        lines = path.read_text(encoding="utf-8").splitlines()
        name = str(path)

    if not lines:
        raise CorpusError(f"{name}: empty file, header row required")
    header = [h.strip() for h in lines[0].split("\t")]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise CorpusError(f"{name}: header missing required columns {missing}")
    if len(set(header)) != len(header):
        raise CorpusError(f"{name}: duplicate header columns")

    corpus = Corpus([], schema, source=name)
    seen: set[tuple[str, str]] = set()
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) > len(header):
            corpus.rejections.append(
                (line_no, f"expected {len(header)} columns, got {len(cells)}")
            )
            continue
        # tools strip trailing tabs; short rows pad out as empty optionals
        cells += [""] * (len(header) - len(cells))
        row = dict(zip(header, cells))
        try:
            record = _parse_line(row)
        except ValueError as exc:
            corpus.rejections.append((line_no, str(exc)))
            continue
        dup_key = (record.office, record.patent_id)
        if dup_key in seen:
            corpus.rejections.append(
                (line_no, f"duplicate patent_id {record.patent_id!r} for {record.office}")
            )
            continue
        seen.add(dup_key)
        corpus.records.append(record)
    return corpus


def _format_party(p: Party) -> str:
    for piece in (p.name, p.city, p.region, p.country):
        if any(ch in piece for ch in "|;\t"):
            raise CorpusError(f"party field contains a reserved delimiter: {piece!r}")
    return f"{p.name}|{p.city}|{p.region}|{p.country}"


def write_records(records: Iterable[PatentRecord], target: str | Path | IO[str]) -> None:
    """Serialize records back to the tab-separated file format.

    The output re-parses to an identical record set (sets are emitted in
    sorted order, party order is preserved).
    """
    columns = list(REQUIRED_COLUMNS) + list(OPTIONAL_COLUMNS)
    out_lines = ["\t".join(columns)]
    for r in records:
        row = {
            "patent_id": r.patent_id,
            "office": r.office,
            "filing_year": str(r.filing_year),
            "ipc_codes": ";".join(sorted(r.ipc_codes)),
            "inventors": ";".join(_format_party(p) for p in r.inventors),
            "assignees": ";".join(_format_party(p) for p in r.assignees),
            "grant_year": "" if r.grant_year is None else str(r.grant_year),
            "cpc_tags": ";".join(sorted(r.cpc_tags)),
            "forward_citations": "" if r.forward_citations is None else str(r.forward_citations),
            "family_id": r.family_id or "",
        }
        out_lines.append("\t".join(row[c] for c in columns))
    text = "\n".join(out_lines) + "\n"
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def write_rejections(rejections: Iterable[tuple[int, str]], path: str | Path) -> None:
    """Write the sidecar rejection report: TSV of line_no, reason."""
    lines = ["line_no\treason"]
    lines += [f"{line_no}\t{reason}" for line_no, reason in rejections]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def dedup_families(records: Iterable[PatentRecord]) -> list[PatentRecord]:
    """Collapse records sharing a family id, keeping the first occurrence.

    Records without a family id always pass through.
    """
    seen: set[str] = set()
    kept = []
    for r in records:
        if r.family_id is not None:
            if r.family_id in seen:
                continue
            seen.add(r.family_id)
        kept.append(r)
    return kept


def truncate_ipc(code: str, level: int) -> str:
    """Truncate a full IPC code to its 3- or 4-character class prefix."""
    if level not in (3, 4):
        raise ValueError(f"level must be 3 or 4, got {level!r}")
    c = code.strip().upper()
    if not _IPC_PREFIX.match(c):
        raise ValueError(
            f"ipc code {code!r} lacks the 4 leading classification characters"
        )
    return c[:level]


def record_classes(record: PatentRecord, level: int) -> frozenset[str]:
    """Distinct truncated classes of one patent (duplicates collapse)."""
    return frozenset(truncate_ipc(c, level) for c in record.ipc_codes)


@dataclass(frozen=True)
class WindowSpec:
    """Sliding filing-year window definition."""

    first_year: int
    last_year: int
    length: int = 5
    step: int = 1

    def __post_init__(self) -> None:
        if self.last_year < self.first_year:
            raise ValueError("last_year before first_year")
        if self.length < 1 or self.step < 1:
            raise ValueError("length and step must be positive")


@dataclass(frozen=True)
class WindowSlice:
    label: str
    first_year: int
    last_year: int
    records: tuple[PatentRecord, ...]


def window_label(first_year: int, last_year: int) -> str:
    if last_year > first_year:
        return f"{first_year}-{last_year}"
    return str(first_year)


def window_slices(records: Iterable[PatentRecord], spec: WindowSpec) -> list[WindowSlice]:
    """Slice records into overlapping windows [y, y+length-1].

    Windows start at first_year and advance by step while they fit inside
    last_year; a record belongs to every window containing its filing year.
    An empty record list yields an empty window for each position.
    """
    records = list(records)
    slices = []
    y = spec.first_year
    while y + spec.length - 1 <= spec.last_year:
        lo, hi = y, y + spec.length - 1
        members = tuple(r for r in records if lo <= r.filing_year <= hi)
        slices.append(WindowSlice(window_label(lo, hi), lo, hi, members))
        y += spec.step
    return slices


def iter_city_keys(records: Iterable[PatentRecord], dimension: str) -> Iterator[str]:
    """Yield every located city key for the chosen party dimension."""
    for r in records:
        for p in r.parties(dimension):
            if p.locatable:
                yield p.key
