"""City-key geocoding with a persistent cache and an offline gazetteer.

Resolution order per key: cache, then the pluggable provider (any callable
key -> (lat, lon) or None), then the gazetteer. Unresolved keys are reported
back, never fabricated.
"""

from __future__ import annotations

import json
import logging
import time
import urllib.request
from urllib.parse import quote
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .errors import GeocodeError

log = logging.getLogger(__name__)

Provider = Callable[[str], "tuple[float, float] | None"]

CACHE_HEADER = ("key", "lat", "lon", "source", "timestamp")


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float
    source: str  # cache | provider | gazetteer

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")


@dataclass(frozen=True)
class CacheEntry:
    lat: float
    lon: float
    source: str
    timestamp: str


class GeoCache:
    """Persistent key -> coordinate store, append-only within a run.

    Existing entries are never mutated or removed: the first resolution of a
    key is pinned, later additions for the same key are ignored.
    """

    def __init__(self) -> None:
        self._entries: dict[str, CacheEntry] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def get(self, key: str) -> CacheEntry | None:
        return self._entries.get(key)

    def add(self, key: str, lat: float, lon: float, source: str,
            timestamp: str | None = None) -> None:
        if key in self._entries:
            return
        if timestamp is None:
            timestamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        GeoPoint(lat, lon, source)  # bounds check
        self._entries[key] = CacheEntry(lat, lon, source, timestamp)

    @classmethod
    def load(cls, path: str | Path) -> "GeoCache":
        cache = cls()
        path = Path(path)
        if not path.exists():
            return cache
        lines = path.read_text(encoding="utf-8").splitlines()
        for line_no, line in enumerate(lines, start=1):
            if not line.strip() or line.startswith("key\t"):
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise GeocodeError(f"{path}:{line_no}: expected 5 cache columns")
            key, lat, lon, source, ts = fields
            cache.add(key, float(lat), float(lon), source, ts)
        return cache

    def save(self, path: str | Path) -> None:
        """Rewrite the cache file with every entry, sorted by key."""
        lines = ["\t".join(CACHE_HEADER)]
        for key in sorted(self._entries):
            e = self._entries[key]
            lines.append(f"{key}\t{e.lat:.6f}\t{e.lon:.6f}\t{e.source}\t{e.timestamp}")
        try:
            Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as exc:
            raise GeocodeError(f"cache write failed: {exc}") from exc


def load_gazetteer(path: str | Path | None = None) -> dict[str, tuple[float, float]]:
    """Load a gazetteer TSV (key, lat, lon); defaults to the bundled file."""
    if path is None:
        text = resources.files("patmaps.data").joinpath("gazetteer.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    table: dict[str, tuple[float, float]] = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#") or line.startswith("key\t"):
            continue
        key, lat, lon = line.split("\t")
        table[key] = (float(lat), float(lon))
    return table


def gazetteer_lookup(key: str,
                     gazetteer: Mapping[str, tuple[float, float]] | None = None,
                     ) -> GeoPoint | None:
    """Exact-key gazetteer lookup; a miss returns None, never a guess."""
    if gazetteer is None:
        gazetteer = load_gazetteer()
    hit = gazetteer.get(key)
    if hit is None:
        return None
    return GeoPoint(hit[0], hit[1], "gazetteer")


def geocode_batch(keys: Iterable[str],
                  cache: GeoCache,
                  provider: Provider | None = None,
                  gazetteer: Mapping[str, tuple[float, float]] | None = None,
                  ) -> tuple[dict[str, GeoPoint], set[str]]:
    """Resolve city keys to coordinates.

    Cache hits never touch the provider. New resolutions are written back to
    the cache object (persisting it is the caller's job). Provider failures
    for a key only move that key to the unresolved set.
    """
    resolved: dict[str, GeoPoint] = {}
    unresolved: set[str] = set()
    for key in sorted(set(keys)):
        entry = cache.get(key)
        if entry is not None:
            resolved[key] = GeoPoint(entry.lat, entry.lon, "cache")
            continue
        point = None
        if provider is not None:
            try:
                hit = provider(key)
            except Exception as exc:
                log.warning("provider failed for %r: %s", key, exc)
                hit = None
            if hit is not None:
                point = GeoPoint(hit[0], hit[1], "provider")
        if point is None and gazetteer is not None:
            point = gazetteer_lookup(key, gazetteer)
        if point is None:
            unresolved.add(key)
            continue
        cache.add(key, point.lat, point.lon, point.source)
        resolved[key] = point
    return resolved, unresolved


class UrlTemplateProvider:
    """HTTP provider driven by a URL template with a ``{query}`` placeholder.

    The response body may be JSON ([lat, lon] or an object with lat/lon
    fields) or a plain "lat,lon" line. No authentication is embedded; put
    API keys in the template itself if the service needs one.
    """

    def __init__(self, template: str, timeout: float = 10.0) -> None:
        if "{query}" not in template:
            raise GeocodeError("provider URL template needs a {query} placeholder")
        self.template = template
        self.timeout = timeout

    def __call__(self, key: str) -> tuple[float, float] | None:
        url = self.template.format(query=quote(key))
        with urllib.request.urlopen(url, timeout=self.timeout) as resp:
            body = resp.read().decode("utf-8").strip()
        return self._parse(body)

    @staticmethod
    def _parse(body: str) -> tuple[float, float] | None:
        if not body:
            return None
        try:
            data = json.loads(body)
        except json.JSONDecodeError:
            first = body.splitlines()[0]
            lat, lon = first.split(",")[:2]
            return float(lat), float(lon)
        if isinstance(data, (list, tuple)) and len(data) >= 2:
            return float(data[0]), float(data[1])
        if isinstance(data, dict):
            lat = data.get("lat", data.get("latitude"))
            lon = data.get("lon", data.get("lng", data.get("longitude")))
            if lat is not None and lon is not None:
                return float(lat), float(lon)
        return None
