"""Per-window city statistics and the overlay files built from them.

Two coloring schemes exist. The z-test scheme grades cities by whether their
share of top-cited patents departs from the expected 25%, with lighter
colors where the expected count is too small to test. The percentile scheme
grades cities by their rank share of patent counts within the window.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from statistics import NormalDist
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError

TOP_FRACTION = 0.25

ZTEST_CLASSES = (
    "dark-green", "light-green", "lime-green", "red-orange", "orange", "dark-red",
)
PERCENTILE_CLASSES = ("red", "fuchsia", "pink", "orange", "cyan", "blue")

# percent of top cities covered by each bracket, tightest first
PERCENTILE_BRACKETS = ((1, "red"), (5, "fuchsia"), (10, "pink"),
                       (25, "orange"), (50, "cyan"))

# conventional two-sided critical values; other alphas fall back to the
# exact normal quantile
_CRITICAL = {0.10: 1.645, 0.05: 1.96, 0.01: 2.576}

OVERLAY_HEADER = ("name", "desc", "latitude", "longitude", "color", "scale")
GEO_TABLE_HEADER = ("window", "city", "n", "k", "expected", "z", "color", "lat", "lon")


def critical_value(alpha: float) -> float:
    if alpha in _CRITICAL:
        return _CRITICAL[alpha]
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return NormalDist().inv_cdf(1.0 - alpha / 2.0)


def top_cited_threshold(citations: Iterable[int], fraction: float = TOP_FRACTION) -> int:
    """Citation count a patent needs to sit in the top ``fraction`` of the set.

    The threshold is the largest attained citation count whose tail share
    reaches the fraction; boundary ties are included, so the realized share
    may exceed it. A record is top-cited iff its citations >= threshold.
    """
    values = sorted(citations, reverse=True)
    if not values:
        raise ValueError("no citation counts given")
    if any(v is None for v in values):
        raise ValueError("citation counts contain missing values")
    n = len(values)
    # smallest k with k/n >= fraction; the epsilon guards float round-up
    k0 = max(1, math.ceil(fraction * n - 1e-9))
    return values[k0 - 1]


def ztest_proportion(n: int, k: int, p0: float = TOP_FRACTION) -> float:
    """One-sample z statistic for an observed share k/n against p0."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    return (k / n - p0) / math.sqrt(p0 * (1.0 - p0) / n)


def classify_ztest(n: int, k: int, z: float, p0: float = TOP_FRACTION,
                   alpha: float = 0.05) -> str:
    """Map a city's (n, k, z) to one of the six excellence color classes.

    Cities whose expected top-cited count p0*n is below 5 are not tested:
    they turn lime-green at or above the expected share and red-orange
    below it. Tested cities turn dark-green/dark-red when significant and
    light-green/orange otherwise.
    """
    if p0 * n < 5.0:
        return "lime-green" if k / n >= p0 else "red-orange"
    crit = critical_value(alpha)
    if z >= crit:
        return "dark-green"
    if z <= -crit:
        return "dark-red"
    return "light-green" if z >= 0 else "orange"


def percentile_classes(city_counts: Mapping[str, int]) -> dict[str, str]:
    """Assign each city the tightest rank-share bracket that covers it.

    Cities rank by patent count descending; a rank r city belongs to the
    top-q% bracket when r <= ceil(q * total / 100). Tie groups share the
    rank of their best member, so equal counts share the better bracket.
    """
    if not city_counts:
        raise ValueError("at least one city required")
    total = len(city_counts)
    ranked = sorted(city_counts, key=lambda c: (-city_counts[c], c))
    classes: dict[str, str] = {}
    group_rank = 1
    for pos, city in enumerate(ranked, start=1):
        if pos > 1 and city_counts[city] != city_counts[ranked[pos - 2]]:
            group_rank = pos
        for pct, name in PERCENTILE_BRACKETS:
            if group_rank * 100 <= pct * total + 99:  # r <= ceil(pct*total/100)
                classes[city] = name
                break
        else:
            classes[city] = "blue"
    return classes


def node_scale(n: int) -> float:
    """Overlay node scale log10(n + 1); the +1 keeps single-patent cities visible."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return math.log10(n + 1)


@dataclass(frozen=True)
class CityStats:
    """Statistics of one city in one window, under one color scheme."""

    city: str
    n: int
    color: str
    k: int | None = None
    expected: float | None = None
    z: float | None = None

    @property
    def scale(self) -> float:
        return node_scale(self.n)

    @property
    def desc(self) -> str:
        if self.z is not None:
            return (f"n={self.n}; top_cited={self.k}; "
                    f"expected={self.expected:g}; z={self.z:.3f}")
        return f"n={self.n}; class={self.color}"


def ztest_city_stats(city_counts: Mapping[str, int],
                     top_counts: Mapping[str, int],
                     p0: float = TOP_FRACTION,
                     alpha: float = 0.05) -> list[CityStats]:
    """Z-test scheme statistics for every city of a window."""
    stats = []
    for city in sorted(city_counts):
        n = city_counts[city]
        k = top_counts.get(city, 0)
        z = ztest_proportion(n, k, p0)
        color = classify_ztest(n, k, z, p0, alpha)
        stats.append(CityStats(city, n, color, k=k, expected=p0 * n, z=z))
    return stats


def percentile_city_stats(city_counts: Mapping[str, int]) -> list[CityStats]:
    """Percentile scheme statistics for every city of a window."""
    if not city_counts:
        return []
    classes = percentile_classes(city_counts)
    return [CityStats(city, city_counts[city], classes[city])
            for city in sorted(city_counts)]


def overlay_filename(scheme: str, first_year: int) -> str:
    prefix = {"ztest": "z", "percentile": "pat"}.get(scheme)
    if prefix is None:
        raise ConfigError(f"unknown scheme: {scheme!r}")
    return f"{prefix}{first_year}.txt"


def write_overlay(path: str | Path,
                  stats: Sequence[CityStats],
                  points: Mapping[str, tuple[float, float]],
                  links: Iterable[tuple[str, str, int]] = ()) -> list[str]:
    """Write one window's overlay file; returns the cities left out.

    Cities without coordinates are omitted (the caller logs them). The city
    rows are followed by a '#links' segment listing co-occurrence polylines
    between emitted cities. An empty window writes the header only.
    """
    lines = ["\t".join(OVERLAY_HEADER)]
    emitted = set()
    skipped = []
    for s in stats:
        pt = points.get(s.city)
        if pt is None:
            skipped.append(s.city)
            continue
        emitted.add(s.city)
        lines.append("\t".join((
            s.city, s.desc, f"{pt[0]:.6f}", f"{pt[1]:.6f}", s.color, f"{s.scale:.5f}",
        )))
    link_rows = [(a, b, w) for a, b, w in links if a in emitted and b in emitted]
    if link_rows:
        lines.append("#links")
        for a, b, w in sorted(link_rows):
            lines.append(f"{a}\t{b}\t{w}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return skipped


def read_overlay(path: str | Path) -> tuple[list[dict], list[tuple[str, str, int]]]:
    """Parse an overlay file back into city rows and link triples."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != OVERLAY_HEADER:
        raise ConfigError(f"{path}: not an overlay file")
    cities = []
    links: list[tuple[str, str, int]] = []
    in_links = False
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.startswith("#links"):
            in_links = True
            continue
        cells = line.split("\t")
        if in_links:
            links.append((cells[0], cells[1], int(cells[2])))
        else:
            cities.append({
                "name": cells[0],
                "desc": cells[1],
                "lat": float(cells[2]),
                "lon": float(cells[3]),
                "color": cells[4],
                "scale": float(cells[5]),
            })
    return cities, links


def write_geo_table(path: str | Path,
                    rows: Iterable[tuple[str, CityStats, "tuple[float, float] | None"]],
                    ) -> None:
    """Write geo.csv: one row per (window, city); overwritten on each run."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(GEO_TABLE_HEADER)
        for window, s, pt in rows:
            writer.writerow([
                window,
                s.city,
                s.n,
                "" if s.k is None else s.k,
                "" if s.expected is None else f"{s.expected:.2f}",
                "" if s.z is None else f"{s.z:.6f}",
                s.color,
                "" if pt is None else f"{pt[0]:.6f}",
                "" if pt is None else f"{pt[1]:.6f}",
            ])
