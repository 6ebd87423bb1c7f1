"""Classification-space analysis.

Builds class proportion vectors per window, derives a disparity matrix from
aggregated class-to-class citation counts as 1 minus the cosine between
class citation profiles, and combines both into the Rao-Stirling diversity
sum_ij p_i p_j d_ij. Also provides rank correlation between diversity
series and a stress layout that turns a disparity matrix into a base map.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .network import CityGraph, kamada_kawai
from .records import PatentRecord, record_classes

log = logging.getLogger(__name__)

RAO_HEADER = ("window", "delta_ipc3", "delta_ipc4", "n_patents")


@dataclass(frozen=True)
class ClassVector:
    """Class proportions of one window at one truncation level."""

    window: str
    level: int
    p: dict[str, float]
    n_patents: int


def class_proportions(records: Iterable[PatentRecord], level: int,
                      counting: str = "fractional",
                      window: str = "") -> ClassVector | None:
    """Proportion of patents per class; None when nothing contributes.

    Fractional counting splits each patent evenly over its m distinct
    classes; whole counting gives every class a full count and renormalizes.
    Either way the proportions sum to 1.
    """
    if counting not in ("fractional", "whole"):
        raise ValueError(f"counting must be fractional or whole, got {counting!r}")
    totals: dict[str, float] = {}
    n_patents = 0
    for record in records:
        classes = sorted(record_classes(record, level))
        if not classes:
            continue
        n_patents += 1
        share = 1.0 / len(classes) if counting == "fractional" else 1.0
        for c in classes:
            totals[c] = totals.get(c, 0.0) + share
    if n_patents == 0:
        return None
    norm = sum(totals.values())
    p = {c: totals[c] / norm for c in sorted(totals)}
    return ClassVector(window, level, p, n_patents)


@dataclass(frozen=True)
class CitationMatrix:
    """Aggregated citing-to-cited counts over a class universe."""

    classes: tuple[str, ...]
    counts: np.ndarray

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str, float]]) -> "CitationMatrix":
        """Accumulate (citing, cited, count) triples; unseen classes extend
        the universe, malformed triples raise."""
        acc: dict[tuple[str, str], float] = {}
        universe: set[str] = set()
        for citing, cited, count in pairs:
            if not citing or not cited:
                raise ValueError(f"empty class in citation pair ({citing!r}, {cited!r})")
            count = float(count)
            if count < 0:
                raise ValueError(f"negative citation count for ({citing}, {cited})")
            universe.update((citing, cited))
            acc[(citing, cited)] = acc.get((citing, cited), 0.0) + count
        classes = tuple(sorted(universe))
        index = {c: i for i, c in enumerate(classes)}
        counts = np.zeros((len(classes), len(classes)))
        for (a, b), v in acc.items():
            counts[index[a], index[b]] = v
        return cls(classes, counts)


def read_citation_pairs(path: str | Path, level: int | None = None,
                        ) -> CitationMatrix:
    """Read a citation-pair TSV (citing_class, cited_class, count).

    With a level, class codes are truncated before accumulation so one pairs
    file can drive both 3- and 4-character matrices. Malformed lines raise
    with the line number.
    """
    from .records import truncate_ipc

    triples = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#") or line.startswith("citing"):
            continue
        cells = line.split("\t")
        if len(cells) != 3:
            raise ConfigError(f"{path}:{line_no}: expected 3 columns")
        try:
            citing, cited, count = cells[0].strip(), cells[1].strip(), float(cells[2])
            if level is not None:
                citing = truncate_ipc(citing, level)
                cited = truncate_ipc(cited, level)
        except ValueError as exc:
            raise ConfigError(f"{path}:{line_no}: {exc}") from exc
        triples.append((citing, cited, count))
    return CitationMatrix.from_pairs(triples)


@dataclass(frozen=True)
class DisparityMatrix:
    """Symmetric zero-diagonal class distances in [0, 1]."""

    classes: tuple[str, ...]
    d: np.ndarray

    def submatrix(self, wanted: Sequence[str]) -> np.ndarray:
        index = {c: i for i, c in enumerate(self.classes)}
        missing = [c for c in wanted if c not in index]
        if missing:
            raise ConfigError(f"classes missing from disparity matrix: {missing}")
        idx = [index[c] for c in wanted]
        return self.d[np.ix_(idx, idx)]


def profile_disparity(u: Sequence[float], v: Sequence[float]) -> float:
    """1 - cosine between two citation profiles; all-zero profiles score 1."""
    a = np.asarray(u, dtype=float)
    b = np.asarray(v, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 1.0
    return float(np.clip(1.0 - float(a @ b) / (na * nb), 0.0, 1.0))


def disparity_from_citations(cm: CitationMatrix) -> DisparityMatrix:
    """Disparity matrix from a citation matrix.

    A class's profile is its citing row concatenated with its cited column,
    so both directions of the aggregated citation pattern count. Classes
    with an all-zero profile get disparity 1 against everything (cosine is
    undefined for them) and a warning is logged. The diagonal is forced to
    zero and values are clamped to [0, 1].
    """
    n = len(cm.classes)
    profiles = np.hstack([cm.counts, cm.counts.T])
    norms = np.linalg.norm(profiles, axis=1)
    dead = norms == 0.0
    for c in np.array(cm.classes)[dead]:
        log.warning("class %s has an all-zero citation profile; disparity set to 1", c)
    safe = np.where(dead, 1.0, norms)
    cos = (profiles @ profiles.T) / np.outer(safe, safe)
    d = 1.0 - cos
    d[dead, :] = 1.0
    d[:, dead] = 1.0
    d = (d + d.T) / 2.0
    d = np.clip(d, 0.0, 1.0)
    np.fill_diagonal(d, 0.0)
    return DisparityMatrix(cm.classes, d)


def write_disparity(dm: DisparityMatrix, path: str | Path) -> None:
    """Write a disparity matrix as a TSV with class labels on both axes."""
    lines = ["\t" + "\t".join(dm.classes)]
    for i, c in enumerate(dm.classes):
        lines.append(c + "\t" + "\t".join(f"{v:.9f}" for v in dm.d[i]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_disparity(path: str | Path) -> DisparityMatrix:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ConfigError(f"{path}: empty disparity file")
    classes = tuple(lines[0].split("\t")[1:])
    n = len(classes)
    d = np.zeros((n, n))
    if len(lines) - 1 != n:
        raise ConfigError(f"{path}: expected {n} matrix rows, got {len(lines) - 1}")
    for i, line in enumerate(lines[1:]):
        cells = line.split("\t")
        if cells[0] != classes[i] or len(cells) != n + 1:
            raise ConfigError(f"{path}: row {i + 2} does not match the header")
        d[i] = [float(v) for v in cells[1:]]
    if not np.allclose(d, d.T) or not np.allclose(np.diag(d), 0.0):
        raise ConfigError(f"{path}: matrix must be symmetric with a zero diagonal")
    return DisparityMatrix(classes, d)


def rao_stirling(p: Mapping[str, float], dm: DisparityMatrix) -> float:
    """Diversity sum over all ordered class pairs of p_i p_j d_ij.

    The zero diagonal kills the i == j terms, so with a symmetric matrix
    this equals twice the sum over unordered pairs. Classes absent from the
    disparity matrix are a fatal configuration error.
    """
    classes = sorted(p)
    vec = np.array([p[c] for c in classes])
    sub = dm.submatrix(classes)
    return float(vec @ sub @ vec)


@dataclass(frozen=True)
class DiversityPoint:
    window: str
    n_patents: int
    delta3: float | None = None
    delta4: float | None = None


def diversity_series(windows: Iterable[tuple[str, Sequence[PatentRecord]]],
                     matrices: Mapping[int, DisparityMatrix],
                     counting: str = "fractional") -> list[DiversityPoint]:
    """Rao-Stirling diversity per window at each requested level.

    Windows without classified patents are skipped (and logged), matching
    an undefined proportion vector.
    """
    points = []
    for window, records in windows:
        deltas: dict[int, float] = {}
        n_patents = 0
        for level, dm in sorted(matrices.items()):
            vector = class_proportions(records, level, counting, window)
            if vector is None:
                continue
            deltas[level] = rao_stirling(vector.p, dm)
            n_patents = vector.n_patents
        if not deltas:
            log.info("window %s has no classified patents; skipped in series", window)
            continue
        points.append(DiversityPoint(window, n_patents,
                                     deltas.get(3), deltas.get(4)))
    return points


def write_rao_csv(points: Iterable[DiversityPoint], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RAO_HEADER)
        for pt in points:
            writer.writerow([
                pt.window,
                "" if pt.delta3 is None else f"{pt.delta3:.9f}",
                "" if pt.delta4 is None else f"{pt.delta4:.9f}",
                pt.n_patents,
            ])


def _average_ranks(values: Sequence[float]) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    sorted_vals = np.asarray(values)[order]
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(a: Sequence[float], b: Sequence[float]) -> float:
    """Spearman rank correlation with average ranks for ties."""
    if len(a) != len(b):
        raise ValueError(f"series lengths differ: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ValueError("need at least 2 aligned points")
    ra = _average_ranks(a)
    rb = _average_ranks(b)
    da = ra - ra.mean()
    db = rb - rb.mean()
    denom = math.sqrt(float((da * da).sum()) * float((db * db).sum()))
    if denom == 0.0:
        raise ValueError("a constant series has no rank correlation")
    return float((da * db).sum()) / denom


@dataclass(frozen=True)
class BaseMap:
    """Fixed 2-D positions for classes; the background of class overlays."""

    coords: dict[str, tuple[float, float]]
    provenance: str  # computed | user-supplied
    threshold: float | None = None
    seed: int | None = None

    def require(self, classes: Iterable[str]) -> None:
        missing = sorted(set(classes) - set(self.coords))
        if missing:
            raise ConfigError(f"base map does not cover classes: {missing}")


def base_map_layout(dm: DisparityMatrix, seed: int = 0,
                    threshold: float = 0.05) -> BaseMap:
    """Lay classes out by stress minimization over similarity-derived edges.

    Classes are linked when their cosine similarity (1 - disparity) reaches
    the threshold; if that graph is disconnected the threshold halves until
    it connects (at 0 every pair qualifies, since cosine similarity of
    non-negative profiles is non-negative). Edge lengths are the disparity
    values, floored to keep coincident classes apart.
    """
    n = len(dm.classes)
    if n == 0:
        return BaseMap({}, "computed", threshold, seed)
    if n == 1:
        return BaseMap({dm.classes[0]: (0.0, 0.0)}, "computed", threshold, seed)

    from .network import components

    sim = 1.0 - dm.d
    thr = threshold
    while True:
        g = CityGraph(window="basemap")
        lengths = {}
        for c in dm.classes:
            g.node_counts[c] = 1
        for i in range(n):
            for j in range(i + 1, n):
                if sim[i, j] >= thr:
                    e = (dm.classes[i], dm.classes[j]) if dm.classes[i] < dm.classes[j] \
                        else (dm.classes[j], dm.classes[i])
                    g.edges[e] = 1
                    lengths[e] = max(float(dm.d[i, j]), 1e-3)
        if len(components(g)) == 1:
            break
        # similarity of non-negative profiles is >= 0, so thr 0 always connects
        thr = thr / 2.0 if thr > 1e-6 else 0.0
        log.info("base map threshold relaxed to %g to keep connectivity", thr)
    layout = kamada_kawai(g, seed=seed, edge_length=lengths)
    return BaseMap(layout.coords, "computed", thr, seed)


def read_base_map(path: str | Path) -> BaseMap:
    """Load a user-supplied base map TSV (class, x, y); layout is bypassed."""
    coords = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#") or line.startswith("class\t"):
            continue
        cells = line.split("\t")
        if len(cells) != 3:
            raise ConfigError(f"{path}:{line_no}: expected class, x, y")
        coords[cells[0]] = (float(cells[1]), float(cells[2]))
    return BaseMap(coords, "user-supplied")


def write_base_map(bm: BaseMap, path: str | Path) -> None:
    lines = ["class\tx\ty"]
    for c in sorted(bm.coords):
        x, y = bm.coords[c]
        lines.append(f"{c}\t{x:.6f}\t{y:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


IPC_OVERLAY_HEADER = ("label", "x", "y", "weight")


def ipc_overlay_filename(level: int, first_year: int) -> str:
    return f"ipc{level}_{first_year}.txt"


def write_ipc_overlay(vector: ClassVector, base_map: BaseMap,
                      path: str | Path) -> None:
    """Write one window's class overlay: position per class, weight p_i * N."""
    base_map.require(vector.p)
    lines = ["\t".join(IPC_OVERLAY_HEADER)]
    for c in sorted(vector.p):
        if vector.p[c] <= 0.0:
            continue
        x, y = base_map.coords[c]
        weight = vector.p[c] * vector.n_patents
        lines.append(f"{c}\t{x:.6f}\t{y:.6f}\t{weight:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_ipc_overlay(path: str | Path) -> list[dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != IPC_OVERLAY_HEADER:
        raise ConfigError(f"{path}: not a class overlay file")
    rows = []
    for line in lines[1:]:
        if not line.strip():
            continue
        label, x, y, w = line.split("\t")
        rows.append({"label": label, "x": float(x), "y": float(y), "weight": float(w)})
    return rows
