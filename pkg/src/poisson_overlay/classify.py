"""Enumerate 0-pierced, 0-filled and T00 triangles of an overlay.

Cells of a line arrangement are convex.  Three points with identical side
signs against every line therefore span a triangle no line meets, and any line
meeting a triangle separates two of its vertices.  Bucketing points by their
sign vector gives all 0-pierced triangles without testing a single segment.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import geometry as geo
from ._parallel import ordered_map
from .geometry import AngleTriple
from .processes import Overlay, SeedSpec, sample_overlay

KINDS = ("pierced", "filled", "t00")
DEFAULT_FILLED_CAP = 400
DEFAULT_INNER_MARGIN = 4.0


class FilledCapExceeded(RuntimeError):
    """0-filled enumeration refused: too many points for the cubic-cost search."""

    def __init__(self, n: int, cap: int):
        super().__init__(f"0-filled enumeration needs n <= {cap} points, overlay has n = {n}")
        self.n = n
        self.cap = cap


@dataclass(frozen=True)
class TriangleRecord:
    i: int
    j: int
    k: int
    angles: AngleTriple
    pierced_free: bool
    filled_free: bool

    @property
    def indices(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)


@dataclass
class Enumeration:
    """Index triples (T, 3), with i < j < k per row, plus a tally of dropped collinear triples."""

    triples: np.ndarray
    n_degenerate: int = 0


def _empty_triples() -> np.ndarray:
    return np.zeros((0, 3), dtype=np.int64)


def signatures(ov: Overlay) -> np.ndarray:
    """(n_points, n_lines) matrix of side signs; row q is the cell signature of point q."""
    return geo.side_signs(ov.points, ov.lines)


def _drop_degenerate(points: np.ndarray, triples: np.ndarray) -> tuple[np.ndarray, int]:
    if not len(triples):
        return triples, 0
    bad = geo.degenerate_mask(points[triples[:, 0]], points[triples[:, 1]], points[triples[:, 2]])
    return triples[~bad], int(bad.sum())


def cells(ov: Overlay) -> list[np.ndarray]:
    """Point indices grouped by cell signature (ascending within each group)."""
    if ov.n_lines == 0:
        return [np.arange(ov.n_points)] if ov.n_points else []
    packed = np.packbits(signatures(ov) > 0, axis=1)
    groups: dict[bytes, list[int]] = defaultdict(list)
    for idx, row in enumerate(packed):
        groups[row.tobytes()].append(idx)
    return [np.asarray(g, dtype=np.int64) for g in groups.values()]


def _combinations(idx: np.ndarray) -> np.ndarray:
    k = len(idx)
    if k < 3:
        return _empty_triples()
    combos = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(k), 3)),
                         dtype=np.int64, count=3 * math.comb(k, 3)).reshape(-1, 3)
    return idx[combos]


def pierced_triples(ov: Overlay) -> Enumeration:
    parts = [_combinations(g) for g in cells(ov) if len(g) >= 3]
    triples = np.concatenate(parts) if parts else _empty_triples()
    triples, n_bad = _drop_degenerate(ov.points, triples)
    return Enumeration(_sort_rows(triples), n_bad)


def _sort_rows(triples: np.ndarray) -> np.ndarray:
    if not len(triples):
        return triples
    triples = np.sort(triples, axis=1)
    order = np.lexsort((triples[:, 2], triples[:, 1], triples[:, 0]))
    return triples[order]


def empty_triangle_triples(points: np.ndarray) -> Enumeration:
    """All triples spanning a triangle with no other point strictly inside.

    O(n^3) via below-segment counts: with points sorted by x, B[a, b] counts
    points strictly between a and b in x order and below segment ab.  For
    ranks a < b < c the interior count is B[a,b] + B[b,c] - B[a,c] when b lies
    above ac, and B[a,c] - B[a,b] - B[b,c] - 1 when it lies below.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(points)
    if n < 3:
        return Enumeration(_empty_triples())
    order = np.lexsort((points[:, 1], points[:, 0]))
    P = points[order]
    B = np.zeros((n, n), dtype=np.int64)
    for a in range(n - 1):
        d = P[a + 1:] - P[a]
        cross = np.outer(d[:, 0], d[:, 1]) - np.outer(d[:, 1], d[:, 0])  # [b, p]
        B[a, a + 1:] = np.tril(cross < 0.0, k=-1).sum(axis=1)

    found = []
    for a in range(n - 2):
        rest = np.arange(a + 1, n)
        bi, ci = np.triu_indices(len(rest), 1)
        b, c = rest[bi], rest[ci]
        ac = P[c] - P[a]
        ab = P[b] - P[a]
        above = ac[:, 0] * ab[:, 1] - ac[:, 1] * ab[:, 0] > 0.0
        inside = np.where(above, B[a, b] + B[b, c] - B[a, c], B[a, c] - B[a, b] - B[b, c] - 1)
        keep = inside == 0
        if keep.any():
            found.append(np.column_stack([np.full(int(keep.sum()), a), b[keep], c[keep]]))
    if not found:
        return Enumeration(_empty_triples())
    triples = order[np.concatenate(found)]
    triples, n_bad = _drop_degenerate(points, triples)
    return Enumeration(_sort_rows(triples), n_bad)


def filled_triples(ov: Overlay, filled_cap: int = DEFAULT_FILLED_CAP) -> Enumeration:
    if ov.n_points > filled_cap:
        raise FilledCapExceeded(ov.n_points, filled_cap)
    return empty_triangle_triples(ov.points)


def t00_triples(ov: Overlay) -> Enumeration:
    """Triangles both 0-pierced and 0-filled.

    A point inside a 0-pierced triangle shares its cell, so the emptiness test
    only needs the other points of the same cell.
    """
    parts = []
    n_bad = 0
    for g in cells(ov):
        if len(g) < 3:
            continue
        sub = empty_triangle_triples(ov.points[g])
        n_bad += sub.n_degenerate
        if len(sub.triples):
            parts.append(g[sub.triples])
    triples = np.concatenate(parts) if parts else _empty_triples()
    return Enumeration(_sort_rows(triples), n_bad)


def triple_angles(points: np.ndarray, triples: np.ndarray) -> np.ndarray:
    """(T, 3) angles at vertices i, j, k of each row."""
    if not len(triples):
        return np.zeros((0, 3))
    return geo.triangle_angles(points[triples[:, 0]], points[triples[:, 1]], points[triples[:, 2]])


# ---------------------------------------------------------------------------
# record-level API


def _closed_contains(points: np.ndarray, a, b, c) -> np.ndarray:
    def cross(p, q, r):
        return (q[0] - p[0]) * (r[:, 1] - p[1]) - (q[1] - p[1]) * (r[:, 0] - p[0])

    d1, d2, d3 = cross(a, b, points), cross(b, c, points), cross(c, a, points)
    has_neg = (d1 < 0) | (d2 < 0) | (d3 < 0)
    has_pos = (d1 > 0) | (d2 > 0) | (d3 > 0)
    return ~(has_neg & has_pos)


def is_zero_filled(ov: Overlay, rec: TriangleRecord | tuple[int, int, int]) -> bool:
    """True if no overlay point other than the vertices lies in the closed triangle."""
    i, j, k = rec.indices if isinstance(rec, TriangleRecord) else rec
    pts = ov.points
    inside = _closed_contains(pts, pts[i], pts[j], pts[k])
    inside[[i, j, k]] = False
    return not inside.any()


def _records(ov: Overlay, triples: np.ndarray, pierced: np.ndarray, filled: np.ndarray) -> list[TriangleRecord]:
    angs = triple_angles(ov.points, triples)
    return [
        TriangleRecord(int(t[0]), int(t[1]), int(t[2]), AngleTriple(*map(float, a)), bool(p), bool(f))
        for t, a, p, f in zip(triples, angs, pierced, filled)
    ]


def _same_cell(ov: Overlay, triples: np.ndarray) -> np.ndarray:
    if not len(triples):
        return np.zeros(0, dtype=bool)
    sig = signatures(ov)
    return np.all(sig[triples[:, 0]] == sig[triples[:, 1]], axis=1) & np.all(
        sig[triples[:, 0]] == sig[triples[:, 2]], axis=1
    )


def _rows_in(triples: np.ndarray, reference: np.ndarray) -> np.ndarray:
    ref = {tuple(t) for t in reference.tolist()}
    return np.array([tuple(t) in ref for t in triples.tolist()], dtype=bool)


def zero_pierced_triangles(ov: Overlay) -> list[TriangleRecord]:
    triples = pierced_triples(ov).triples
    filled = _rows_in(triples, t00_triples(ov).triples)
    return _records(ov, triples, np.ones(len(triples), dtype=bool), filled)


def zero_pierced_bruteforce(ov: Overlay) -> list[TriangleRecord]:
    """Direct definition: no line meets any of the three sides.  O(n^3 m)."""
    n = ov.n_points
    lines = [ov.line(m) for m in range(ov.n_lines)]
    pts = [ov.point(q) for q in range(n)]
    blocked = np.zeros((n, n), dtype=bool)
    for a in range(n):
        for b in range(a + 1, n):
            hit = any(geo.segment_hits_line(L, pts[a], pts[b]) for L in lines)
            blocked[a, b] = blocked[b, a] = hit
    out = []
    for i, j, k in itertools.combinations(range(n), 3):
        if blocked[i, j] or blocked[j, k] or blocked[i, k]:
            continue
        tri = geo.Triangle(pts[i], pts[j], pts[k])
        if geo.is_degenerate(tri):
            continue
        out.append(TriangleRecord(i, j, k, geo.angles(tri), True, is_zero_filled(ov, (i, j, k))))
    return out


def zero_filled_bruteforce(ov: Overlay) -> list[tuple[int, int, int]]:
    """O(n^4) double loop over triples and points using the closed-triangle test."""
    pts = [ov.point(q) for q in range(ov.n_points)]
    out = []
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        tri = geo.Triangle(pts[i], pts[j], pts[k])
        if geo.is_degenerate(tri):
            continue
        if not any(geo.contains_point(tri, pts[q]) for q in range(len(pts)) if q not in (i, j, k)):
            out.append((i, j, k))
    return out


def classify_all(
    ov: Overlay,
    kinds=("pierced", "filled", "t00"),
    filled_cap: int = DEFAULT_FILLED_CAP,
) -> dict[str, list[TriangleRecord]]:
    """Records for each requested kind, keyed by kind name."""
    kinds = set(kinds)
    unknown = kinds - set(KINDS)
    if unknown:
        raise ValueError(f"unknown triangle kinds {sorted(unknown)}; choose from {KINDS}")
    out: dict[str, list[TriangleRecord]] = {}
    t00 = t00_triples(ov).triples if kinds & {"pierced", "t00"} else None
    if "pierced" in kinds:
        triples = pierced_triples(ov).triples
        out["pierced"] = _records(ov, triples, np.ones(len(triples), bool), _rows_in(triples, t00))
    if "filled" in kinds:
        triples = filled_triples(ov, filled_cap).triples
        out["filled"] = _records(ov, triples, _same_cell(ov, triples), np.ones(len(triples), bool))
    if "t00" in kinds:
        out["t00"] = _records(ov, t00, np.ones(len(t00), bool), np.ones(len(t00), bool))
    return out


# ---------------------------------------------------------------------------
# intensity estimation


def triples_of_kind(ov: Overlay, kind: str, filled_cap: int = DEFAULT_FILLED_CAP) -> Enumeration:
    if kind == "pierced":
        return pierced_triples(ov)
    if kind == "t00":
        return t00_triples(ov)
    if kind == "filled":
        return filled_triples(ov, filled_cap)
    raise ValueError(f"unknown triangle kind {kind!r}; choose from {KINDS}")


def count_in_window(points: np.ndarray, triples: np.ndarray, radius: float) -> int:
    """Triangles whose centroid lies within ``radius`` of the origin."""
    if not len(triples):
        return 0
    centroid = points[triples].mean(axis=1)
    return int((np.hypot(centroid[:, 0], centroid[:, 1]) < radius).sum())


def _trial_count(trial: int, kind: str, lam: float, inner: float, master_seed: int) -> int:
    ov = sample_overlay(lam, SeedSpec(master_seed, trial))
    return count_in_window(ov.points, triples_of_kind(ov, kind).triples, inner)


def estimate_intensity(
    kind: str,
    lam: float,
    inner_margin: float = DEFAULT_INNER_MARGIN,
    trials: int = 500,
    seed: int = 0,
    workers: int = 1,
) -> tuple[float, float]:
    """Triangles per unit area by minus-sampling on the centroid.

    Returns (mean over trials, across-trial standard error); the standard
    error is NaN for a single trial.
    """
    if kind not in ("pierced", "t00"):
        raise ValueError(f"intensity is estimated for 'pierced' or 't00', got {kind!r}")
    if not lam > inner_margin > 0:
        raise ValueError(f"need lambda > inner_margin > 0, got lambda={lam}, inner_margin={inner_margin}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    inner = lam - inner_margin
    area = math.pi * inner * inner
    counts = ordered_map(partial(_trial_count, kind=kind, lam=lam, inner=inner, master_seed=seed),
                         range(trials), workers)
    rates = np.asarray(counts, dtype=float) / area
    stderr = float(rates.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan
    return float(rates.mean()), stderr
