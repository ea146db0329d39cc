"""Histograms, goodness of fit, and clustered standard errors."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats as _sps

from ..analytic.quadrature import integrate_1d

HEADER = ("bin_left", "bin_right", "count", "density_empirical", "density_analytic")
MIN_EXPECTED = 5.0
NORMALIZATION_TOL = 1e-6


@dataclass(frozen=True)
class Histogram:
    edges: tuple[float, ...]
    counts: tuple[int, ...]
    overflow: int = field(default=0, compare=False)
    mode: str = field(default="raw", compare=False)

    def __post_init__(self):
        if len(self.counts) != len(self.edges) - 1:
            raise ValueError("need len(counts) == len(edges) - 1")
        if self.mode not in ("raw", "density"):
            raise ValueError(f"mode must be 'raw' or 'density', got {self.mode!r}")

    @property
    def total(self) -> int:
        return int(sum(self.counts))

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.asarray(self.edges))

    def density(self) -> np.ndarray:
        """Counts scaled so the histogram has unit area."""
        if self.total == 0:
            return np.zeros(len(self.counts))
        return np.asarray(self.counts, dtype=float) / (self.total * self.widths)

    def values(self) -> np.ndarray:
        return self.density() if self.mode == "density" else np.asarray(self.counts, dtype=float)

    def normalized(self) -> Histogram:
        return Histogram(self.edges, self.counts, self.overflow, "density")


def _bin_index(samples: np.ndarray, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bin of each in-range sample under [e_b, e_{b+1}); returns (indices, in-range mask)."""
    inside = (samples >= edges[0]) & (samples < edges[-1])
    idx = np.searchsorted(edges, samples[inside], side="right") - 1
    return idx, inside


def build_histogram(samples, bins: int, range: tuple[float, float]) -> Histogram:
    """Equal-width histogram with half-open bins [e_b, e_{b+1}) covering [lo, hi).

    Samples outside [lo, hi), including a sample equal to ``hi``, are tallied as overflow.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError("cannot histogram an empty sample")
    lo, hi = range
    if bins < 1 or not lo < hi:
        raise ValueError(f"need bins >= 1 and lo < hi, got bins={bins}, range={range}")
    edges = np.linspace(lo, hi, bins + 1)
    idx, inside = _bin_index(samples, edges)
    counts = np.bincount(idx, minlength=bins)
    return Histogram(tuple(map(float, edges)), tuple(map(int, counts)), int((~inside).sum()))


def bin_probabilities(edges: Sequence[float], density: Callable, *, vectorized: bool = True,
                      tol: float = 1e-11) -> np.ndarray:
    return np.array([
        integrate_1d(density, lo, hi, tol, vectorized=vectorized)[0]
        for lo, hi in zip(edges[:-1], edges[1:])
    ])


def merge_sparse_bins(expected: np.ndarray, minimum: float = MIN_EXPECTED) -> list[list[int]]:
    """Group adjacent bins left to right until each group expects >= ``minimum``.

    A short remainder at the right end joins the last complete group.
    """
    groups: list[list[int]] = []
    current: list[int] = []
    acc = 0.0
    for i, e in enumerate(expected):
        current.append(i)
        acc += e
        if acc >= minimum:
            groups.append(current)
            current, acc = [], 0.0
    if current:
        if groups:
            groups[-1].extend(current)
        else:
            groups.append(current)
    return groups


@dataclass(frozen=True)
class GofResult:
    """Pearson statistic, degrees of freedom, p-value and L1 distance.

    ``p_value`` is the chi-square tail at ``chi2 / design_effect``; the design
    effect is 1 for independent samples.
    """

    chi2: float
    dof: int
    p_value: float
    l1: float
    design_effect: float = 1.0


def _design_effect(cluster_counts: np.ndarray, groups: list[list[int]]) -> float:
    """Mean over bin groups of (clustered variance) / (multinomial variance) of the bin share.

    This is the first-order Rao-Scott correction for samples pooled from
    independent clusters whose members are dependent.
    """
    c = np.column_stack([cluster_counts[:, g].sum(axis=1) for g in groups]).astype(float)
    k = len(c)
    n = c.sum(axis=1)
    N = n.sum()
    if k < 2 or N == 0:
        return 1.0
    share = c.sum(axis=0) / N
    resid = c - np.outer(n, share)
    clustered = k / (k - 1) * np.sum(resid**2, axis=0) / N**2
    simple = share * (1.0 - share) / N
    ok = simple > 0
    if not ok.any():
        return 1.0
    return float(np.mean(clustered[ok] / simple[ok]))


def cluster_bin_counts(samples_per_cluster: Sequence[np.ndarray], hist: Histogram) -> np.ndarray:
    """(clusters, bins) in-range counts, binned exactly as ``build_histogram`` does."""
    edges = np.asarray(hist.edges)
    bins = len(hist.counts)
    out = np.zeros((len(samples_per_cluster), bins), dtype=np.int64)
    for r, s in enumerate(samples_per_cluster):
        idx, _ = _bin_index(np.asarray(s, dtype=float).ravel(), edges)
        out[r] = np.bincount(idx, minlength=bins)
    return out


def gof_compare(hist: Histogram, density: Callable, *, vectorized: bool = True,
                cluster_counts: np.ndarray | None = None) -> GofResult:
    """Pearson chi-square and L1 distance between a histogram and a density.

    ``density`` must integrate to 1 over the histogram range (within 1e-6).
    Sparse bins are merged left to right until each group expects at least 5.
    When the histogram pools dependent samples from independent trials, pass the
    per-trial bin counts as ``cluster_counts`` and the statistic is deflated by
    the estimated design effect before the p-value is taken.
    """
    probs = bin_probabilities(hist.edges, density, vectorized=vectorized)
    mass = float(probs.sum())
    if abs(mass - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"density integrates to {mass!r} over the histogram range, not 1")
    n = hist.total
    observed = np.asarray(hist.counts, dtype=float)
    expected = n * probs
    groups = merge_sparse_bins(expected)
    o = np.array([observed[g].sum() for g in groups])
    e = np.array([expected[g].sum() for g in groups])
    chi2 = float(np.sum((o - e) ** 2 / e))
    dof = len(groups) - 1
    deff = 1.0
    if cluster_counts is not None:
        cluster_counts = np.asarray(cluster_counts)
        if int(cluster_counts.sum()) != n:
            raise ValueError("cluster counts do not add up to the histogram")
        deff = _design_effect(cluster_counts, groups)
    p = gof_p_value(chi2, dof, deff)
    l1 = float(np.sum(np.abs(hist.density() * hist.widths - probs)))
    return GofResult(chi2, dof, p, l1, deff)


def gof_p_value(chi2: float, dof: int, design_effect: float = 1.0) -> float:
    if dof <= 0:
        return 1.0
    return float(_sps.chi2.sf(chi2 / design_effect, dof))


def piecewise_constant_density(hist: Histogram) -> Callable:
    """The histogram's own normalized density as a vectorized callable."""
    edges = np.asarray(hist.edges)
    dens = hist.density()

    def f(x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(dens) - 1)
        inside = (x >= edges[0]) & (x <= edges[-1])
        return np.where(inside, dens[idx], 0.0)

    return f


def clustered_mean(values_per_cluster: Sequence[np.ndarray]) -> tuple[float, float, int]:
    """Pooled mean and its cluster-robust standard error.

    Triangles from one overlay share vertices, so the overlay (trial) is the
    independent unit.  Returns (mean, stderr, pooled count).
    """
    sums = np.array([float(np.sum(v)) for v in values_per_cluster])
    ns = np.array([len(v) for v in values_per_cluster], dtype=float)
    n_total = ns.sum()
    if n_total == 0:
        return math.nan, math.nan, 0
    mean = sums.sum() / n_total
    k = len(values_per_cluster)
    if k < 2:
        return float(mean), math.nan, int(n_total)
    resid = sums - mean * ns
    var = k / (k - 1) * np.sum(resid**2) / n_total**2
    return float(mean), float(math.sqrt(var)), int(n_total)


# ---------------------------------------------------------------------------
# CSV


def _fmt(x: float) -> str:
    return repr(float(x))


def histogram_to_csv(hist: Histogram, analytic: Callable | None = None, *, vectorized: bool = True) -> str:
    """CSV text; ``density_analytic`` holds bin averages of ``analytic`` (blank if None)."""
    probs = bin_probabilities(hist.edges, analytic, vectorized=vectorized) if analytic else None
    widths = hist.widths
    dens = hist.density()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for b in range(len(hist.counts)):
        writer.writerow([
            _fmt(hist.edges[b]),
            _fmt(hist.edges[b + 1]),
            str(hist.counts[b]),
            _fmt(dens[b]),
            _fmt(probs[b] / widths[b]) if probs is not None else "",
        ])
    return buf.getvalue()


def histogram_from_csv(text: str) -> Histogram:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != HEADER:
        raise ValueError(f"expected header {','.join(HEADER)}")
    body = rows[1:]
    if not body:
        raise ValueError("histogram CSV has no bins")
    edges = [float(r[0]) for r in body] + [float(body[-1][1])]
    counts = [int(r[2]) for r in body]
    return Histogram(tuple(edges), tuple(counts))
