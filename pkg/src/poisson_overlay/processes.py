"""Reproducible samplers for the Poisson overlay and the angle-law family.

Every draw comes from a Philox stream keyed by (master_seed, stream_id, tag), so
a trial's output depends only on its SeedSpec, never on scheduling order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .analytic.densities import FAMILY, joint_density
from .geometry import AngleTriple, Line, Point

_TAG_POINTS = 0
_TAG_LINES = 1
_TAG_ANGLES = 2
_TAG_STICK = 3

ENVELOPE_MARGIN = 0.01
ENVELOPE_GRID_STEP = 1e-3


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed}")
        if self.stream_id < 0:
            raise ValueError(f"stream_id must be non-negative, got {self.stream_id}")


def generator(seed: SeedSpec, tag: int) -> np.random.Generator:
    """Independent counter-based stream for one (seed, purpose) pair."""
    ss = np.random.SeedSequence(seed.master_seed, spawn_key=(seed.stream_id, tag))
    return np.random.Generator(np.random.Philox(ss))


def _check_lambda(lam: float) -> None:
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError(f"disk radius lambda must be positive and finite, got {lam!r}")


@dataclass(frozen=True, eq=False)
class Overlay:
    """Points (n, 2) and lines (m, 2) as (p, theta) rows, all inside/hitting the disk."""

    lam: float
    points: np.ndarray
    lines: np.ndarray
    seed: SeedSpec | None = field(default=None)

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    def point(self, i: int) -> Point:
        return Point(float(self.points[i, 0]), float(self.points[i, 1]))

    def line(self, i: int) -> Line:
        return Line(float(self.lines[i, 0]), float(self.lines[i, 1]))

    def with_points(self, points) -> Overlay:
        return Overlay(self.lam, np.asarray(points, dtype=float).reshape(-1, 2), self.lines, self.seed)

    def with_lines(self, lines) -> Overlay:
        return Overlay(self.lam, self.points, np.asarray(lines, dtype=float).reshape(-1, 2), self.seed)

    def to_bytes(self) -> bytes:
        return np.float64(self.lam).tobytes() + self.points.tobytes() + self.lines.tobytes()


def sample_points(lam: float, seed: SeedSpec) -> np.ndarray:
    """Unit-intensity Poisson points in the disk of radius ``lam``, shape (n, 2)."""
    _check_lambda(lam)
    rng = generator(seed, _TAG_POINTS)
    n = rng.poisson(math.pi * lam * lam)
    r = lam * np.sqrt(rng.random(n))
    ang = 2.0 * math.pi * rng.random(n)
    return np.column_stack([r * np.cos(ang), r * np.sin(ang)])


def sample_lines(lam: float, seed: SeedSpec) -> np.ndarray:
    """Unit-intensity Poisson lines hitting the disk, shape (m, 2) of (p, theta).

    Intensity is with respect to dp dtheta on (-inf, inf) x [0, pi), so the mean
    number of lines meeting a convex set equals its perimeter.
    """
    _check_lambda(lam)
    rng = generator(seed, _TAG_LINES)
    m = rng.poisson(2.0 * math.pi * lam)
    p = rng.uniform(-lam, lam, m)
    theta = rng.uniform(0.0, math.pi, m)
    return np.column_stack([p, theta])


def sample_overlay(lam: float, seed: SeedSpec) -> Overlay:
    return Overlay(lam, sample_points(lam, seed), sample_lines(lam, seed), seed)


# ---------------------------------------------------------------------------
# broken stick (j = 3)


def _stick_angles(l1, l2, l3) -> np.ndarray:
    def opposite(a, b, c):
        return np.arccos(np.clip((b * b + c * c - a * a) / (2.0 * b * c), -1.0, 1.0))

    return np.column_stack([opposite(l1, l2, l3), opposite(l2, l3, l1), opposite(l3, l1, l2)])


def broken_stick_proposals(n_proposals: int, seed: SeedSpec) -> np.ndarray:
    """Break a unit stick at two uniform points ``n_proposals`` times.

    Returns the (k, 3) angles of the k proposals whose pieces form a triangle.
    """
    rng = generator(seed, _TAG_STICK)
    u = rng.random((n_proposals, 2))
    lo = u.min(axis=1)
    hi = u.max(axis=1)
    l1, l2, l3 = lo, hi - lo, 1.0 - hi
    ok = (l1 < 0.5) & (l2 < 0.5) & (l3 < 0.5)
    return _stick_angles(l1[ok], l2[ok], l3[ok])


def broken_stick_sample(n: int, seed: SeedSpec) -> np.ndarray:
    """Exactly ``n`` broken-stick triangles' angles, shape (n, 3)."""
    rng = generator(seed, _TAG_STICK)
    out = []
    have = 0
    while have < n:
        batch = max(64, int(4.4 * (n - have)))
        u = rng.random((batch, 2))
        lo = u.min(axis=1)
        hi = u.max(axis=1)
        l1, l2, l3 = lo, hi - lo, 1.0 - hi
        ok = (l1 < 0.5) & (l2 < 0.5) & (l3 < 0.5)
        out.append(_stick_angles(l1[ok], l2[ok], l3[ok]))
        have += int(ok.sum())
    return np.concatenate(out)[:n]


def broken_stick_angles(seed: SeedSpec) -> AngleTriple:
    return AngleTriple(*map(float, broken_stick_sample(1, seed)[0]))


# ---------------------------------------------------------------------------
# rejection sampler for the C_j family


def _dirichlet_half_density(x, y):
    # Dirichlet(1/2, 1/2, 1/2) on (x, y, pi - x - y)/pi, as a density in (x, y)
    u = np.stack([x, y, math.pi - x - y]) / math.pi
    return np.prod(u, axis=0) ** -0.5 / (2.0 * math.pi**3)


_UNIFORM_DENSITY = 2.0 / math.pi**2


def _uses_dirichlet(j: int) -> bool:
    # the j = 4 density blows up like 1/r at the three corners; the others stay bounded
    return j == 4


def _proposal_density(j: int, x, y):
    if _uses_dirichlet(j):
        return _dirichlet_half_density(x, y)
    return np.full(np.shape(x), _UNIFORM_DENSITY)


@lru_cache(maxsize=None)
def envelope_constant(j: int) -> float:
    """(1 + margin) * sup of target/proposal, located on a 1e-3 grid."""
    if j not in FAMILY:
        raise ValueError(f"family index j must be one of {FAMILY}, got {j!r}")
    h = ENVELOPE_GRID_STEP
    best = 0.0
    xs = np.arange(h / 2, math.pi, h)
    for x in xs:
        y = np.arange(h / 2, math.pi - x, h)
        if not len(y):
            continue
        xx = np.full_like(y, x)
        vals = joint_density(j, xx, y) / _proposal_density(j, xx, y)
        best = max(best, float(vals.max()))
    centre = np.array([math.pi / 3])
    at_centre = float((joint_density(j, centre, centre) / _proposal_density(j, centre, centre))[0])
    return (1.0 + ENVELOPE_MARGIN) * max(best, float(at_centre))


def _propose(j: int, rng: np.random.Generator, size: int):
    if _uses_dirichlet(j):
        u = rng.dirichlet([0.5, 0.5, 0.5], size) * math.pi
        x, y = u[:, 0], u[:, 1]
        return x, y, _dirichlet_half_density(x, y)
    # uniform on the triangle {x, y > 0, x + y < pi} by folding the square
    x = rng.random(size) * math.pi
    y = rng.random(size) * math.pi
    flip = x + y > math.pi
    x = np.where(flip, math.pi - x, x)
    y = np.where(flip, math.pi - y, y)
    return x, y, np.full(size, _UNIFORM_DENSITY)


def rejection_sample_batch(j: int, n: int, seed: SeedSpec) -> np.ndarray:
    """``n`` angle triples drawn exactly from the C_j law, shape (n, 3)."""
    M = envelope_constant(j)
    rng = generator(seed, _TAG_ANGLES)
    out = []
    have = 0
    while have < n:
        size = max(256, int(1.2 * M * (n - have)) + 16)
        x, y, q = _propose(j, rng, size)
        keep = (x > 0) & (y > 0) & (x + y < math.pi)
        accept = keep & (rng.random(size) * M * q < joint_density(j, x, y))
        x, y = x[accept], y[accept]
        out.append(np.column_stack([x, y, math.pi - x - y]))
        have += len(x)
    return np.concatenate(out)[:n]


def rejection_sample_angles(j: int, seed: SeedSpec) -> AngleTriple:
    return AngleTriple(*map(float, rejection_sample_batch(j, 1, seed)[0]))
