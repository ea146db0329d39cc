"""Planar primitives: points, lines in normal form, triangles and their angles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ANGLE_SUM_TOL = 1e-12
DEGENERACY_TOL = 1e-12


class DegenerateTriangleError(ValueError):
    """Three vertices are collinear to within the degeneracy tolerance."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Line:
    """The line {(u, v): u cos(theta) + v sin(theta) = p}, theta in [0, pi)."""

    p: float
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta < math.pi:
            raise ValueError(f"theta must lie in [0, pi), got {self.theta}")


@dataclass(frozen=True)
class Triangle:
    a: Point
    b: Point
    c: Point


@dataclass(frozen=True)
class AngleTriple:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) <= 0.0:
            raise ValueError(f"angles must be positive: {self}")
        if abs(self.alpha + self.beta + self.gamma - math.pi) > ANGLE_SUM_TOL:
            raise ValueError(f"angles must sum to pi: {self}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)

    @property
    def largest(self) -> float:
        return max(self.alpha, self.beta, self.gamma)

    @property
    def smallest(self) -> float:
        return min(self.alpha, self.beta, self.gamma)


def side_sign(line: Line, pt: Point) -> int:
    """Sign of x cos(theta) + y sin(theta) - p; a point on the line counts as +1."""
    s = pt.x * math.cos(line.theta) + pt.y * math.sin(line.theta) - line.p
    return -1 if s < 0.0 else 1


def _twice_area(a: Point, b: Point, c: Point) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def is_degenerate(tri: Triangle) -> bool:
    xs = (tri.a.x, tri.b.x, tri.c.x)
    ys = (tri.a.y, tri.b.y, tri.c.y)
    scale = max(max(xs) - min(xs), max(ys) - min(ys))
    return abs(_twice_area(tri.a, tri.b, tri.c)) <= DEGENERACY_TOL * scale * scale or scale == 0.0


def _angle_at(p: Point, q: Point, r: Point) -> float:
    ux, uy = q.x - p.x, q.y - p.y
    vx, vy = r.x - p.x, r.y - p.y
    return math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)


def angles(tri: Triangle) -> AngleTriple:
    """Interior angles at a, b and c, in that order."""
    if is_degenerate(tri):
        raise DegenerateTriangleError(f"collinear vertices: {tri}")
    return AngleTriple(
        _angle_at(tri.a, tri.b, tri.c),
        _angle_at(tri.b, tri.c, tri.a),
        _angle_at(tri.c, tri.a, tri.b),
    )


def perimeter(tri: Triangle) -> float:
    if is_degenerate(tri):
        raise DegenerateTriangleError(f"collinear vertices: {tri}")
    a, b, c = tri.a, tri.b, tri.c
    return math.hypot(b.x - a.x, b.y - a.y) + math.hypot(c.x - b.x, c.y - b.y) + math.hypot(a.x - c.x, a.y - c.y)


def contains_point(tri: Triangle, pt: Point) -> bool:
    """True if ``pt`` lies in the closed triangle (boundary included)."""
    d1 = _twice_area(tri.a, tri.b, pt)
    d2 = _twice_area(tri.b, tri.c, pt)
    d3 = _twice_area(tri.c, tri.a, pt)
    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


def segment_hits_line(line: Line, a: Point, b: Point) -> bool:
    """True if the closed segment [a, b] meets ``line``."""
    ca, sa = math.cos(line.theta), math.sin(line.theta)
    da = a.x * ca + a.y * sa - line.p
    db = b.x * ca + b.y * sa - line.p
    return da == 0.0 or db == 0.0 or (da < 0.0) != (db < 0.0)


# ---------------------------------------------------------------------------
# array forms used by the enumerators; same conventions as the scalar versions


def side_signs(points: np.ndarray, lines: np.ndarray) -> np.ndarray:
    """(n, m) int8 matrix of side signs of n points against m lines (p, theta)."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    lines = np.asarray(lines, dtype=float).reshape(-1, 2)
    s = (points[:, :1] * np.cos(lines[:, 1]) + points[:, 1:] * np.sin(lines[:, 1])) - lines[:, 0]
    return np.where(s < 0.0, -1, 1).astype(np.int8)


def triangle_angles(pa: np.ndarray, pb: np.ndarray, pc: np.ndarray) -> np.ndarray:
    """(T, 3) interior angles for vertex arrays of shape (T, 2)."""

    def at(p, q, r):
        u = q - p
        v = r - p
        cross = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
        dot = u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1]
        return np.arctan2(cross, dot)

    return np.stack([at(pa, pb, pc), at(pb, pc, pa), at(pc, pa, pb)], axis=1)


def degenerate_mask(pa: np.ndarray, pb: np.ndarray, pc: np.ndarray) -> np.ndarray:
    cross = (pb[:, 0] - pa[:, 0]) * (pc[:, 1] - pa[:, 1]) - (pb[:, 1] - pa[:, 1]) * (pc[:, 0] - pa[:, 0])
    xs = np.stack([pa[:, 0], pb[:, 0], pc[:, 0]])
    ys = np.stack([pa[:, 1], pb[:, 1], pc[:, 1]])
    scale = np.maximum(np.ptp(xs, axis=0), np.ptp(ys, axis=0))
    return (np.abs(cross) <= DEGENERACY_TOL * scale * scale) | (scale == 0.0)
