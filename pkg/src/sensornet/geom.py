"""Planar geometry for disk sensors.

Sensors are open disks of a common radius.  Every strict comparison against
a radius goes through ``EPS`` so that a distance sitting exactly on a
threshold is treated as *not* inside the open ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

EPS = 1e-9


class Point(NamedTuple):
    x: float
    y: float


class SceneError(ValueError):
    """Raised when a scene violates one of its invariants."""


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: float

    kind = "disk"

    def __post_init__(self):
        if not self.radius > 0:
            raise SceneError("disk domain radius must be positive")

    def contains(self, p, tol: float = EPS) -> bool:
        return math.hypot(p[0] - self.center[0], p[1] - self.center[1]) <= self.radius + tol

    def contains_many(self, xy: np.ndarray, tol: float = EPS) -> np.ndarray:
        d = np.hypot(xy[..., 0] - self.center[0], xy[..., 1] - self.center[1])
        return d <= self.radius + tol

    def bbox(self) -> tuple[float, float, float, float]:
        cx, cy = self.center
        r = self.radius
        return cx - r, cy - r, cx + r, cy + r

    def boundary_samples(self, n: int) -> np.ndarray:
        ang = 2 * np.pi * np.arange(n) / n
        return np.column_stack(
            [self.center[0] + self.radius * np.cos(ang), self.center[1] + self.radius * np.sin(ang)]
        )


@dataclass(frozen=True)
class Rectangle:
    min: Point
    max: Point

    kind = "rectangle"

    def __post_init__(self):
        if not (self.min[0] < self.max[0] and self.min[1] < self.max[1]):
            raise SceneError("rectangle domain needs min < max componentwise")

    def contains(self, p, tol: float = EPS) -> bool:
        return (
            self.min[0] - tol <= p[0] <= self.max[0] + tol
            and self.min[1] - tol <= p[1] <= self.max[1] + tol
        )

    def contains_many(self, xy: np.ndarray, tol: float = EPS) -> np.ndarray:
        x, y = xy[..., 0], xy[..., 1]
        return (
            (x >= self.min[0] - tol)
            & (x <= self.max[0] + tol)
            & (y >= self.min[1] - tol)
            & (y <= self.max[1] + tol)
        )

    def bbox(self) -> tuple[float, float, float, float]:
        return self.min[0], self.min[1], self.max[0], self.max[1]

    def boundary_samples(self, n: int) -> np.ndarray:
        """``n`` points equally spaced by arc length, counter-clockwise from ``min``."""
        (x0, y0), (x1, y1) = self.min, self.max
        w, h = x1 - x0, y1 - y0
        s = np.arange(n) * (2 * (w + h) / n)
        out = np.empty((n, 2))
        for i, si in enumerate(s):
            if si < w:
                out[i] = (x0 + si, y0)
            elif si < w + h:
                out[i] = (x1, y0 + si - w)
            elif si < 2 * w + h:
                out[i] = (x1 - (si - w - h), y1)
            else:
                out[i] = (x0, y1 - (si - 2 * w - h))
        return out


Domain = Disk | Rectangle


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear motion through ``keyframes`` = ((t, Point), ...)."""

    keyframes: tuple

    def __post_init__(self):
        kf = tuple((float(t), Point(float(p[0]), float(p[1]))) for t, p in self.keyframes)
        object.__setattr__(self, "keyframes", kf)
        if not kf:
            raise SceneError("trajectory has no keyframes")
        ts = [t for t, _ in kf]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise SceneError("keyframes not increasing")
        if ts[0] != 0.0 or ts[-1] != 1.0:
            raise SceneError("keyframes must start at t=0 and end at t=1")
        if not all(math.isfinite(c) for _, p in kf for c in p):
            raise SceneError("keyframe coordinates must be finite")

    @classmethod
    def static(cls, p) -> "Trajectory":
        return cls(((0.0, p), (1.0, p)))

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.keyframes])

    @property
    def xy(self) -> np.ndarray:
        return np.array([p for _, p in self.keyframes])

    def max_speed(self) -> float:
        ts, xy = self.times, self.xy
        if len(ts) < 2:
            return 0.0
        return float(np.max(np.hypot(*np.diff(xy, axis=0).T) / np.diff(ts)))


def position_at(traj: Trajectory, t: float) -> Point:
    ts = traj.times
    xy = traj.xy
    return Point(float(np.interp(t, ts, xy[:, 0])), float(np.interp(t, ts, xy[:, 1])))


@dataclass(frozen=True, eq=False)
class Scene:
    """Domain, common sensing radius, static fence sensors and mobile sensors.

    Sensor ids are positions in ``fence + mobile``: fence sensors come first.
    ``metadata`` may carry ``fiber_pair`` (two times) and ``loop`` (an edge
    cycle of sensor ids) used when comparing two networks.
    """

    domain: Domain
    radius: float
    fence: tuple = ()
    mobile: tuple = ()
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "fence", tuple(Point(float(x), float(y)) for x, y in self.fence))
        object.__setattr__(self, "mobile", tuple(self.mobile))
        if not self.radius > 0:
            raise SceneError("sensing radius must be positive")
        for i, p in enumerate(self.fence):
            if not self.domain.contains(p, 1e-7):
                raise SceneError(f"fence sensor {i} at {tuple(p)} lies outside the domain")
        for j, tr in enumerate(self.mobile):
            # convex domain: keyframes inside => whole polyline inside
            for t, p in tr.keyframes:
                if not self.domain.contains(p, 1e-7):
                    raise SceneError(
                        f"trajectory {j} leaves the domain at t={t:g} (position {p.x:g}, {p.y:g})"
                    )
        # padded keyframe tables for vectorised evaluation; padding times lie
        # beyond 1 and repeat the last position
        k = max((len(tr.keyframes) for tr in self.mobile), default=2)
        T = np.empty((len(self.mobile), k))
        XY = np.empty((len(self.mobile), k, 2))
        for j, tr in enumerate(self.mobile):
            n = len(tr.keyframes)
            T[j, :n], XY[j, :n] = tr.times, tr.xy
            T[j, n:] = 2.0 + np.arange(k - n)
            XY[j, n:] = XY[j, n - 1]
        object.__setattr__(self, "_tables", (T, XY))

    @property
    def n_sensors(self) -> int:
        return len(self.fence) + len(self.mobile)

    @property
    def fence_ids(self) -> range:
        return range(len(self.fence))

    def positions(self, t: float) -> np.ndarray:
        """(n, 2) array of all sensor centres at time ``t``."""
        out = np.empty((self.n_sensors, 2))
        nf = len(self.fence)
        if nf:
            out[:nf] = np.asarray(self.fence, dtype=float)
        T, XY = self._tables
        if len(T):
            rows = np.arange(len(T))
            i = np.clip((T <= t).sum(axis=1) - 1, 0, T.shape[1] - 2)
            t0, t1 = T[rows, i], T[rows, i + 1]
            w = np.clip((t - t0) / (t1 - t0), 0.0, 1.0)[:, None]
            out[nf:] = XY[rows, i] + w * (XY[rows, i + 1] - XY[rows, i])
        return out

    def keyframe_times(self) -> list[float]:
        return sorted({t for tr in self.mobile for t, _ in tr.keyframes} | {0.0, 1.0})

    def __eq__(self, other):
        if not isinstance(other, Scene):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.radius == other.radius
            and self.fence == other.fence
            and self.mobile == other.mobile
            and self.label == other.label
            and self.metadata == other.metadata
        )

    __hash__ = None


def _circumcircle(a, b, c):
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0:
        return None
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    return Point(ux, uy), math.hypot(ax - ux, ay - uy)


def min_enclosing_ball(points: Sequence) -> tuple[Point, float]:
    """Smallest disk containing 1 to 3 points.

    For three points the answer is the circumcircle when the triangle is
    acute, otherwise the disk on the longest side.
    """
    pts = [Point(float(p[0]), float(p[1])) for p in points]
    if not 1 <= len(pts) <= 3:
        raise ValueError("min_enclosing_ball takes 1 to 3 points")
    if len(pts) == 1:
        return pts[0], 0.0
    if len(pts) == 2:
        a, b = pts
        return Point((a.x + b.x) / 2, (a.y + b.y) / 2), math.dist(a, b) / 2
    a, b, c = pts
    # squared side lengths opposite each vertex
    sides = sorted(
        [
            ((b.x - c.x) ** 2 + (b.y - c.y) ** 2, b, c, a),
            ((a.x - c.x) ** 2 + (a.y - c.y) ** 2, a, c, b),
            ((a.x - b.x) ** 2 + (a.y - b.y) ** 2, a, b, c),
        ],
        key=lambda s: s[0],
    )
    longest, p, q, opp = sides[2]
    if longest >= sides[0][0] + sides[1][0]:
        # right, obtuse or degenerate: diametral disk of the longest side
        return Point((p.x + q.x) / 2, (p.y + q.y) / 2), math.sqrt(longest) / 2
    cc = _circumcircle(a, b, c)
    if cc is None:  # pragma: no cover - collinear triples take the branch above
        return Point((p.x + q.x) / 2, (p.y + q.y) / 2), math.sqrt(longest) / 2
    return cc


def miniball_radii(xy: np.ndarray, triples: np.ndarray) -> np.ndarray:
    """Vectorised ``min_enclosing_ball`` radius for index triples into ``xy``."""
    if len(triples) == 0:
        return np.empty(0)
    a, b, c = xy[triples[:, 0]], xy[triples[:, 1]], xy[triples[:, 2]]
    la = np.sum((b - c) ** 2, axis=1)
    lb = np.sum((a - c) ** 2, axis=1)
    lc = np.sum((a - b) ** 2, axis=1)
    L = np.stack([la, lb, lc], axis=1)
    L.sort(axis=1)
    obtuse = L[:, 2] >= L[:, 0] + L[:, 1]
    # circumradius R = abc / (4 * area)
    cross = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    area4 = 2 * np.abs(cross)
    with np.errstate(divide="ignore", invalid="ignore"):
        circ = np.sqrt(la * lb * lc) / area4
    return np.where(obtuse, np.sqrt(L[:, 2]) / 2, circ)


def is_covered_point(scene: Scene, t: float, p) -> bool:
    xy = scene.positions(t)
    if len(xy) == 0:
        return False
    d = np.hypot(xy[:, 0] - p[0], xy[:, 1] - p[1])
    return bool(np.any(d < scene.radius - EPS))


def fence_covers_boundary(scene: Scene, t: float, n_samples: int = 256) -> bool:
    """True iff each of ``n_samples`` equispaced boundary points is covered at ``t``."""
    if n_samples < 3:
        raise ValueError("need at least 3 boundary samples")
    xy = scene.positions(t)
    if len(xy) == 0:
        return False
    pts = scene.domain.boundary_samples(n_samples)
    d2 = ((pts[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2)
    return bool(np.all(np.sqrt(d2.min(axis=1)) < scene.radius - EPS))
