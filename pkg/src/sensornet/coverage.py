"""Static coverage: the homological criterion and a conservative grid oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cech import cech_at
from .complex import betti
from .geom import Point, Scene, fence_covers_boundary

UNCOVERED, COVERED, BORDERLINE, OUTSIDE = 0, 1, 2, -1


@dataclass(frozen=True)
class Grid:
    """Square cells of side ``h``; cell (i, j) has centre (x0 + (i+.5)h, y0 + (j+.5)h)."""

    x0: float
    y0: float
    h: float
    nx: int
    ny: int
    inside: np.ndarray  # (nx, ny) bool, cell centre lies in the domain

    @property
    def margin(self) -> float:
        return self.h * math.sqrt(2) / 2

    def centers(self) -> np.ndarray:
        xs = self.x0 + (np.arange(self.nx) + 0.5) * self.h
        ys = self.y0 + (np.arange(self.ny) + 0.5) * self.h
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def center(self, i: int, j: int) -> Point:
        return Point(self.x0 + (i + 0.5) * self.h, self.y0 + (j + 0.5) * self.h)

    def cell_of(self, p) -> tuple[int, int]:
        return int(math.floor((p[0] - self.x0) / self.h)), int(math.floor((p[1] - self.y0) / self.h))


_GRIDS: dict = {}


def grid_for(scene: Scene, h: float, pad: float = 0.0) -> Grid:
    """Grid over the domain bounding box (optionally padded), cached per domain."""
    key = (scene.domain, h, pad)
    g = _GRIDS.get(key)
    if g is None:
        x0, y0, x1, y1 = scene.domain.bbox()
        x0, y0, x1, y1 = x0 - pad, y0 - pad, x1 + pad, y1 + pad
        nx = max(1, math.ceil((x1 - x0) / h - 1e-9))
        ny = max(1, math.ceil((y1 - y0) / h - 1e-9))
        g = Grid(x0, y0, h, nx, ny, np.ones((nx, ny), dtype=bool))
        inside = np.ones((nx, ny), dtype=bool) if pad else scene.domain.contains_many(g.centers())
        g = Grid(x0, y0, h, nx, ny, inside)
        if len(_GRIDS) > 32:
            _GRIDS.clear()
        _GRIDS[key] = g
    return g


def nearest_distance(xy: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Distance from each point of ``pts`` (..., 2) to the nearest sensor in ``xy``."""
    shape = pts.shape[:-1]
    flat = pts.reshape(-1, 2)
    if len(xy) == 0:
        return np.full(shape, np.inf)
    best = np.full(len(flat), np.inf)
    # chunk over sensors to bound memory
    for k in range(0, len(xy), 64):
        c = xy[k : k + 64]
        d2 = (flat[:, 0:1] - c[None, :, 0]) ** 2 + (flat[:, 1:2] - c[None, :, 1]) ** 2
        np.minimum(best, d2.min(axis=1), out=best)
    return np.sqrt(best).reshape(shape)


def classify_positions(xy: np.ndarray, r: float, grid: Grid) -> np.ndarray:
    d = nearest_distance(xy, grid.centers())
    m = grid.margin
    state = np.full(d.shape, BORDERLINE, dtype=np.int8)
    state[d < r - m] = COVERED
    state[d > r + m] = UNCOVERED
    state[~grid.inside] = OUTSIDE
    return state


def classify_cells(scene: Scene, t: float, grid: Grid) -> np.ndarray:
    """Per-cell state: COVERED (whole cell inside a ball), UNCOVERED (whole cell
    outside every ball), BORDERLINE, or OUTSIDE the domain."""
    return classify_positions(scene.positions(t), scene.radius, grid)


@dataclass(frozen=True)
class CoverageVerdict:
    covered: bool
    beta1: int
    fence_ok: bool


@dataclass(frozen=True)
class GridVerdict:
    status: str  # "covered" | "hole" | "uncertain"
    witness: Optional[Point] = None


def is_covered_homology(scene: Scene, t: float, n_samples: int = 256) -> CoverageVerdict:
    b1 = betti(cech_at(scene, t), 1)
    return CoverageVerdict(covered=b1 == 0, beta1=b1, fence_ok=fence_covers_boundary(scene, t, n_samples))


def _check_h(scene: Scene, h: float):
    if not 0 < h <= scene.radius / 4 + 1e-12:
        raise ValueError(f"grid step {h} must lie in (0, r/4] with r={scene.radius}")


def is_covered_grid(scene: Scene, t: float, h: float) -> GridVerdict:
    _check_h(scene, h)
    grid = grid_for(scene, h)
    state = classify_cells(scene, t, grid)
    unc = np.argwhere(state == UNCOVERED)
    if len(unc):
        i, j = unc[0]  # argwhere is row-major: smallest (i, j)
        return GridVerdict("hole", grid.center(int(i), int(j)))
    if np.any(state == BORDERLINE):
        return GridVerdict("uncertain")
    return GridVerdict("covered")
