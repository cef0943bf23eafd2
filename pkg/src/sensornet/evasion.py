"""Evasion-path existence by spacetime discretisation.

Each time sample is rasterised with the conservative classification of the
coverage module.  Components of uncovered cells are linked between
consecutive samples when they share a cell, and an evasion path exists when
some component at t=0 reaches some component at t=1.

The search runs twice: once on certainly-uncovered cells only (pessimistic
for the intruder) and once counting borderline cells as free (optimistic).
The true uncovered region lies between the two, so agreement is decisive and
disagreement is reported as indeterminate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cech import sample_times
from .coverage import BORDERLINE, UNCOVERED, Grid, _check_h, classify_cells, grid_for
from .geom import Point, Scene


class UnionFind:
    def __init__(self, n: int = 0):
        self.parent = list(range(n))

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller id as root so labels follow first appearance
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _runs(row: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    padded = np.concatenate([[False], row, [False]])
    d = np.diff(padded.astype(np.int8))
    return np.nonzero(d == 1)[0], np.nonzero(d == -1)[0]


def label_components(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """4-connected components of ``mask`` via union-find over row runs.

    Labels are 1..k numbered by each component's first cell in row-major
    order; 0 marks cells outside ``mask``.
    """
    nx = mask.shape[0]
    uf = UnionFind()
    run_rows = []
    prev = None
    for i in range(nx):
        s, e = _runs(mask[i])
        ids = [uf.add() for _ in range(len(s))]
        if prev is not None:
            ps, pe, pids = prev
            a = b = 0
            while a < len(ps) and b < len(s):
                if ps[a] < e[b] and s[b] < pe[a]:
                    uf.union(pids[a], ids[b])
                if pe[a] < e[b]:
                    a += 1
                else:
                    b += 1
        prev = (s, e, ids)
        run_rows.append(prev)

    labels = np.zeros(mask.shape, dtype=np.int32)
    root_label: dict = {}
    for i, (s, e, ids) in enumerate(run_rows):
        for a, b, rid in zip(s, e, ids):
            root = uf.find(rid)
            lab = root_label.setdefault(root, len(root_label) + 1)
            labels[i, a:b] = lab
    return labels, len(root_label)


@dataclass(frozen=True)
class UncoveredSlice:
    t: float
    grid: Grid
    state: np.ndarray
    labels: np.ndarray  # components of certainly-uncovered cells
    n_components: int

    def component_at(self, p) -> int:
        i, j = self.grid.cell_of(p)
        if 0 <= i < self.grid.nx and 0 <= j < self.grid.ny:
            return int(self.labels[i, j])
        return 0


def uncovered_slice(scene: Scene, t: float, h: float, optimistic: bool = False) -> UncoveredSlice:
    _check_h(scene, h)
    grid = grid_for(scene, h)
    state = classify_cells(scene, t, grid)
    mask = state == UNCOVERED
    if optimistic:
        mask |= state == BORDERLINE
    labels, n = label_components(mask)
    return UncoveredSlice(t, grid, state, labels, n)


def _links(la: np.ndarray, lb: np.ndarray) -> dict:
    """{(a, b): flat index of the first shared cell} for components a, b."""
    both = (la > 0) & (lb > 0)
    idx = np.flatnonzero(both)
    if len(idx) == 0:
        return {}
    keys = la.ravel()[idx].astype(np.int64) << 32 | lb.ravel()[idx].astype(np.int64)
    uniq, first = np.unique(keys, return_index=True)
    return {(int(k >> 32), int(k & 0xFFFFFFFF)): int(idx[f]) for k, f in zip(uniq, first)}


@dataclass(frozen=True)
class EvasionResult:
    exists: bool
    witness: Optional[tuple] = None  # ((t, Point), ...) from t=0 to t=1
    indeterminate: bool = False

    @property
    def status(self) -> str:
        if self.indeterminate:
            return "indeterminate"
        return "exists" if self.exists else "none"


def _search(label_seq, keep_links: bool):
    reach = set(range(1, int(label_seq[0].max()) + 1))
    history = []
    for la, lb in zip(label_seq, label_seq[1:]):
        links = _links(la, lb)
        nxt = {b for (a, b) in links if a in reach}
        if keep_links:
            history.append((reach, links))
        reach = nxt
        if not reach:
            break
    return reach, history


def evasion_exists(scene: Scene, h: float | None = None, dt: float = 1 / 256) -> EvasionResult:
    h = scene.radius / 8 if h is None else h
    _check_h(scene, h)
    grid = grid_for(scene, h)
    ts = sample_times(dt)
    pess, opt = [], []
    for t in ts:
        state = classify_cells(scene, t, grid)
        unc = state == UNCOVERED
        pess.append(label_components(unc)[0])
        opt.append(label_components(unc | (state == BORDERLINE))[0])

    reach, history = _search(pess, keep_links=True)
    exists_p = bool(reach)
    exists_o = bool(_search(opt, keep_links=False)[0])
    if exists_p != exists_o:
        return EvasionResult(exists=False, indeterminate=True)
    if not exists_p:
        return EvasionResult(exists=False)

    # backtrack, smallest labels first
    b = min(reach)
    cells = []
    for reach_k, links in reversed(history):
        a = min(a for (a, bb) in links if bb == b and a in reach_k)
        cells.append(links[(a, b)])
        b = a
    cells.reverse()
    cells.append(cells[-1])
    witness = []
    for t, flat in zip(ts, cells):
        i, j = np.unravel_index(flat, (grid.nx, grid.ny))
        witness.append((float(t), grid.center(int(i), int(j))))
    return EvasionResult(exists=True, witness=tuple(witness))


def validate_witness(scene: Scene, witness, h: float) -> bool:
    """Independent check of an evasion witness at grid step ``h``."""
    w = [(float(t), Point(float(p[0]), float(p[1]))) for t, p in witness]
    if not w:
        raise ValueError("witness is empty")
    ts = [t for t, _ in w]
    if abs(ts[0]) > 1e-9 or abs(ts[-1] - 1.0) > 1e-9:
        return False
    if any(b <= a for a, b in zip(ts, ts[1:])):
        return False
    margin = h * np.sqrt(2) / 2
    for t, p in w:
        xy = scene.positions(t)
        if len(xy) and np.min(np.hypot(xy[:, 0] - p.x, xy[:, 1] - p.y)) <= scene.radius + margin:
            return False
    slices = [uncovered_slice(scene, t, h) for t in ts]
    for (s0, (_, p0)), (s1, (_, p1)) in zip(zip(slices, w), zip(slices[1:], w[1:])):
        c0, c1 = s0.component_at(p0), s1.component_at(p1)
        if c0 == 0 or c1 == 0:
            return False
        if not np.any((s0.labels == c0) & (s1.labels == c1)):
            return False
    return True
