"""Per-time Čech complexes of a scene and the timeline of combinatorial changes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex import SimplicialComplex
from .geom import EPS, Scene, miniball_radii


class NonGenericSceneError(RuntimeError):
    pass


def _edges_and_triangles(xy: np.ndarray, r: float):
    """Edge array (m, 2) and triangle array (k, 3), both in lexicographic order."""
    n = len(xy)
    if n < 2:
        return np.empty((0, 2), dtype=np.intp), np.empty((0, 3), dtype=np.intp)
    d = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2))
    iu, ju = np.triu_indices(n, 1)
    close = d[iu, ju] < 2 * (r - EPS)
    ei, ej = iu[close], ju[close]
    adj = np.zeros((n, n), dtype=bool)
    adj[ei, ej] = adj[ej, ei] = True
    # triangles: k > j among common neighbours of an edge (i, j)
    common = adj[ei] & adj[ej]
    common &= np.arange(n)[None, :] > ej[:, None]
    e_idx, ks = np.nonzero(common)
    tri = np.column_stack([ei[e_idx], ej[e_idx], ks])
    if len(tri):
        tri = tri[miniball_radii(xy, tri) < r - EPS]
    return np.column_stack([ei, ej]), tri


def _key(scene: Scene, t: float) -> bytes:
    # cheap fingerprint of the complex: equal keys iff equal complexes
    E, T = _edges_and_triangles(scene.positions(t), scene.radius)
    return len(E).to_bytes(4, "little") + E.astype(np.int32).tobytes() + T.astype(np.int32).tobytes()


def _movers(scene: Scene, a: float, b: float) -> np.ndarray:
    """Ids of sensors whose position is not constant on [a, b]."""
    T, XY = scene._tables
    if not len(T):
        return np.empty(0, dtype=np.intp)
    live = (T[:, :-1] < b) & (T[:, 1:] > a) & np.any(XY[:, 1:] != XY[:, :-1], axis=2)
    return len(scene.fence) + np.nonzero(live.any(axis=1))[0]


def _interval_keyer(scene: Scene, a: float, b: float):
    """Fingerprint function valid for times in [a, b].

    Only simplices touching a moving sensor can change inside the interval,
    so the fingerprint covers just those; the static adjacency is computed
    once.
    """
    movers = _movers(scene, a, b)
    if len(movers) == 0:
        return lambda t: b""
    r = scene.radius
    xy0 = scene.positions(a)
    n = len(xy0)
    d = np.sqrt(((xy0[:, None, :] - xy0[None, :, :]) ** 2).sum(axis=2))
    base = d < 2 * (r - EPS)
    np.fill_diagonal(base, False)

    def key(t):
        xy = scene.positions(t)
        dm = np.sqrt(((xy[movers, None, :] - xy[None, :, :]) ** 2).sum(axis=2))
        rows = dm < 2 * (r - EPS)
        rows[np.arange(len(movers)), movers] = False
        adj = base.copy()
        adj[movers] = rows
        adj[:, movers] = rows.T
        parts = [np.packbits(rows).tobytes()]
        for k, u in enumerate(movers):
            nb = np.nonzero(rows[k])[0]
            v, w = np.nonzero(np.triu(adj[np.ix_(nb, nb)], 1))
            if len(v):
                tri = np.column_stack([np.full(len(v), u), nb[v], nb[w]])
                parts.append(np.packbits(miniball_radii(xy, tri) < r - EPS).tobytes())
            parts.append(b"|")
        return b"".join(parts)

    return key


def cech_complex(xy: np.ndarray, r: float) -> SimplicialComplex:
    """Čech complex (2-skeleton) of open radius-``r`` disks centred at ``xy``."""
    E, T = _edges_and_triangles(np.asarray(xy, dtype=float), r)
    return SimplicialComplex(range(len(xy)), map(tuple, E.tolist()), map(tuple, T.tolist()))


def cech_at(scene: Scene, t: float) -> SimplicialComplex:
    return cech_complex(scene.positions(t), scene.radius)


def threshold_margin(scene: Scene, t: float) -> float:
    """Smallest gap between an edge/triangle quantity and its threshold at ``t``.

    Pair distances are compared against 2r; enclosing radii of triples whose
    pairs are all shorter than 2r are compared against r.
    """
    xy = scene.positions(t)
    r = scene.radius
    n = len(xy)
    if n < 2:
        return math.inf
    d = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2))
    iu, ju = np.triu_indices(n, 1)
    margin = float(np.min(np.abs(d[iu, ju] - 2 * r)))
    near = d < 2 * r + 1e-3
    tri = []
    for i, j in zip(iu, ju):
        if near[i, j]:
            ks = np.nonzero(near[i] & near[j])[0]
            ks = ks[ks > j]
            tri.extend((i, j, k) for k in ks)
    if tri:
        rad = miniball_radii(xy, np.array(tri))
        margin = min(margin, float(np.min(np.abs(rad - r))))
    return margin


@dataclass(frozen=True)
class Timeline:
    breakpoints: tuple  # 0 = b_0 < b_1 < ... < b_m = 1
    complexes: tuple  # complexes[i] holds on (b_i, b_{i+1})

    def __len__(self):
        return len(self.complexes)

    def intervals(self):
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:], self.complexes))

    def complex_at(self, t: float) -> SimplicialComplex:
        for a, b, K in self.intervals():
            if t <= b:
                return K
        return self.complexes[-1]


def sample_times(dt: float) -> np.ndarray:
    n = max(1, math.ceil(1.0 / dt - 1e-9))
    return np.linspace(0.0, 1.0, n + 1)


def _locate(key, a, ka, b, kb, tol, out):
    """Append (time, left end, right end) for every change in (a, b)."""
    while b - a > tol:
        m = 0.5 * (a + b)
        km = key(m)
        if km == ka:
            a = m
        elif km == kb:
            b = m
        else:
            _locate(key, a, ka, m, km, tol, out)
            _locate(key, m, km, b, kb, tol, out)
            return
    for s in (0.25, 0.5, 0.75):
        ks = key(a + s * (b - a))
        if ks != ka and ks != kb:
            raise NonGenericSceneError(
                f"more than one combinatorial change within [{a:.9f}, {b:.9f}]"
            )
    if out and 0.5 * (a + b) - out[-1][0] < tol:
        raise NonGenericSceneError(f"two combinatorial changes closer than tol near t={a:.9f}")
    out.append((0.5 * (a + b), a, b))


def _elementary(K: SimplicialComplex, L: SimplicialComplex, xy: np.ndarray) -> bool:
    """Is K -> L a single event: one edge with triangles on it, or one triangle?

    Sensors at identical positions (a parked sensor on its fence sensor) are
    identified first, since their simplices change together by design.
    """
    if not (K <= L or L <= K):
        return False
    _, first, inv = np.unique(xy, axis=0, return_index=True, return_inverse=True)
    rep = first[inv.ravel()]

    def image(simplices):
        out = {tuple(sorted({int(rep[v]) for v in s})) for s in simplices}
        return {s for s in out if len(s) > 1}

    dE = image(K.edges ^ L.edges)
    dT = {f for f in image(K.triangles ^ L.triangles) if len(f) == 3}
    if len(dE) == 1:
        (u, v), = dE
        return all(u in f and v in f for f in dT)
    return not dE and len(dT) == 1


def build_timeline(scene: Scene, dt: float = 1 / 256, tol: float = 1e-6) -> Timeline:
    if not 0 < tol < dt <= 0.1:
        raise ValueError("need 0 < tol < dt <= 0.1")
    ts = sample_times(dt)
    prev_t, prev_k = 0.0, _key(scene, 0.0)
    events: list = []
    for t in ts[1:]:
        t = float(t)
        k = _key(scene, t)
        if k != prev_k:
            key = _interval_keyer(scene, prev_t, t)
            _locate(key, prev_t, key(prev_t), t, key(t), tol, events)
        prev_t, prev_k = t, k
    breaks = [0.0] + [e for e, _, _ in events] + [1.0]
    complexes = [cech_at(scene, 0.0)]
    for e, a, b in events:
        K = cech_at(scene, b)
        if not _elementary(cech_at(scene, a), K, scene.positions(b)):
            raise NonGenericSceneError(f"simultaneous combinatorial changes at t={e:.9f}")
        complexes.append(K)
    return Timeline(tuple(breaks), tuple(complexes))


def monotone_growth(scene: Scene, t: float, t2: float, n: int = 9, h: float | None = None) -> bool:
    """Nerve and grid-resolved covered region never shrink on ``n`` samples of [t, t2].

    The covered-region test is made at the grid resolution used by the
    evasion module: a cell that is certainly covered at some sample must not
    be certainly uncovered at a later one.
    """
    from .coverage import COVERED, UNCOVERED, classify_cells, grid_for

    if t > t2 or n < 2:
        raise ValueError("need t <= t2 and n >= 2")
    h = scene.radius / 8 if h is None else h
    grid = grid_for(scene, h)
    seen_covered = None
    prev_K = None
    for s in np.linspace(t, t2, n):
        K = cech_at(scene, s)
        if prev_K is not None and not prev_K <= K:
            return False
        prev_K = K
        state = classify_cells(scene, s, grid)
        if seen_covered is not None and np.any(seen_covered & (state == UNCOVERED)):
            return False
        seen_covered = (state == COVERED) if seen_covered is None else seen_covered | (state == COVERED)
    return True
