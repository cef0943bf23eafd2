"""Comparing two time-varying networks.

Two kinds of evidence are gathered.  The per-time nerves are compared under
the identity on sensor ids.  For a designated fiber pair (t, t2) the
inclusion of nerves gives a map on H1; the scenes' metadata names a loop,
and the question is which holes its image encloses at t2.

Holes are located with the grid oracle: every component of certainly
uncovered cells is a candidate witness.  The even-odd winding of each H1
basis representative around each witness gives a Z/2 matrix.  When that
matrix has full rank the holes are certified to match the H1 classes one to
one.  A hole is labelled by the fence sensors that border it.  Such labels
are invariant under any identification that fixes the fence.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .cech import cech_at, monotone_growth, sample_times
from .complex import (
    SimplicialComplex,
    betti,
    h1_basis,
    h1_coordinates,
    induced_h1,
    isomorphic_under,
    rank_z2,
)
from .evasion import evasion_exists, uncovered_slice
from .geom import Scene

IDENTICAL = "nerves combinatorially identical"
DIFFERENT = "nerves combinatorially different"
NOT_HOMOTOPY_EQUIVALENT = "uncovered regions not time-varying homotopy equivalent"
OBSTRUCTION = "homeomorphism obstruction witnessed at H1 level"


@dataclass(frozen=True)
class PairProfile:
    t: float
    t2: float
    beta1_t: int
    beta1_t2: int
    rank_incl: int
    monotone: bool


@dataclass(frozen=True)
class LoopImage:
    """Holes enclosed by a loop at t and by its inclusion image at t2.

    Each hole is given by its label, the sorted fence ids bordering it (empty
    for a hole away from the fence).  ``certified`` is false when the grid
    could not resolve the holes of either fiber.
    """

    source: tuple
    image: tuple
    certified: bool


@dataclass(frozen=True)
class CompareReport:
    timeline: tuple  # ((t, isomorphic), ...)
    pairs: tuple  # ((label, PairProfile, LoopImage | None), ...)
    evasion: dict  # {"a": status, "b": status}
    conclusions: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        pairs = []
        for label, prof, loop in self.pairs:
            d = {"scene": label, **asdict(prof)}
            if loop is not None:
                d["loop"] = {
                    "source": [list(h) for h in loop.source],
                    "image": [list(h) for h in loop.image],
                    "certified": loop.certified,
                }
            pairs.append(d)
        return {
            "timeline": [{"t": t, "isomorphic": ok} for t, ok in self.timeline],
            "pairs": pairs,
            "evasion": dict(self.evasion),
            "conclusions": list(self.conclusions),
        }


def compare_timelines(a: Scene, b: Scene, dt: float = 1 / 256) -> list[tuple[float, bool]]:
    if a.n_sensors != b.n_sensors:
        raise ValueError(
            f"sensor id sets differ: {a.n_sensors} sensors in one scene, {b.n_sensors} in the other"
        )
    ident = {i: i for i in range(a.n_sensors)}
    return [
        (float(t), isomorphic_under(cech_at(a, float(t)), cech_at(b, float(t)), ident))
        for t in sample_times(dt)
    ]


def pair_profile(scene: Scene, t: float, t2: float, h: float | None = None) -> PairProfile:
    if not t < t2:
        raise ValueError("need t < t2")
    K, L = cech_at(scene, t), cech_at(scene, t2)
    if not K <= L:
        raise ValueError(f"nerve at t={t:g} is not a subcomplex of the nerve at t={t2:g}")
    return PairProfile(
        t=t,
        t2=t2,
        beta1_t=betti(K, 1),
        beta1_t2=betti(L, 1),
        rank_incl=rank_z2(induced_h1(K, L)),
        monotone=monotone_growth(scene, t, t2, h=h),
    )


# -- holes and loops --------------------------------------------------------


def winding_parity(xy: np.ndarray, edges, points: np.ndarray) -> np.ndarray:
    """Even-odd count of crossings of the segments ``edges`` (pairs of indices
    into ``xy``) by a rightward ray from each point; 1 means enclosed."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not len(edges):
        return np.zeros(len(pts), dtype=np.uint8)
    E = np.asarray(edges)
    p, q = xy[E[:, 0]], xy[E[:, 1]]
    px, py = pts[:, 0:1], pts[:, 1:2]
    straddle = (p[None, :, 1] > py) != (q[None, :, 1] > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = p[None, :, 0] + (py - p[None, :, 1]) * (q[None, :, 0] - p[None, :, 0]) / (
            q[None, :, 1] - p[None, :, 1]
        )
    hits = straddle & (px < x_cross)
    return (hits.sum(axis=1) % 2).astype(np.uint8)


@dataclass(frozen=True)
class _Holes:
    complex: SimplicialComplex
    labels: tuple  # one fence label per certified hole
    parity: np.ndarray  # (n_holes, beta1): winding of each basis cycle
    certified: bool


def _holes(scene: Scene, t: float, h: float) -> _Holes:
    K = cech_at(scene, t)
    reps = h1_basis(K).representatives()
    sl = uncovered_slice(scene, t, h)
    xy = scene.positions(t)
    nf = len(scene.fence)
    fence_xy = xy[:nf]
    centres = sl.grid.centers()
    rows: dict = {}
    reach = scene.radius + 4 * h
    for c in range(1, sl.n_components + 1):
        cells = centres[sl.labels == c]
        w = cells[0]
        row = tuple(int(winding_parity(xy, rep, w)[0]) for rep in reps)
        if nf:
            d = np.hypot(cells[:, None, 0] - fence_xy[None, :, 0], cells[:, None, 1] - fence_xy[None, :, 1])
            touch = frozenset(np.nonzero((d < reach).any(axis=0))[0].tolist())
        else:
            touch = frozenset()
        rows[row] = rows.get(row, frozenset()) | touch
    rows.pop(tuple(0 for _ in reps), None)
    keys = sorted(rows)
    P = np.array(keys, dtype=np.uint8).reshape(len(keys), len(reps))
    certified = len(keys) == len(reps) and rank_z2(P) == len(reps)
    labels = tuple(tuple(sorted(rows[k])) for k in keys)
    return _Holes(K, labels, P, certified)


def loop_image(scene: Scene, t: float, t2: float, loop, h: float | None = None) -> LoopImage:
    """Holes enclosed by ``loop`` (an edge cycle present at t) and by the image
    of its H1 class under the inclusion of the nerve at t into that at t2."""
    h = scene.radius / 8 if h is None else h
    src, dst = _holes(scene, t, h), _holes(scene, t2, h)
    loop = [tuple(e) for e in loop]
    c_src = h1_coordinates(src.complex, loop)
    c_dst = (induced_h1(src.complex, dst.complex).astype(int) @ c_src.astype(int)) % 2

    def enclosed(holes, coords):
        if not len(holes.labels):
            return ()
        hit = (holes.parity.astype(int) @ coords.astype(int)) % 2
        return tuple(sorted(lab for lab, x in zip(holes.labels, hit) if x))

    return LoopImage(
        source=enclosed(src, c_src),
        image=enclosed(dst, c_dst),
        certified=src.certified and dst.certified,
    )


# -- report -----------------------------------------------------------------


def _designated(scene: Scene, pair) -> Optional[tuple]:
    if pair is not None:
        return tuple(map(float, pair))
    fp = scene.metadata.get("fiber_pair")
    return tuple(map(float, fp)) if fp else None


def full_report(
    a: Scene,
    b: Scene,
    dt: float = 1 / 256,
    h: float | None = None,
    pair=None,
) -> CompareReport:
    table = compare_timelines(a, b, dt)
    identical = all(ok for _, ok in table)
    conclusions = [IDENTICAL if identical else DIFFERENT]

    ea, eb = evasion_exists(a, h, dt), evasion_exists(b, h, dt)
    if not ea.indeterminate and not eb.indeterminate and ea.exists != eb.exists:
        conclusions.append(NOT_HOMOTOPY_EQUIVALENT)

    pairs = []
    for key, scene in (("a", a), ("b", b)):
        tp = _designated(scene, pair)
        if tp is None:
            continue
        prof = pair_profile(scene, *tp, h=h)
        loop = scene.metadata.get("loop")
        img = loop_image(scene, *tp, loop, h) if loop else None
        pairs.append((key, prof, img))

    if len(pairs) == 2:
        (_, pa, la), (_, pb, lb) = pairs
        if (
            la is not None
            and lb is not None
            and (pa.t, pa.t2) == (pb.t, pb.t2)
            and pa.monotone
            and pb.monotone
            and la.certified
            and lb.certified
            and la.source == lb.source
            and la.image != lb.image
        ):
            conclusions.append(OBSTRUCTION)

    return CompareReport(
        timeline=tuple(table),
        pairs=tuple(pairs),
        evasion={"a": ea.status, "b": eb.status},
        conclusions=tuple(conclusions),
    )
