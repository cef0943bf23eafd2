"""Abstract simplicial complexes of dimension at most 2 with Z/2 homology.

Chains are held as Python ints used as bit sets: bit ``i`` is the ``i``-th
simplex of the relevant dimension in sorted order.  Elimination is XOR on
those ints, which is fast for the few hundred simplices a sensor nerve has.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable

import numpy as np


def _edge(a, b):
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class SimplicialComplex:
    vertices: frozenset
    edges: frozenset
    triangles: frozenset

    def __init__(self, vertices=(), edges=(), triangles=(), *, close: bool = False):
        V = set(vertices)
        E = {_edge(*e) for e in edges}
        T = {tuple(sorted(f)) for f in triangles}
        if any(len(set(e)) != 2 for e in E) or any(len(set(f)) != 3 for f in T):
            raise ValueError("simplices must have distinct vertices")
        if close:
            for a, b, c in T:
                E |= {(a, b), (a, c), (b, c)}
            for a, b in E:
                V |= {a, b}
        else:
            missing_e = [f for f in T if not {(f[0], f[1]), (f[0], f[2]), (f[1], f[2])} <= E]
            missing_v = [e for e in E if not set(e) <= V]
            if missing_e or missing_v:
                raise ValueError(f"complex is not downward closed: {(missing_e + missing_v)[:3]}")
        object.__setattr__(self, "vertices", frozenset(V))
        object.__setattr__(self, "edges", frozenset(E))
        object.__setattr__(self, "triangles", frozenset(T))

    def __le__(self, other: "SimplicialComplex") -> bool:
        return (
            self.vertices <= other.vertices
            and self.edges <= other.edges
            and self.triangles <= other.triangles
        )

    def __len__(self):
        return len(self.vertices) + len(self.edges) + len(self.triangles)

    def simplices(self, k: int) -> list[tuple]:
        if k == 0:
            return [(v,) for v in sorted(self.vertices)]
        if k == 1:
            return sorted(self.edges)
        if k == 2:
            return sorted(self.triangles)
        return []

    @cached_property
    def _index(self):
        return {k: {s: i for i, s in enumerate(self.simplices(k))} for k in (0, 1, 2)}

    def relabel(self, mapping) -> "SimplicialComplex":
        m = dict(mapping)
        return SimplicialComplex(
            [m[v] for v in self.vertices],
            [(m[a], m[b]) for a, b in self.edges],
            [tuple(m[v] for v in f) for f in self.triangles],
        )

    def serialize(self) -> str:
        """One simplex per line, dimension first, then lexicographic."""
        lines = [" ".join(str(v) for v in s) for k in (0, 1, 2) for s in self.simplices(k)]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def parse(cls, text: str) -> "SimplicialComplex":
        simp = [tuple(int(tok) for tok in ln.split()) for ln in text.splitlines() if ln.strip()]
        return cls(
            [s[0] for s in simp if len(s) == 1],
            [s for s in simp if len(s) == 2],
            [s for s in simp if len(s) == 3],
        )


# -- Z/2 linear algebra on bit sets ------------------------------------------


class _Echelon:
    """Incrementally built row echelon basis keyed by highest set bit.

    Each stored vector carries a tag (another bit set) recording which
    tracked generators it is made of.
    """

    def __init__(self):
        self.rows: dict[int, tuple[int, int]] = {}

    def reduce(self, v: int, tag: int = 0) -> tuple[int, int]:
        while v:
            hb = v.bit_length() - 1
            row = self.rows.get(hb)
            if row is None:
                break
            v ^= row[0]
            tag ^= row[1]
        return v, tag

    def add(self, v: int, tag: int = 0) -> bool:
        v, tag = self.reduce(v, tag)
        if v:
            self.rows[v.bit_length() - 1] = (v, tag)
            return True
        return False

    def __len__(self):
        return len(self.rows)


def _rank(vectors: Iterable[int]) -> int:
    ech = _Echelon()
    for v in vectors:
        ech.add(v)
    return len(ech)


def _boundary_columns(K: SimplicialComplex, k: int) -> list[int]:
    if k == 1:
        vi = K._index[0]
        return [(1 << vi[(a,)]) | (1 << vi[(b,)]) for a, b in K.simplices(1)]
    if k == 2:
        ei = K._index[1]
        return [
            (1 << ei[(a, b)]) | (1 << ei[(a, c)]) | (1 << ei[(b, c)]) for a, b, c in K.simplices(2)
        ]
    raise ValueError("boundary is defined for k in {1, 2}")


def boundary(K: SimplicialComplex, k: int) -> np.ndarray:
    """Matrix of the boundary map d_k over Z/2 (rows: (k-1)-simplices, cols: k-simplices)."""
    cols = _boundary_columns(K, k)
    nrows = len(K.simplices(k - 1))
    M = np.zeros((nrows, len(cols)), dtype=np.uint8)
    for j, c in enumerate(cols):
        while c:
            low = c & -c
            M[low.bit_length() - 1, j] = 1
            c ^= low
    return M


def betti(K: SimplicialComplex, k: int) -> int:
    if k == 0:
        return len(K.vertices) - _rank(_boundary_columns(K, 1))
    if k == 1:
        return (
            len(K.edges) - _rank(_boundary_columns(K, 1)) - _rank(_boundary_columns(K, 2))
        )
    raise ValueError("betti is provided for k in {0, 1}")


def chain_of(K: SimplicialComplex, edges: Iterable) -> int:
    """Bit-set chain of ``K`` for an iterable of edges (with Z/2 cancellation)."""
    ei = K._index[1]
    c = 0
    for a, b in edges:
        e = _edge(a, b)
        if e not in ei:
            raise ValueError(f"edge {e} is not in the complex")
        c ^= 1 << ei[e]
    return c


def edges_of(K: SimplicialComplex, chain: int) -> list[tuple]:
    E = K.simplices(1)
    out = []
    while chain:
        low = chain & -chain
        out.append(E[low.bit_length() - 1])
        chain ^= low
    return out


def is_cycle(K: SimplicialComplex, edges: Iterable) -> bool:
    deg: dict = {}
    for a, b in edges:
        deg[a] = deg.get(a, 0) ^ 1
        deg[b] = deg.get(b, 0) ^ 1
    return not any(deg.values())


def _fundamental_cycles(K: SimplicialComplex) -> list[int]:
    """Cycle-space basis from a spanning forest, edges scanned in sorted order."""
    parent = {v: v for v in K.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj: dict = {v: [] for v in K.vertices}
    non_tree = []
    for a, b in K.simplices(1):
        ra, rb = find(a), find(b)
        if ra == rb:
            non_tree.append((a, b))
        else:
            parent[rb] = ra
            adj[a].append(b)
            adj[b].append(a)

    # root each tree so tree paths come from parent pointers
    up: dict = {}
    depth: dict = {}
    for root in sorted(K.vertices):
        if root in up:
            continue
        up[root] = None
        depth[root] = 0
        stack = [root]
        while stack:
            x = stack.pop()
            for y in sorted(adj[x]):
                if y not in up:
                    up[y] = x
                    depth[y] = depth[x] + 1
                    stack.append(y)

    cycles = []
    for a, b in non_tree:
        path = [(a, b)]
        x, y = a, b
        while x != y:
            if depth[x] >= depth[y]:
                path.append((x, up[x]))
                x = up[x]
            else:
                path.append((y, up[y]))
                y = up[y]
        cycles.append(chain_of(K, path))
    return cycles


@dataclass(frozen=True)
class H1Basis:
    complex: SimplicialComplex
    cycles: tuple  # bit-set chains over the sorted edges of ``complex``

    def __len__(self):
        return len(self.cycles)

    def representatives(self) -> list[list[tuple]]:
        return [edges_of(self.complex, c) for c in self.cycles]


class _H1Solver:
    """Expresses 1-cycles of ``K`` in the coordinates of ``h1_basis(K)``."""

    def __init__(self, K: SimplicialComplex):
        self.K = K
        self.ech = _Echelon()
        for b in _boundary_columns(K, 2):
            self.ech.add(b)
        kept = []
        for z in _fundamental_cycles(K):
            if self.ech.add(z, 1 << len(kept)):
                kept.append(z)
        self.basis = H1Basis(K, tuple(kept))

    def coordinates(self, chain: int) -> int:
        rest, tag = self.ech.reduce(chain)
        if rest:
            raise ValueError("chain is not a cycle of the complex")
        return tag


_SOLVERS: dict = {}


def _solver(K: SimplicialComplex) -> _H1Solver:
    s = _SOLVERS.get(K)
    if s is None:
        if len(_SOLVERS) > 256:
            _SOLVERS.clear()
        s = _SOLVERS[K] = _H1Solver(K)
    return s


def h1_basis(K: SimplicialComplex) -> H1Basis:
    return _solver(K).basis


def h1_coordinates(K: SimplicialComplex, edges: Iterable) -> np.ndarray:
    """Coordinates of a 1-cycle (given as edges) in ``h1_basis(K)``."""
    s = _solver(K)
    tag = s.coordinates(chain_of(K, edges))
    return np.array([(tag >> i) & 1 for i in range(len(s.basis))], dtype=np.uint8)


def induced_h1(K: SimplicialComplex, L: SimplicialComplex) -> np.ndarray:
    """Matrix of H1(K) -> H1(L) induced by the inclusion, in the ``h1_basis`` bases."""
    if not K <= L:
        raise ValueError("K is not a subcomplex of L")
    src = h1_basis(K)
    dst = h1_basis(L)
    M = np.zeros((len(dst), len(src)), dtype=np.uint8)
    for j, rep in enumerate(src.representatives()):
        M[:, j] = h1_coordinates(L, rep)
    return M


def rank_z2(M: np.ndarray) -> int:
    """Rank over Z/2 of a 0/1 matrix."""
    cols = (np.asarray(M, dtype=np.uint8) & 1).T
    return _rank(sum(1 << int(i) for i in np.flatnonzero(col)) for col in cols)


def isomorphic_under(K: SimplicialComplex, L: SimplicialComplex, bijection) -> bool:
    """Does ``bijection`` (vertex map) carry K's simplices exactly onto L's?"""
    m = dict(bijection)
    if not K.vertices <= m.keys():
        raise ValueError("bijection must be defined on every vertex of K")
    image = [m[v] for v in K.vertices]
    if len(set(image)) != len(image):
        raise ValueError("vertex map is not injective")
    if set(image) != L.vertices:
        return False
    return K.relabel(m) == L


def all_simplices_complex(n: int) -> SimplicialComplex:
    """Full 2-skeleton on vertices 0..n-1."""
    V = range(n)
    return SimplicialComplex(V, combinations(V, 2), combinations(V, 3))
