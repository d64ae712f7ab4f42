"""Labeled simple graphs with GF(2) bitset adjacency and the graph quantities
used by the rank bounds and entanglement measures.

Vertices are ``0..n-1``.  Row ``v`` of the adjacency is an int whose bit ``u``
is set iff ``(u, v)`` is an edge.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InputError, ResourceError

MAX_VERTICES = 24


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _check_vertex_count(n: int) -> None:
    if n < 1:
        raise InputError(f"vertex count must be positive, got {n}")
    if n > MAX_VERTICES:
        raise ResourceError(f"vertex count {n} exceeds the limit of {MAX_VERTICES}")


@dataclass(frozen=True)
class Graph:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        _check_vertex_count(self.n)
        if len(self.rows) != self.n:
            raise InputError("adjacency must have one row per vertex")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.rows):
            if row & ~full:
                raise InputError(f"row {v} references a vertex >= n")
            if (row >> v) & 1:
                raise InputError(f"self-loop at vertex {v}")
            for u in _bits(row):
                if not (self.rows[u] >> v) & 1:
                    raise InputError(f"adjacency not symmetric at ({u}, {v})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        _check_vertex_count(n)
        rows = [0] * n
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _bits(self.rows[u]) if u < v]

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return _popcount(self.rows[v])

    def degrees(self) -> list[int]:
        return [self.degree(v) for v in range(self.n)]

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    @property
    def num_edges(self) -> int:
        return sum(self.degrees()) // 2

    def adjacency(self) -> np.ndarray:
        return np.array([[(r >> u) & 1 for u in range(self.n)] for r in self.rows], dtype=np.uint8)

    def remove_vertices(self, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph on the remaining vertices, relabeled in increasing order."""
        drop = set(vertices)
        keep = [v for v in range(self.n) if v not in drop]
        pos = {v: i for i, v in enumerate(keep)}
        edges = [(pos[u], pos[v]) for u, v in self.edges() if u in pos and v in pos]
        return Graph.from_edges(len(keep), edges), keep

    def __str__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"


# -- constructors --------------------------------------------------------

def line(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def ring(n: int) -> Graph:
    if n < 3:
        raise InputError("a ring needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star(n: int) -> Graph:
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def empty(n: int) -> Graph:
    return Graph.from_edges(n, [])


_FAMILIES = {"line": line, "ring": ring, "star": star, "complete": complete, "empty": empty}


def make_graph(kind: str, n: int | None = None, edges: Iterable[tuple[int, int]] | None = None) -> Graph:
    """Build one of the named families, or ``kind="edges"`` from an edge list."""
    if kind in ("edges", "edge-list"):
        if n is None or edges is None:
            raise InputError("edge-list graphs need n and edges")
        return Graph.from_edges(n, edges)
    if kind not in _FAMILIES:
        raise InputError(f"unknown graph family {kind!r}")
    if n is None or n < 1:
        raise InputError("n must be >= 1")
    return _FAMILIES[kind](n)


def is_odd_ring(G: Graph) -> bool:
    """True iff G is the cycle 0-1-...-(n-1)-0 with odd n >= 3 (labeled, not up to isomorphism)."""
    return G.n >= 3 and G.n % 2 == 1 and G == ring(G.n)


def is_ring(G: Graph) -> bool:
    return G.n >= 3 and G == ring(G.n)


# -- bipartitions and GF(2) matrices -------------------------------------

@dataclass(frozen=True)
class Bipartition:
    """Subset A of the vertices as a bitmask (bit v set iff v in A)."""

    n: int
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.n:
            raise InputError(f"mask {self.mask:#x} references vertices outside 0..{self.n - 1}")

    @classmethod
    def from_vertices(cls, n: int, vertices: Iterable[int]) -> Bipartition:
        mask = 0
        for v in vertices:
            if not 0 <= v < n:
                raise InputError(f"vertex {v} outside 0..{n - 1}")
            mask |= 1 << v
        return cls(n, mask)

    @property
    def vertices(self) -> list[int]:
        return list(_bits(self.mask))

    @property
    def complement_mask(self) -> int:
        return ((1 << self.n) - 1) & ~self.mask

    @property
    def complement_vertices(self) -> list[int]:
        return list(_bits(self.complement_mask))

    def complement(self) -> Bipartition:
        return Bipartition(self.n, self.complement_mask)

    @property
    def is_proper(self) -> bool:
        return 0 < self.mask < (1 << self.n) - 1

    def require_proper(self) -> Bipartition:
        if not self.is_proper:
            raise InputError("bipartition must be a nonempty proper subset")
        return self

    def __len__(self) -> int:
        return _popcount(self.mask)


def all_cuts(n: int, pinned: bool = True) -> Iterator[Bipartition]:
    """Nonempty proper subsets A.  With ``pinned`` vertex 0 is always in A, which
    lists each unordered cut {A, complement} exactly once (2**(n-1) - 1 cuts)."""
    full = (1 << n) - 1
    if pinned:
        for rest in range((1 << (n - 1)) - 1):
            yield Bipartition(n, 1 | (rest << 1))
    else:
        for mask in range(1, full):
            yield Bipartition(n, mask)


@dataclass(frozen=True)
class GF2Matrix:
    """Rows as int bitsets; bit j of row i is entry (i, j)."""

    rows: tuple[int, ...]
    ncols: int
    nrows: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        object.__setattr__(self, "nrows", len(self.rows))
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise InputError("row has bits beyond ncols")

    @classmethod
    def from_array(cls, arr) -> GF2Matrix:
        arr = np.asarray(arr, dtype=np.int64) & 1
        if arr.ndim != 2:
            raise InputError("expected a 2-D array")
        rows = [sum(int(x) << j for j, x in enumerate(row)) for row in arr]
        return cls(tuple(rows), arr.shape[1])

    def to_array(self) -> np.ndarray:
        return np.array([[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows], dtype=np.uint8).reshape(
            self.nrows, self.ncols
        )

    def transpose(self) -> GF2Matrix:
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            for j in _bits(r):
                cols[j] |= 1 << i
        return GF2Matrix(tuple(cols), self.nrows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)


def _row_reduce(rows: Sequence[int]) -> list[int]:
    """Echelon basis keyed by distinct leading bits."""
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in basis:
                r ^= basis[top]
            else:
                basis[top] = r
                break
    return list(basis.values())


def gf2_rank(M: GF2Matrix | Sequence[int]) -> int:
    rows = M.rows if isinstance(M, GF2Matrix) else M
    return len(_row_reduce(rows))


def gf2_solve(rows: Sequence[int], target: int) -> int | None:
    """Find a bitmask ``c`` with XOR of ``rows[i]`` over set bits of ``c`` equal to
    ``target``; ``None`` if target is outside the row span."""
    basis: dict[int, tuple[int, int]] = {}
    for i, r in enumerate(rows):
        combo = 1 << i
        while r:
            top = r.bit_length() - 1
            if top in basis:
                br, bc = basis[top]
                r ^= br
                combo ^= bc
            else:
                basis[top] = (r, combo)
                break
    combo = 0
    t = target
    while t:
        top = t.bit_length() - 1
        if top not in basis:
            return None
        br, bc = basis[top]
        t ^= br
        combo ^= bc
    return combo


def cut_matrix(G: Graph, A: Bipartition) -> GF2Matrix:
    """|A| x |complement| matrix of edges crossing the cut, rows and columns in
    increasing vertex order."""
    if A.n != G.n:
        raise InputError("bipartition size does not match the graph")
    A.require_proper()
    cols = A.complement_vertices
    rows = []
    for a in A.vertices:
        r = 0
        for j, b in enumerate(cols):
            if (G.rows[a] >> b) & 1:
                r |= 1 << j
        rows.append(r)
    return GF2Matrix(tuple(rows), len(cols))


def cut_rank(G: Graph, A: Bipartition) -> int:
    return gf2_rank(cut_matrix(G, A))


# -- local complementation -----------------------------------------------

def local_complement(G: Graph, v: int) -> Graph:
    """Complement the subgraph induced on the neighborhood of ``v``."""
    if not 0 <= v < G.n:
        raise InputError(f"vertex {v} outside 0..{G.n - 1}")
    nb = G.rows[v]
    rows = list(G.rows)
    for u in _bits(nb):
        rows[u] ^= nb & ~(1 << u)
    return Graph(G.n, tuple(rows))


@dataclass(frozen=True)
class Orbit:
    graphs: tuple[Graph, ...]
    closed: bool

    def __len__(self) -> int:
        return len(self.graphs)

    def __contains__(self, G) -> bool:
        return G in self.graphs


def lc_orbit(G: Graph, cap: int = 10_000) -> Orbit:
    """Breadth-first closure under local complementation, deduplicated by labeled
    adjacency.  ``closed`` is False when the search stopped at ``cap`` graphs."""
    if cap < 1:
        raise InputError("cap must be >= 1")
    seen = {G.rows: G}
    queue = deque([G])
    while queue:
        H = queue.popleft()
        for v in range(H.n):
            if not H.rows[v]:
                continue
            K = local_complement(H, v)
            if K.rows in seen:
                continue
            if len(seen) >= cap:
                return Orbit(tuple(seen.values()), False)
            seen[K.rows] = K
            queue.append(K)
    return Orbit(tuple(seen.values()), True)


# -- vertex cover -----------------------------------------------------------

def _is_cover(G: Graph, cover: int) -> bool:
    return all((cover >> v) & 1 or not (G.rows[v] & ~cover) for v in range(G.n))


def min_vertex_cover(G: Graph) -> tuple[int, list[int]]:
    """Exact minimum vertex cover by branch and bound.

    Branches on a maximum-degree vertex (take it, or take all its neighbors),
    forces the neighbor of any degree-1 vertex, and prunes with the bound
    ``ceil(remaining edges / max degree)``.
    """
    rows = list(G.rows)
    best_cover = (1 << G.n) - 1
    best_size = G.n
    # greedy start
    greedy, live = 0, list(rows)
    while any(live):
        v = max(range(G.n), key=lambda u: _popcount(live[u]))
        greedy |= 1 << v
        for u in _bits(live[v]):
            live[u] &= ~(1 << v)
        live[v] = 0
    best_cover, best_size = greedy, _popcount(greedy)

    def remove(live: list[int], v: int) -> None:
        for u in _bits(live[v]):
            live[u] &= ~(1 << v)
        live[v] = 0

    def search(live: list[int], chosen: int, size: int) -> None:
        nonlocal best_cover, best_size
        live = list(live)
        # forced moves from degree-1 vertices
        changed = True
        while changed:
            changed = False
            for v in range(G.n):
                if live[v] and live[v] & (live[v] - 1) == 0:
                    u = live[v].bit_length() - 1
                    chosen |= 1 << u
                    size += 1
                    remove(live, u)
                    changed = True
        if size >= best_size:
            return
        degs = [_popcount(r) for r in live]
        m = sum(degs) // 2
        if m == 0:
            best_cover, best_size = chosen, size
            return
        dmax = max(degs)
        if size + -(-m // dmax) >= best_size:
            return
        v = degs.index(dmax)
        nb = live[v]
        taken = list(live)
        remove(taken, v)
        search(taken, chosen | (1 << v), size + 1)
        if size + _popcount(nb) < best_size:
            skipped = list(live)
            for u in _bits(nb):
                remove(skipped, u)
            search(skipped, chosen | nb, size + _popcount(nb))

    search(rows, 0, 0)
    return best_size, list(_bits(best_cover))


def min_vertex_cover_exhaustive(G: Graph) -> tuple[int, list[int]]:
    """Brute force over subsets by increasing size; reference oracle for n <= 12."""
    if G.n > 16:
        raise ResourceError("exhaustive vertex cover is limited to n <= 16")
    for size in range(G.n + 1):
        for combo in itertools.combinations(range(G.n), size):
            mask = sum(1 << v for v in combo)
            if _is_cover(G, mask):
                return size, list(combo)
    raise AssertionError("unreachable")


def is_vertex_cover(G: Graph, vertices: Iterable[int]) -> bool:
    return _is_cover(G, sum(1 << v for v in set(vertices)))


# -- degree and connectivity ---------------------------------------------

def degree_parity_all_odd(G: Graph) -> bool:
    return all(d % 2 == 1 for d in G.degrees())


def is_connected(G: Graph) -> bool:
    reached = 1
    frontier = 1
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= G.rows[v]
        frontier = nxt & ~reached
        reached |= nxt
    return reached == (1 << G.n) - 1


# -- text formats ----------------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """First non-comment line is ``n``; then one ``u v`` pair per line.  ``#``
    starts a comment.  Errors carry the 1-based line number."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line_ = raw.split("#", 1)[0].strip()
        if not line_:
            continue
        fields = line_.split()
        try:
            nums = [int(f) for f in fields]
        except ValueError:
            raise InputError(f"line {lineno}: expected integers, got {line_!r}") from None
        if n is None:
            if len(nums) != 1:
                raise InputError(f"line {lineno}: expected the vertex count")
            n = nums[0]
            if n < 1:
                raise InputError(f"line {lineno}: vertex count must be positive")
            _check_vertex_count(n)
            continue
        if len(nums) != 2:
            raise InputError(f"line {lineno}: expected 'u v'")
        u, v = nums
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"line {lineno}: vertex out of range 0..{n - 1}")
        if u == v:
            raise InputError(f"line {lineno}: self-loop at vertex {u}")
        edges.append((u, v))
    if n is None:
        raise InputError("empty edge list: missing vertex count")
    return Graph.from_edges(n, edges)


def format_edge_list(G: Graph) -> str:
    lines = [str(G.n)] + [f"{u} {v}" for u, v in G.edges()]
    return "\n".join(lines) + "\n"


def read_graph6(s: str) -> Graph:
    """Decode a graph6 string (n <= 62 form, optional ``>>graph6<<`` header)."""
    s = s.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise InputError("empty graph6 string")
    data = [ord(ch) - 63 for ch in s]
    if any(not 0 <= x < 64 for x in data):
        raise InputError("graph6 characters must be in the range '?'..'~'")
    n = data[0]
    if n == 63:
        raise InputError("graph6 with n > 62 is not supported")
    bits = []
    for x in data[1:]:
        bits.extend((x >> (5 - i)) & 1 for i in range(6))
    needed = n * (n - 1) // 2
    if len(bits) < needed or len(data) - 1 != -(-needed // 6):
        raise InputError("graph6 string has the wrong length")
    edges = []
    pos = 0
    for j in range(1, n):
        for i in range(j):
            if bits[pos]:
                edges.append((i, j))
            pos += 1
    return Graph.from_edges(n, edges)


def to_graph6(G: Graph) -> str:
    bits = [int(G.has_edge(i, j)) for j in range(1, G.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    chars = [chr(G.n + 63)]
    for p in range(0, len(bits), 6):
        x = 0
        for b in bits[p:p + 6]:
            x = (x << 1) | b
        chars.append(chr(x + 63))
    return "".join(chars)


# -- exhaustive enumeration ------------------------------------------------

def all_graphs(n: int) -> Iterator[Graph]:
    """All 2**C(n,2) labeled graphs on n vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    for code in range(1 << len(pairs)):
        yield Graph.from_edges(n, [p for e, p in enumerate(pairs) if (code >> e) & 1])


def all_adjacency_rows(n: int) -> np.ndarray:
    """Adjacency bitset rows of every labeled graph on n vertices, shape
    (2**C(n,2), n).  Graph ``g`` has edge ``pairs[e]`` iff bit e of g is set,
    with pairs in ``itertools.combinations`` order (same as :func:`all_graphs`)."""
    pairs = list(itertools.combinations(range(n), 2))
    if len(pairs) > 28:
        raise ResourceError("exhaustive enumeration limited to n <= 8")
    codes = np.arange(1 << len(pairs), dtype=np.int64)
    rows = np.zeros((codes.size, n), dtype=np.int64)
    for e, (u, v) in enumerate(pairs):
        bit = (codes >> e) & 1
        rows[:, u] |= bit << v
        rows[:, v] |= bit << u
    return rows


def batch_gf2_rank(rows: np.ndarray, ncols: int) -> np.ndarray:
    """GF(2) rank of many small matrices at once; ``rows`` has shape (B, r) of
    int bitsets with ``ncols`` significant bits."""
    work = np.array(rows, dtype=np.int64, copy=True)
    B, r = work.shape
    rank = np.zeros(B, dtype=np.int64)
    used = np.zeros((B, r), dtype=bool)
    idx = np.arange(B)
    for col in range(ncols):
        has = ((work >> col) & 1).astype(bool) & ~used
        found = has.any(axis=1)
        piv = np.argmax(has, axis=1)
        pivot_rows = work[idx, piv]
        hit = ((work >> col) & 1).astype(bool) & found[:, None]
        hit[idx, piv] = False
        work ^= np.where(hit, pivot_rows[:, None], 0)
        used[idx[found], piv[found]] = True
        rank += found
    return rank


def batch_cut_ranks(rows: np.ndarray, A: Bipartition) -> np.ndarray:
    """``cut_rank`` for every graph in an adjacency batch (see :func:`all_adjacency_rows`)."""
    A.require_proper()
    comp = A.complement_vertices
    sub = np.zeros((rows.shape[0], len(A)), dtype=np.int64)
    for i, a in enumerate(A.vertices):
        for j, b in enumerate(comp):
            sub[:, i] |= ((rows[:, a] >> b) & 1) << j
    return batch_gf2_rank(sub, len(comp))


def batch_is_connected(rows: np.ndarray) -> np.ndarray:
    B, n = rows.shape
    reached = np.ones(B, dtype=np.int64)
    for _ in range(n):
        nxt = reached.copy()
        for v in range(n):
            nxt |= np.where((reached >> v) & 1, rows[:, v], 0)
        reached = nxt
    return reached == (1 << n) - 1


def batch_all_degrees_odd(rows: np.ndarray) -> np.ndarray:
    n = rows.shape[1]
    deg = np.zeros(rows.shape, dtype=np.int64)
    for u in range(n):
        deg += (rows >> u) & 1
    return np.all(deg % 2 == 1, axis=1)
