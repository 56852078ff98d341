"""Minimum bandwidth: graphs, static lower bounds and the fixed-endpoint relaxation."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from . import _kernels
from .dual import INF, DomainSpec

UNREACHABLE = _kernels.UNREACHABLE
BETA_MAX_VERTICES = 16


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on vertices 0..n-1 with hop distances."""

    n: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[str, ...] | None = None
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        seen = set()
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels must name every vertex")

    @classmethod
    def from_edges(cls, n: int, edges, labels=None) -> Graph:
        return cls(n, tuple((int(u), int(v)) for u, v in edges),
                   None if labels is None else tuple(labels))

    @property
    def m(self) -> int:
        return len(self.edges)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def dist(self) -> np.ndarray:
        """All-pairs hop distances; UNREACHABLE marks disconnected pairs."""
        d = np.full((self.n, self.n), UNREACHABLE, dtype=np.int64)
        for s in range(self.n):
            row = d[s]
            row[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.adjacency[u]:
                    if row[w] == UNREACHABLE:
                        row[w] = row[u] + 1
                        queue.append(w)
        d.setflags(write=False)
        return d

    def distance(self, u: int, v: int) -> float:
        d = int(self.dist[u, v])
        return INF if d == UNREACHABLE else d

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for v in range(self.n):
            indptr[v + 1] = indptr[v] + len(self.adjacency[v])
        indices = np.fromiter((w for a in self.adjacency for w in a),
                              dtype=np.int64, count=int(indptr[-1]))
        return indptr, indices


@dataclass(frozen=True)
class PartialLayout:
    """Vertices fixed at the left end (positions 1..|L|) and right end
    (positions n, n-1, ...) of an arrangement."""

    left: tuple[int, ...] = ()
    right: tuple[int, ...] = ()

    def validate(self, n: int) -> None:
        placed = self.left + self.right
        if len(set(placed)) != len(placed):
            raise ValueError("a vertex is placed twice")
        if len(placed) > n or any(not 0 <= v < n for v in placed):
            raise ValueError("layout does not fit the graph")

    def mirrored(self) -> PartialLayout:
        return PartialLayout(self.right, self.left)

    def free(self, n: int) -> list[int]:
        placed = set(self.left) | set(self.right)
        return [v for v in range(n) if v not in placed]

    def positions(self, n: int) -> dict[int, int]:
        """1-based position of every fixed vertex."""
        pos = {v: h + 1 for h, v in enumerate(self.left)}
        pos.update({v: n - i for i, v in enumerate(self.right)})
        return pos

    @property
    def size(self) -> int:
        return len(self.left) + len(self.right)


def _check_arrangement(g: Graph, arrangement: Sequence[int]) -> None:
    if sorted(arrangement) != list(range(g.n)):
        raise ValueError("arrangement is not a permutation of the vertices")


def bandwidth(g: Graph, arrangement: Sequence[int]) -> int:
    """Longest edge span when arrangement[i] is the vertex at position i+1."""
    _check_arrangement(g, arrangement)
    pos = [0] * g.n
    for i, v in enumerate(arrangement):
        pos[v] = i
    return max((abs(pos[u] - pos[v]) for u, v in g.edges), default=0)


def _layer_sizes(g: Graph, v: int) -> np.ndarray:
    """|N_k(v)| for k = 1..eccentricity of v within its component."""
    row = g.dist[v]
    finite = row[row < UNREACHABLE]
    ecc = int(finite.max()) if finite.size else 0
    counts = np.bincount(finite, minlength=ecc + 1)
    return np.cumsum(counts)[1:]


def alpha_bound(g: Graph) -> int:
    """Half-density bound from the k-neighbourhoods of every vertex."""
    best = 0
    for v in range(g.n):
        sizes = _layer_sizes(g, v)
        for k, size in enumerate(sizes, start=1):
            best = max(best, -(-(int(size) - 1) // (2 * k)))
    return best


def gamma_bound(g: Graph) -> int:
    """Bound from greedily packing each neighbourhood behind a first vertex."""
    if g.n == 0:
        return 0
    best = None
    for v in range(g.n):
        sizes = _layer_sizes(g, v)
        val = max((-(-(int(size) - 1) // k) for k, size in enumerate(sizes, start=1)),
                  default=0)
        best = val if best is None else min(best, val)
    return best


def beta_bound(g: Graph, max_vertices: int = BETA_MAX_VERTICES) -> int:
    """Density bound by subset enumeration; exponential in n."""
    if g.n > max_vertices:
        raise ValueError(f"density bound enumeration capped at n={max_vertices}")
    n = g.n
    if n == 0:
        return 0
    dist = g.dist
    size = 1 << n
    diam = np.zeros(size, dtype=np.int64)
    count = np.zeros(size, dtype=np.int64)
    best = 0
    for s in range(1, size):
        low = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        count[s] = count[rest] + 1
        d = diam[rest]
        r = rest
        while r:
            w = (r & -r).bit_length() - 1
            if dist[low, w] > d:
                d = dist[low, w]
            r &= r - 1
        diam[s] = d
        if count[s] > 1 and d < UNREACHABLE:
            best = max(best, -(-int(count[s] - 1) // int(d)))
    return best


def static_bound(g: Graph) -> int:
    """Strongest of the polynomial graph-theoretic bounds."""
    return max(alpha_bound(g), gamma_bound(g))


def _side_arrays(g: Graph, layout: PartialLayout):
    lseq = np.array(layout.left, dtype=np.int64)
    rseq = np.array(layout.right, dtype=np.int64)
    return lseq, rseq


def ell_bounds(g: Graph, layout: PartialLayout, phi: int) -> list[int] | None:
    """Latest feasible 1-based position of each vertex under bandwidth phi.

    Returns None when some free vertex has no admissible position.
    """
    layout.validate(g.n)
    return _latest(g, layout.left, layout.right, phi)


def f_bounds(g: Graph, layout: PartialLayout, phi: int) -> list[int] | None:
    """Earliest feasible positions; the mirror image of :func:`ell_bounds`."""
    layout.validate(g.n)
    latest = _latest(g, layout.right, layout.left, phi)
    if latest is None:
        return None
    return [g.n + 1 - p for p in latest]


def _latest(g: Graph, this: tuple[int, ...], other: tuple[int, ...], phi: int):
    n = g.n
    indptr, indices = g.csr
    pos = np.zeros(n, dtype=np.int64)
    for h, v in enumerate(this):
        pos[v] = h + 1
    for i, v in enumerate(other):
        pos[v] = n - i
    seq = np.array(this, dtype=np.int64)
    order, norder, par_ptr, par_idx = _kernels.side_structure(
        n, indptr, indices, g.dist, seq, len(this), pos)
    ell = np.empty(n, dtype=np.int64)
    b, idx, slots = (np.empty(n + 2, dtype=np.int64) for _ in range(3))
    used = np.zeros(n + 2, dtype=np.bool_)
    rigid = np.zeros(n + 2, dtype=np.bool_)
    ok = _kernels.side_latest(n, int(phi), len(this), len(other), pos, order,
                              norder, par_ptr, par_idx, ell, b, idx, used, rigid, slots)
    return [int(x) for x in ell] if ok else None


def layout_feasible(g: Graph, layout: PartialLayout, phi: int) -> bool:
    """Whether the relaxation admits bandwidth phi for this partial layout."""
    layout.validate(g.n)
    value = _kernels.min_feasible_phi(g.n, *g.csr, g.dist, *_pack(layout), int(phi))
    return value == phi


def _pack(layout: PartialLayout):
    lseq, rseq = np.array(layout.left, dtype=np.int64), np.array(layout.right, dtype=np.int64)
    return lseq, len(layout.left), rseq, len(layout.right)


def raw_relaxation(g: Graph, layout: PartialLayout, floor: int = 0) -> float:
    """Smallest feasible phi (at least `floor`), without the static clamp."""
    layout.validate(g.n)
    if g.n == 0:
        return max(floor, 0)
    value = int(_kernels.min_feasible_phi(g.n, *g.csr, g.dist, *_pack(layout), int(floor)))
    return INF if value >= g.n and value > floor else value


def relaxation_value(g: Graph, layout: PartialLayout, floor: int = 0) -> float:
    """Lower bound on the bandwidth of every completion of `layout`.

    Combines the binary-searched fixed-endpoint relaxation with the static
    bound max(alpha, gamma); `floor` is a bound already known to hold.
    """
    return raw_relaxation(g, layout, max(floor, _static_cached(g)))


_STATIC_CACHE: dict[Graph, int] = {}


def _static_cached(g: Graph) -> int:
    val = _STATIC_CACHE.get(g)
    if val is None:
        if len(_STATIC_CACHE) > 4096:
            _STATIC_CACHE.clear()
        val = _STATIC_CACHE[g] = static_bound(g)
    return val


# ---------------------------------------------------------------- branching

def left_variable(layout: PartialLayout) -> int:
    """0-based position index of the next slot on the left."""
    return len(layout.left)


def right_variable(layout: PartialLayout, n: int) -> int:
    return n - 1 - len(layout.right)


def layered_order(n: int) -> list[int]:
    """Position variables in left-right alternation: 0, n-1, 1, n-2, ..."""
    out = []
    lo, hi = 0, n - 1
    while lo <= hi:
        out.append(lo)
        if hi != lo:
            out.append(hi)
        lo, hi = lo + 1, hi - 1
    return out


def select_label_layered(layout: PartialLayout, n: int) -> int:
    """Alternate left and right: positions 1, n, 2, n-1, ... (0-based here)."""
    if layout.size >= n:
        raise ValueError("layout is already complete")
    if len(layout.left) <= len(layout.right):
        return left_variable(layout)
    return right_variable(layout, n)


def select_label_greedy(g: Graph, layout: PartialLayout, floor: int = 0) -> int:
    """Pick the side whose worst child has the larger relaxation value.

    Ties go to the left.
    """
    if layout.size >= g.n:
        raise ValueError("layout is already complete")
    oracle = BandwidthOracle(g)
    best_var, best_val = None, None
    for var in (left_variable(layout), right_variable(layout, g.n)):
        vals = oracle.side_values(layout, var, floor)
        worst = min(v for v in vals if v >= 0)
        if best_val is None or worst > best_val:
            best_var, best_val = var, worst
    return best_var


class BandwidthOracle:
    """Relaxation oracle over position variables for one graph.

    Variable j is position j+1 of the arrangement; its value is the vertex
    placed there. Assignments must fix a prefix and a suffix of positions.
    Child batches are memoised per (layout, side, floor), which is sound
    because the value depends only on the partial layout.
    """

    def __init__(self, g: Graph, cache_size: int = 200_000):
        self.graph = g
        self.static = _static_cached(g)
        self._indptr, self._indices = g.csr
        self._cache: dict = {}
        self._cache_size = cache_size

    def layout_of(self, assignment) -> PartialLayout:
        n = self.graph.n
        slots = [None] * n
        for var, val in assignment:
            if slots[var] is not None:
                raise ValueError(f"position {var} assigned twice")
            slots[var] = val
        k = 0
        while k < n and slots[k] is not None:
            k += 1
        right = []
        j = n - 1
        while j >= k and slots[j] is not None:
            right.append(slots[j])
            j -= 1
        if any(s is not None for s in slots[k:j + 1]):
            raise ValueError("assigned positions are not a prefix plus a suffix")
        return PartialLayout(tuple(slots[:k]), tuple(right))

    def value_of(self, assignment, floor: float = 0) -> float:
        layout = self.layout_of(assignment)
        placed = layout.left + layout.right
        if len(set(placed)) != len(placed):
            return INF
        return self.layout_value(layout, floor)

    def layout_value(self, layout: PartialLayout, floor: float = 0) -> float:
        if floor == INF:
            return INF
        g = self.graph
        if g.n == 0:
            return max(floor, 0)
        lo = max(int(floor), self.static)
        value = int(_kernels.min_feasible_phi(g.n, self._indptr, self._indices, g.dist,
                                              *_pack(layout), lo))
        return INF if value >= g.n and value > lo else value

    def is_terminal_assignment(self, assignment) -> bool:
        return len(assignment) == self.graph.n

    def side_values(self, layout: PartialLayout, var: int, floor: float = 0) -> np.ndarray:
        """Values of placing each vertex at position var (must extend layout).

        -1 marks vertices that are already placed.
        """
        n = self.graph.n
        if var == len(layout.left):
            right = False
        elif var == n - 1 - len(layout.right):
            right = True
        else:
            raise ValueError("variable does not extend the layout")
        lo = max(int(floor), self.static)
        key = (layout.left, layout.right, right, lo)
        vals = self._cache.get(key)
        if vals is None:
            g = self.graph
            vals = _kernels.child_values(n, self._indptr, self._indices, g.dist,
                                         *_pack(layout), right, lo)
            if len(self._cache) >= self._cache_size:
                self._cache.clear()
            self._cache[key] = vals
        return vals

    def child_values(self, assignment, var, values, floor: float = 0) -> list[float]:
        """Batch evaluation of assignment + (var, value) for each value."""
        if floor == INF:
            return [INF] * len(values)
        layout = self.layout_of(assignment)
        vals = self.side_values(layout, var, floor)
        n = self.graph.n
        out = []
        for v in values:
            x = int(vals[v])
            out.append(INF if x < 0 or x >= n and x > floor else x)
        return out


def bandwidth_domain(g: Graph) -> tuple[DomainSpec, BandwidthOracle]:
    """Positions as variables, vertices as values, with left/right extension."""
    n = g.n

    def candidates(assignment):
        assigned = {var for var, _ in assignment}
        k = 0
        while k < n and k in assigned:
            k += 1
        j = n - 1
        while j > k and j in assigned:
            j -= 1
        if k >= n:
            return ()
        return (k,) if j == k else (k, j)

    domain = DomainSpec(n, tuple(tuple(range(n)) for _ in range(n)), candidates=candidates)
    return domain, BandwidthOracle(g)


def objective(g: Graph):
    """Objective evaluator over complete position assignments."""
    def evaluate(assignment):
        arrangement = [None] * g.n
        for var, val in assignment:
            arrangement[var] = val
        if len(set(arrangement)) != g.n:
            return INF
        return bandwidth(g, arrangement)
    return evaluate


def ub_heuristic(g: Graph) -> tuple[list[int], int]:
    """Cuthill-McKee level ordering; each component starts at a min-degree vertex.

    Every minimum-degree start is tried and the narrowest ordering kept.
    """
    if g.n == 0:
        return [], 0
    comps = _components(g)
    order: list[int] = []
    for comp in comps:
        mindeg = min(g.degree(v) for v in comp)
        best = None
        for s in (v for v in comp if g.degree(v) == mindeg):
            seq = _cuthill_mckee(g, s)
            width = _span(g, seq)
            if best is None or width < best[0]:
                best = (width, seq)
        order.extend(best[1])
    return order, bandwidth(g, order)


def _components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = [v for v in range(g.n) if g.dist[s, v] < UNREACHABLE]
        for v in comp:
            seen[v] = True
        comps.append(comp)
    return comps


def _cuthill_mckee(g: Graph, start: int) -> list[int]:
    seq = [start]
    seen = {start}
    head = 0
    while head < len(seq):
        u = seq[head]
        head += 1
        nxt = sorted((w for w in g.adjacency[u] if w not in seen),
                     key=lambda w: (g.degree(w), w))
        for w in nxt:
            seen.add(w)
            seq.append(w)
    return seq


def _span(g: Graph, seq: list[int]) -> int:
    pos = {v: i for i, v in enumerate(seq)}
    return max((abs(pos[u] - pos[v]) for u, v in g.edges if u in pos and v in pos),
               default=0)


def five_vertex_graph() -> Graph:
    """Five-vertex example graph a..e used throughout the tests and docs."""
    a, b, c, d, e = range(5)
    return Graph.from_edges(5, [(a, b), (b, c), (b, d), (b, e), (d, e), (c, e)],
                            labels="abcde")
