"""Brute-force ground truth for small instances.

Nothing here is used by the searches themselves; these routines exist so
tests and experiments can compare the bound provers against exhaustive
answers. Every routine is exponential and guarded by a cap from
:class:`OracleLimits`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator

from .bandwidth import Graph, PartialLayout, bandwidth
from .dual import Assignment, DomainSpec, RelaxationOracle

INF = math.inf


@dataclass(frozen=True)
class OracleLimits:
    exact_max_vertices: int = 10
    completion_max_free: int = 8
    enumeration_node_cap: int = 200_000


DEFAULT_LIMITS = OracleLimits()


class OracleCapExceeded(ValueError):
    """Instance too large for the exhaustive routine that was asked for."""


# ------------------------------------------------------------------ bandwidth

def exact_bandwidth(g: Graph, limits: OracleLimits = DEFAULT_LIMITS) -> int:
    """Minimum bandwidth by permutation search.

    Positions are filled left to right; a prefix is dropped as soon as one
    of its edges, or an edge still waiting on an unplaced neighbour, cannot
    beat the incumbent. Mirror images are skipped by keeping vertex 0 in
    the left half.
    """
    n = g.n
    if n > limits.exact_max_vertices:
        raise OracleCapExceeded(f"exact search capped at {limits.exact_max_vertices} vertices")
    if g.m == 0:
        return 0
    adj = g.adjacency
    pos = [-1] * n
    pending = [len(a) for a in adj]  # unplaced neighbours per vertex
    best = n - 1  # every arrangement achieves this

    def waiting_span(p):
        # positions of placed vertices that still have unplaced neighbours
        worst = 0
        for u in range(n):
            if pos[u] >= 0 and pending[u] > 0:
                worst = max(worst, p - pos[u])
        return worst

    def place(p):
        nonlocal best
        if p == n:
            # pruning kept every edge shorter than the incumbent
            best = max(abs(pos[a] - pos[b]) for a, b in g.edges)
            return
        if 2 * p > n - 1 and pos[0] < 0:
            return
        for v in range(n):
            if pos[v] >= 0:
                continue
            if any(pos[u] >= 0 and p - pos[u] >= best for u in adj[v]):
                continue
            pos[v] = p
            for u in adj[v]:
                pending[u] -= 1
            if waiting_span(p + 1) < best:
                place(p + 1)
            for u in adj[v]:
                pending[u] += 1
            pos[v] = -1

    place(0)
    return best


def min_completion_value(g: Graph, layout: PartialLayout,
                         limits: OracleLimits = DEFAULT_LIMITS) -> int:
    """Smallest bandwidth over all ways to place the free vertices."""
    layout.validate(g.n)
    free = layout.free(g.n)
    if len(free) > limits.completion_max_free:
        raise OracleCapExceeded(
            f"completion search capped at {limits.completion_max_free} free vertices")
    head = list(layout.left)
    tail = list(reversed(layout.right))
    return min(bandwidth(g, head + list(mid) + tail) for mid in itertools.permutations(free))


# ------------------------------------------------------------ saturated trees

LabelRule = Callable[[Assignment], int]


def layered_rule(order) -> LabelRule:
    """Label chosen by depth alone: variable order[k] at depth k."""
    order = tuple(order)
    return lambda assignment: order[len(assignment)]


class _PathValues:
    """Node values as the running max of raw oracle values along the path."""

    def __init__(self, domain: DomainSpec, oracle: RelaxationOracle, label_of: LabelRule,
                 node_cap: int):
        self.domain = domain
        self.oracle = oracle
        self.label_of = label_of
        self.node_cap = node_cap
        self._values: dict[Assignment, float] = {}
        self._children: dict[Assignment, tuple[Assignment, ...]] = {}

    def value(self, a: Assignment) -> float:
        v = self._values.get(a)
        if v is None:
            raw = self.oracle.value_of(a)
            v = raw if not a else max(raw, self.value(a[:-1]))
            if len(self._values) >= self.node_cap:
                raise OracleCapExceeded(f"more than {self.node_cap} tree nodes visited")
            self._values[a] = v
        return v

    def terminal(self, a: Assignment) -> bool:
        return len(a) == self.domain.variable_count

    def expandable(self, a: Assignment) -> bool:
        return not self.terminal(a) and self.value(a) < INF

    def children(self, a: Assignment) -> tuple[Assignment, ...]:
        kids = self._children.get(a)
        if kids is None:
            var = self.label_of(a)
            kids = tuple(a + ((var, val),) for val in self.domain.domain_of(var))
            self._children[a] = kids
        return kids


@dataclass(frozen=True)
class SaturatedTree:
    expanded: frozenset  # assignments of the branched-on nodes
    theta: float
    expansions: int


def _theta(pv: _PathValues, expanded: set) -> float:
    if () not in expanded:
        return pv.value(())
    best = INF
    for a in expanded:
        for c in pv.children(a):
            if c not in expanded:
                best = min(best, pv.value(c))
    return best


def enumerate_saturated_trees(domain: DomainSpec, oracle: RelaxationOracle,
                              label_of: LabelRule, max_expansions: int,
                              limits: OracleLimits = DEFAULT_LIMITS) -> Iterator[SaturatedTree]:
    """Every saturated tree with at most `max_expansions` branched-on nodes.

    A saturated tree is fixed by which nodes were branched on; that set is
    closed under taking ancestors, so the enumeration walks ancestor-closed
    sets, each exactly once, by the usual extension-list recursion.
    """
    if max_expansions < 0:
        raise ValueError("max_expansions must be non-negative")
    pv = _PathValues(domain, oracle, label_of, limits.enumeration_node_cap)
    expanded: set = set()
    yield SaturatedTree(frozenset(), pv.value(()), 0)
    if max_expansions == 0 or not pv.expandable(()):
        return

    def grow(candidates):
        for i, a in enumerate(candidates):
            expanded.add(a)
            yield SaturatedTree(frozenset(expanded), _theta(pv, expanded), len(expanded))
            if len(expanded) < max_expansions:
                more = [c for c in pv.children(a) if pv.expandable(c)]
                yield from grow(candidates[i + 1:] + more)
            expanded.discard(a)

    yield from grow([()])


def min_expansions_for_bound(domain: DomainSpec, oracle: RelaxationOracle,
                             label_of: LabelRule, target: float,
                             limits: OracleLimits = DEFAULT_LIMITS) -> float:
    """Fewest branchings after which some saturated tree proves `target`.

    A node already valued at least `target` needs nothing; a terminal below
    it can never be fixed; otherwise the node is branched on and every
    child must be fixed. Returns inf when the target is out of reach.
    """
    pv = _PathValues(domain, oracle, label_of, limits.enumeration_node_cap)
    return _cost(pv, (), target)


def _cost(pv: _PathValues, a: Assignment, target: float) -> float:
    if pv.value(a) >= target:
        return 0
    if pv.terminal(a):
        return INF
    total = 1
    for c in pv.children(a):
        total += _cost(pv, c, target)
        if total == INF:
            return INF
    return total


def bound_budget_profile(domain: DomainSpec, oracle: RelaxationOracle, label_of: LabelRule,
                         limits: OracleLimits = DEFAULT_LIMITS) -> list[tuple[float, float]]:
    """(bound, fewest branchings proving it) for every value a node can take.

    Values are listed in increasing order; the cost column is nondecreasing.
    """
    pv = _PathValues(domain, oracle, label_of, limits.enumeration_node_cap)
    values = set()
    stack = [()]
    while stack:
        a = stack.pop()
        values.add(pv.value(a))
        if pv.expandable(a):
            stack.extend(pv.children(a))
    return [(lam, _cost(pv, (), lam)) for lam in sorted(values)]


def best_bound_within(profile: list[tuple[float, float]], budget: int) -> float:
    """Largest bound some saturated tree proves with at most `budget` branchings."""
    return max(lam for lam, cost in profile if cost <= budget)
