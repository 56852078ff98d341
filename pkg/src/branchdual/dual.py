"""Branching-dual engine: partial branching trees and the searches that grow them.

A tree proves a lower bound equal to the smallest relaxation value over its
open and terminal nodes. The searches here only ever add nodes, so the
proved bound never decreases.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Hashable, Iterable, Protocol, Sequence

INF = math.inf

Assignment = tuple[tuple[int, Hashable], ...]


@dataclass(frozen=True)
class DomainSpec:
    """Variables 0..variable_count-1 with finite domains.

    `candidates(assignment)` optionally restricts which unassigned variables
    may be branched on next; by default every unassigned variable may.
    """

    variable_count: int
    domains: tuple[tuple[Hashable, ...], ...]
    candidates: Callable[[Assignment], Sequence[int]] | None = None

    def __post_init__(self):
        if self.variable_count < 1:
            raise ValueError("need at least one variable")
        if len(self.domains) != self.variable_count:
            raise ValueError("one domain per variable")
        if any(len(d) == 0 for d in self.domains):
            raise ValueError("domains must be non-empty")

    def domain_of(self, var: int) -> tuple[Hashable, ...]:
        return self.domains[var]

    def candidate_variables(self, assignment: Assignment) -> Sequence[int]:
        if self.candidates is not None:
            return self.candidates(assignment)
        used = {var for var, _ in assignment}
        return [j for j in range(self.variable_count) if j not in used]


class RelaxationOracle(Protocol):
    def value_of(self, assignment: Assignment) -> float: ...

    def is_terminal_assignment(self, assignment: Assignment) -> bool: ...


class LabelSelector(Protocol):
    def choose_label(self, tree: BranchTree, node: int, assignment: Assignment) -> int: ...


@dataclass(slots=True)
class BranchNode:
    parent: int | None
    level: int
    value: float
    arc: tuple[int, Hashable] | None = None  # (variable, value) on the arc from the parent
    label: int | None = None
    children: dict | None = None
    seq: int = 0
    terminal: bool = False


@dataclass(frozen=True)
class SearchBudget:
    """Stopping rules, plus expansion counts at which to snapshot the frontier."""

    max_expansions: int | None = None
    target_bound: float | None = None
    checkpoints: tuple[int, ...] = ()

    def __post_init__(self):
        if self.max_expansions is not None and self.max_expansions < 1:
            raise ValueError("max_expansions must be at least 1")


@dataclass
class BoundCertificate:
    proved_bound: float
    status: str  # optimal | budget_exhausted | target_reached | infeasible
    expansions: int
    max_frontier: int
    trace: list[tuple[int, float]]
    best_terminal: float = INF
    frontier_at: dict[int, int] = field(default_factory=dict)

    @property
    def finished(self) -> bool:
        """True when the search ran out of work rather than being stopped."""
        return self.status in ("optimal", "infeasible")

    def bound_at_checkpoint(self, expansions: int) -> float | None:
        """Bound a run with this budget would report, or None if unknown."""
        if expansions <= self.expansions or self.finished:
            return self.bound_at(expansions)
        return None

    def bound_at(self, expansions: int) -> float:
        """Proved bound after the given number of expansions (step function)."""
        best = None
        for e, b in self.trace:
            if e > expansions:
                break
            best = b
        return best

    def reached_at(self, target: float) -> int | None:
        """First expansion count at which the bound is at least `target`."""
        for e, b in self.trace:
            if b >= target:
                return e
        return None

    def to_json(self) -> dict:
        return {
            "bound": _enc(self.proved_bound),
            "status": self.status,
            "expansions": self.expansions,
            "max_frontier": self.max_frontier,
            "trace": [[e, _enc(b)] for e, b in self.trace],
            "frontier_at": {str(k): v for k, v in sorted(self.frontier_at.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> BoundCertificate:
        return cls(_dec(obj["bound"]), obj["status"], obj["expansions"],
                   obj["max_frontier"], [(e, _dec(b)) for e, b in obj["trace"]],
                   frontier_at={int(k): v for k, v in obj.get("frontier_at", {}).items()})


def _enc(x: float):
    return "inf" if x == INF else int(x)


def _dec(x):
    return INF if x == "inf" else x


class ExhaustedTree(RuntimeError):
    """No feasible open or terminal node is left: the problem is infeasible."""


class BranchTree:
    """Arena of branch nodes with the bookkeeping needed for the dual value.

    Child relaxation values are stored as max(parent value, oracle value) so
    monotonicity down the tree holds even for imperfect oracles. Children
    with infinite value are kept as records but never become open. Open
    nodes are bucketed by value; each bucket lists nodes in creation order.
    """

    def __init__(self, domain: DomainSpec, oracle: RelaxationOracle,
                 checkpoints: Iterable[int] = ()):
        self.domain = domain
        self.oracle = oracle
        self.checkpoints = frozenset(checkpoints)
        self.frontier_at: dict[int, int] = {}
        self.nodes: list[BranchNode] = []
        self.terminal_min = INF
        self.best_terminal: int | None = None
        self.open_count = 0
        self.max_frontier = 0
        self.expansions = 0
        self._buckets: dict[float, list[int]] = {}
        self._bucket_open: dict[float, int] = {}
        self._keys: list[float] = []
        root_value = oracle.value_of(())
        self.root = self._add(None, 1, root_value, None)
        self.trace: list[tuple[int, float]] = [(0, self.bound())]

    def _add(self, parent, level, value, arc) -> int:
        nid = len(self.nodes)
        node = BranchNode(parent, level, value, arc, seq=nid)
        self.nodes.append(node)
        if value == INF:
            return nid
        if level == self.domain.variable_count + 1:
            node.terminal = True
            if value < self.terminal_min:
                self.terminal_min = value
                self.best_terminal = nid
            return nid
        self.open_count += 1
        if self.open_count > self.max_frontier:
            self.max_frontier = self.open_count
        bucket = self._buckets.get(value)
        if bucket is None:
            bucket = self._buckets[value] = []
            self._bucket_open[value] = 0
            heapq.heappush(self._keys, value)
        bucket.append(nid)
        self._bucket_open[value] += 1
        return nid

    def assignment(self, nid: int) -> Assignment:
        arcs = []
        node = self.nodes[nid]
        while node.arc is not None:
            arcs.append(node.arc)
            node = self.nodes[node.parent]
        return tuple(reversed(arcs))

    def is_open(self, nid: int) -> bool:
        node = self.nodes[nid]
        return node.children is None and not node.terminal and node.value < INF

    def open_nodes(self) -> list[int]:
        return [i for i in range(len(self.nodes)) if self.is_open(i)]

    def open_min(self) -> float:
        keys = self._keys
        while keys and self._bucket_open[keys[0]] == 0:
            value = heapq.heappop(keys)
            del self._buckets[value]
            del self._bucket_open[value]
        return keys[0] if keys else INF

    def bound(self) -> float:
        """Minimum value over open and terminal nodes (+inf if none is feasible)."""
        return min(self.open_min(), self.terminal_min)

    def eligible(self) -> list[int]:
        """Open nodes whose value equals the current bound, oldest first."""
        theta = self.bound()
        if theta == INF or theta not in self._buckets:
            return []
        nodes = self.nodes
        live = [nid for nid in self._buckets[theta] if nodes[nid].children is None]
        self._buckets[theta] = live
        return list(live)

    def expand(self, nid: int, label: int, assignment: Assignment | None = None) -> list[int]:
        """Branch on `label` at an open node; returns the new open child ids."""
        node = self.nodes[nid]
        if not self.is_open(nid):
            raise ValueError(f"node {nid} is not open")
        if assignment is None:
            assignment = self.assignment(nid)
        if any(var == label for var, _ in assignment):
            raise ValueError(f"variable {label} already assigned on the path")
        values = self.domain.domain_of(label)
        batch = getattr(self.oracle, "child_values", None)
        if batch is not None:
            raw = batch(assignment, label, values, node.value)
        else:
            raw = [self.oracle.value_of(assignment + ((label, v),)) for v in values]
        node.label = label
        node.children = {}
        self.open_count -= 1
        self._bucket_open[node.value] -= 1
        fresh = []
        parent_value = node.value
        level = node.level + 1
        children_open = level <= self.domain.variable_count
        kids = node.children
        add = self._add
        for v, c in zip(values, raw):
            c = c if c > parent_value else parent_value
            cid = add(nid, level, c, (label, v))
            kids[v] = cid
            if children_open and c < INF:
                fresh.append(cid)
        self.expansions += 1
        if self.expansions in self.checkpoints:
            self.frontier_at[self.expansions] = self.max_frontier
        theta = self.bound()
        if theta != self.trace[-1][1]:
            self.trace.append((self.expansions, theta))
        return fresh

    def certificate(self, status: str) -> BoundCertificate:
        theta = self.bound()
        trace = list(self.trace)
        if trace[-1][0] != self.expansions:
            trace.append((self.expansions, theta))
        frontier_at = dict(self.frontier_at)
        if status in ("optimal", "infeasible"):
            for k in self.checkpoints:
                if k > self.expansions:
                    frontier_at[k] = self.max_frontier
        return BoundCertificate(theta, status, self.expansions, self.max_frontier,
                                trace, self.terminal_min, frontier_at)


def dual_value(tree: BranchTree) -> float:
    return tree.bound()


def expand(tree: BranchTree, node: int, label: int) -> list[int]:
    return tree.expand(node, label)


# ------------------------------------------------------------------ selectors

@dataclass
class LayeredSelector:
    """Label chosen by node level alone: `order[level - 1]`."""

    order: Sequence[int]

    def choose_label(self, tree, node, assignment):
        return self.order[tree.nodes[node].level - 1]


@dataclass
class FunctionSelector:
    """Label as a pure function of the path assignment."""

    func: Callable[[Assignment], int]

    def choose_label(self, tree, node, assignment):
        return self.func(assignment)


class GreedySelector:
    """Among candidate variables, pick the one maximising the worst child value.

    Ties keep the earliest candidate.
    """

    def __init__(self, domain: DomainSpec, oracle: RelaxationOracle):
        self.domain = domain
        self.oracle = oracle

    def choose_label(self, tree, node, assignment):
        floor = tree.nodes[node].value
        best, best_val = None, None
        batch = getattr(self.oracle, "child_values", None)
        for var in self.domain.candidate_variables(assignment):
            values = self.domain.domain_of(var)
            if batch is not None:
                raw = batch(assignment, var, values, floor)
            else:
                raw = [self.oracle.value_of(assignment + ((var, v),)) for v in values]
            feasible = [max(floor, c) for c in raw if c < INF]
            worst = min(feasible, default=INF)
            if best_val is None or worst > best_val:
                best, best_val = var, worst
        return best


# ------------------------------------------------------------------- searches

@dataclass
class StepOutcome:
    expanded: int
    new_bound: float
    optimal_terminal_found: bool


def worst_bound_step(tree: BranchTree, selector: LabelSelector,
                     max_expansions: int | None = None) -> StepOutcome:
    """One iteration of the worst-bound heuristic.

    Expands every eligible node (snapshot taken before any expansion) unless
    a terminal node already attains the bound. Stops early once the tree's
    expansion count reaches `max_expansions`.
    """
    theta = tree.bound()
    if theta == INF:
        raise ExhaustedTree("no feasible open or terminal node")
    if tree.terminal_min == theta:
        return StepOutcome(0, theta, True)
    done = 0
    for nid in tree.eligible():
        if max_expansions is not None and tree.expansions >= max_expansions:
            break
        assignment = tree.assignment(nid)
        label = selector.choose_label(tree, nid, assignment)
        tree.expand(nid, label, assignment)
        done += 1
    return StepOutcome(done, tree.bound(), False)


def _stop_status(tree: BranchTree, budget: SearchBudget) -> str | None:
    theta = tree.bound()
    if theta == INF:
        return "infeasible"
    if tree.terminal_min == theta:
        return "optimal"
    if budget.target_bound is not None and theta >= budget.target_bound:
        return "target_reached"
    if budget.max_expansions is not None and tree.expansions >= budget.max_expansions:
        return "budget_exhausted"
    return None


def run_worst_bound(domain: DomainSpec, oracle: RelaxationOracle,
                    selector: LabelSelector, budget: SearchBudget = SearchBudget()
                    ) -> BoundCertificate:
    """Worst-bound heuristic: repeatedly expand all nodes attaining the bound."""
    tree = BranchTree(domain, oracle, budget.checkpoints)
    while True:
        status = _stop_status(tree, budget)
        if status is not None:
            return tree.certificate(status)
        worst_bound_step(tree, selector, budget.max_expansions)


def _run_ordered(domain, oracle, selector, budget, key) -> BoundCertificate:
    tree = BranchTree(domain, oracle, budget.checkpoints)
    queue = []
    if tree.is_open(tree.root):
        heapq.heappush(queue, (key(tree, tree.root), tree.root))
    while True:
        status = _stop_status(tree, budget)
        if status is not None:
            return tree.certificate(status)
        _, nid = heapq.heappop(queue)
        assignment = tree.assignment(nid)
        for cid in tree.expand(nid, selector.choose_label(tree, nid, assignment), assignment):
            heapq.heappush(queue, (key(tree, cid), cid))


def _dfs_key(tree, nid):
    node = tree.nodes[nid]
    return (-node.level, node.value, node.seq)


def _bfs_key(tree, nid):
    node = tree.nodes[nid]
    return (node.level, node.seq)


def run_dfs(domain: DomainSpec, oracle: RelaxationOracle, selector: LabelSelector,
            budget: SearchBudget = SearchBudget()) -> BoundCertificate:
    """Depth-first: deepest open node, then smallest value, then oldest."""
    return _run_ordered(domain, oracle, selector, budget, _dfs_key)


def run_bfs(domain: DomainSpec, oracle: RelaxationOracle, selector: LabelSelector,
            budget: SearchBudget = SearchBudget()) -> BoundCertificate:
    """Breadth-first: shallowest open node, oldest first."""
    return _run_ordered(domain, oracle, selector, budget, _bfs_key)


# ------------------------------------------------------------ contract check

@dataclass(frozen=True)
class Violation:
    condition: str  # "a" monotone, "b" exact at leaves, "c" history-independent
    assignment: Assignment
    detail: str


def check_relaxation_contract(domain: DomainSpec, oracle: RelaxationOracle,
                              sample_assignments: Iterable[Assignment],
                              objective: Callable[[Assignment], float] | None = None,
                              max_orders: int = 6) -> list[Violation]:
    """Check monotonicity, leaf exactness and history independence.

    Monotonicity compares each sample against all its one-step extensions
    over the candidate variables. History independence re-evaluates the
    sample with its (variable, value) pairs in other orders, interleaved
    with unrelated evaluations.
    """
    out: list[Violation] = []
    n = domain.variable_count
    for assignment in sample_assignments:
        assignment = tuple(assignment)
        base = oracle.value_of(assignment)
        if len(assignment) < n:
            for var in domain.candidate_variables(assignment):
                for val in domain.domain_of(var):
                    ext = assignment + ((var, val),)
                    v = oracle.value_of(ext)
                    if v < base:
                        out.append(Violation("a", ext, f"{v} < parent {base}"))
        elif objective is not None:
            true = objective(assignment)
            if base != true:
                out.append(Violation("b", assignment, f"value {base} != objective {true}"))
        for k, order in enumerate(permutations(assignment)):
            if k >= max_orders:
                break
            if len(order) > 0:
                try:
                    oracle.value_of(order[:-1])
                except ValueError:
                    pass  # not a reachable partial assignment in this domain
            v = oracle.value_of(tuple(order))
            if v != base:
                out.append(Violation("c", assignment, f"{v} != {base} for order {order}"))
    return out


def max_with_parent(oracle: RelaxationOracle) -> RelaxationOracle:
    """Wrap an oracle so a value never falls below that of any path prefix."""
    return _PrefixMax(oracle)


class _PrefixMax:
    def __init__(self, inner):
        self.inner = inner

    def value_of(self, assignment):
        return max(self.inner.value_of(assignment[:k]) for k in range(len(assignment) + 1))

    def is_terminal_assignment(self, assignment):
        return self.inner.is_terminal_assignment(assignment)
