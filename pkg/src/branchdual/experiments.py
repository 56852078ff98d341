"""Run bound provers over instance suites and turn the results into tables.

Per-run records are plain dicts (one JSON line each); the table and profile
builders only read those records, so they work equally on fresh results
and on files written by an earlier run.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from statistics import fmean
from typing import Iterable, Sequence

from .bandwidth import (BETA_MAX_VERTICES, alpha_bound, bandwidth_domain, beta_bound,
                        gamma_bound, layered_order, ub_heuristic)
from .dual import (BoundCertificate, GreedySelector, LayeredSelector, SearchBudget,
                   run_bfs, run_dfs, run_worst_bound)
from .instances import InstanceRecord
from .oracle import DEFAULT_LIMITS, exact_bandwidth

METHODS = ("wbh-vs", "wbh-lr", "dfs", "bfs", "static-bounds")
SEARCH_METHODS = METHODS[:4]
CHECKPOINTS = (100, 1000, 10000)
BM = "BM"

RESULT_COLUMNS = ("instance", "testset", "method", "n", "m", "bound", "status", "expansions",
                  "max_frontier", "reference_ub", "ub_tag", "gap_percent", "alpha", "gamma",
                  "beta")


@dataclass(frozen=True)
class RunConfig:
    methods: tuple[str, ...] = SEARCH_METHODS
    max_expansions: int | None = 10000
    target_bound: int | None = None
    target_percent: float | None = None
    checkpoints: tuple[int, ...] = CHECKPOINTS
    seed: int = 0

    def __post_init__(self):
        if not self.methods:
            raise ValueError("at least one method is required")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
        if self.target_bound is not None and self.target_percent is not None:
            raise ValueError("give a target bound or a target percent, not both")
        if self.target_percent is not None and not 0 <= self.target_percent <= 100:
            raise ValueError("target percent must lie in [0, 100]")


@dataclass
class RunResult:
    instance: str
    testset: str
    method: str
    n: int
    m: int
    certificate: BoundCertificate
    alpha: int
    gamma: int
    beta: int | None
    reference_ub: int | None
    ub_tag: str | None
    extra: dict = field(default_factory=dict)

    @property
    def gap_percent(self) -> float | None:
        return gap_percent(self.reference_ub, self.certificate.proved_bound)

    def to_json(self) -> dict:
        return {
            "instance": self.instance, "testset": self.testset, "method": self.method,
            "n": self.n, "m": self.m, "alpha": self.alpha, "gamma": self.gamma,
            "beta": self.beta, "reference_ub": self.reference_ub, "ub_tag": self.ub_tag,
            "gap_percent": _round(self.gap_percent),
            "certificate": self.certificate.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> RunResult:
        return cls(obj["instance"], obj["testset"], obj["method"], obj["n"], obj["m"],
                   BoundCertificate.from_json(obj["certificate"]), obj["alpha"], obj["gamma"],
                   obj["beta"], obj["reference_ub"], obj["ub_tag"])

    def csv_row(self) -> list:
        c = self.certificate
        return [self.instance, self.testset, self.method, self.n, self.m,
                _fmt(c.proved_bound), c.status, c.expansions, c.max_frontier,
                _fmt(self.reference_ub), self.ub_tag or "", _fmt(_round(self.gap_percent)),
                self.alpha, self.gamma, _fmt(self.beta)]


def gap_percent(reference_ub: int | None, bound: float) -> float | None:
    """100 * (UB - bound) / UB, floored at 0; None without a UB."""
    if reference_ub is None:
        return None
    if bound >= reference_ub:
        return 0.0
    if reference_ub == 0:
        return 0.0
    return 100.0 * (reference_ub - bound) / reference_ub


def target_from_percent(reference_ub: int, percent: float) -> int:
    """Bound that counts as reaching `percent` gap: ceil((1 - p/100) * UB)."""
    # integer arithmetic on the percent scaled by 1e6 avoids float ceil surprises
    scaled = round(percent * 10**6)
    num = (100 * 10**6 - scaled) * reference_ub
    return -(-num // (100 * 10**6))


def testset_of(record: InstanceRecord) -> str:
    return f"{record.source}{record.graph.n}"


def with_reference_ub(record: InstanceRecord) -> InstanceRecord:
    """Fill in a reference UB: planted value, exact optimum if small, else heuristic."""
    if record.reference_ub is not None:
        return record
    g = record.graph
    if g.n <= DEFAULT_LIMITS.exact_max_vertices:
        return record.with_ub(exact_bandwidth(g), "exact")
    return record.with_ub(ub_heuristic(g)[1], "heuristic")


def run_method(record: InstanceRecord, method: str, config: RunConfig,
               prepared=None, statics=None) -> RunResult:
    """One method on one instance. `prepared` lets methods share an oracle cache."""
    g = record.graph
    if statics is None:
        statics = static_bounds(g)
    alpha, gamma, beta = statics
    if method == "static-bounds":
        bound = max(alpha, gamma)
        cert = BoundCertificate(bound, "budget_exhausted", 0, 1, [(0, bound)],
                                frontier_at={})
    else:
        domain, oracle = prepared if prepared is not None else bandwidth_domain(g)
        target = config.target_bound
        if config.target_percent is not None and record.reference_ub is not None:
            target = target_from_percent(record.reference_ub, config.target_percent)
        budget = SearchBudget(config.max_expansions, target,
                              tuple(k for k in config.checkpoints if k > 0))
        if method == "wbh-vs":
            cert = run_worst_bound(domain, oracle, GreedySelector(domain, oracle), budget)
        else:
            selector = LayeredSelector(layered_order(g.n))
            runner = {"wbh-lr": run_worst_bound, "dfs": run_dfs, "bfs": run_bfs}[method]
            cert = runner(domain, oracle, selector, budget)
    return RunResult(record.name, testset_of(record), method, g.n, g.m, cert, alpha, gamma,
                     beta, record.reference_ub, record.ub_tag)


def static_bounds(g) -> tuple[int, int, int | None]:
    beta = beta_bound(g) if g.n <= BETA_MAX_VERTICES else None
    return alpha_bound(g), gamma_bound(g), beta


def run_suite(records: Iterable[InstanceRecord], config: RunConfig) -> list[RunResult]:
    """Every configured method on every instance, ordered by instance name.

    Methods on the same instance share one oracle, whose memo of child
    values depends only on the partial layout, so sharing is safe.
    """
    out = []
    for record in sorted(records, key=lambda r: r.name):
        record = with_reference_ub(record)
        prepared = bandwidth_domain(record.graph)
        statics = static_bounds(record.graph)
        for method in config.methods:
            out.append(run_method(record, method, config, prepared, statics))
    return out


# ------------------------------------------------------------------ outputs

def _round(x):
    return None if x is None else round(x, 6)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "inf" if math.isinf(x) else f"{x:.6f}"
    return str(x)


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def results_jsonl(results: Iterable[RunResult]) -> str:
    return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in results)


def results_csv(results: Iterable[RunResult]) -> str:
    return _csv_text(RESULT_COLUMNS, (r.csv_row() for r in results))


def load_results(text: str) -> list[RunResult]:
    return [RunResult.from_json(json.loads(line)) for line in text.splitlines() if line.strip()]


def _method_rank(m: str) -> int:
    return METHODS.index(m) if m in METHODS else len(METHODS)


def _groups(results: Iterable[RunResult]) -> dict[tuple[str, str], list[RunResult]]:
    groups: dict[tuple[str, str], list[RunResult]] = {}
    for r in results:
        groups.setdefault((r.testset, r.method), []).append(r)
    return dict(sorted(groups.items(), key=lambda kv: (kv[0][0], _method_rank(kv[0][1]))))


def gap_table(results: Sequence[RunResult], checkpoints=CHECKPOINTS) -> list[dict]:
    """Mean gap per test set and method at each checkpoint, plus a BM row.

    A cell is None when some instance's run stopped before the checkpoint
    without finishing, or when no instance has a reference UB.
    """
    rows = []
    bm: dict[str, dict[str, float]] = {}
    for (testset, method), rs in _groups(results).items():
        rs = [r for r in rs if r.reference_ub is not None]
        if method == "static-bounds":
            continue
        row = {"testset": testset, "method": method}
        for k in checkpoints:
            vals = []
            for r in rs:
                b = r.certificate.bound_at_checkpoint(k)
                if b is None:
                    vals = None
                    break
                vals.append(gap_percent(r.reference_ub, b))
            row[f"gap_at_{k}"] = fmean(vals) if vals else None
        rows.append(row)
        for r in rs:
            bm.setdefault(testset, {})[r.instance] = gap_percent(r.reference_ub, _bm_bound(r))
    for testset in sorted(bm):
        mean = fmean(bm[testset].values())
        rows.append({"testset": testset, "method": BM,
                     **{f"gap_at_{k}": mean for k in checkpoints}})
    rows.sort(key=lambda r: (r["testset"], _method_rank(r["method"])))
    return rows


def _bm_bound(r: RunResult) -> int:
    """Strongest static bound on record for the instance."""
    return max(b for b in (r.alpha, r.gamma, r.beta) if b is not None)


def frontier_table(results: Sequence[RunResult], checkpoints=CHECKPOINTS) -> list[dict]:
    """Mean max-frontier per test set and search method at each checkpoint."""
    rows = []
    for (testset, method), rs in _groups(results).items():
        if method == "static-bounds":
            continue
        row = {"testset": testset, "method": method}
        for k in checkpoints:
            vals = [r.certificate.frontier_at.get(k) for r in rs]
            row[f"frontier_at_{k}"] = None if any(v is None for v in vals) else fmean(vals)
        rows.append(row)
    return rows


def table_csv(rows: list[dict], prefix: str, checkpoints=CHECKPOINTS) -> str:
    header = ["testset", "method"] + [f"{prefix}_{k}" for k in checkpoints]
    return _csv_text(header, ([_fmt(r[h]) for h in header] for r in rows))


def profile_curves(results: Sequence[RunResult], target_percent: float,
                   max_expansions: int | None = None) -> list[tuple[str, int, float]]:
    """Fraction of instances whose bound reaches the target, per method.

    Each instance's target is ceil((1 - p/100) * UB). Curves are step
    functions listed at their change points, plus the start and the end of
    the budget. Static bounds give a flat baseline.
    """
    per_method: dict[str, list[RunResult]] = {}
    for r in results:
        if r.reference_ub is None:
            continue
        per_method.setdefault(r.method, []).append(r)
    if max_expansions is None:
        max_expansions = max((r.certificate.expansions for r in results), default=0)
    rows = []
    for method in sorted(per_method, key=_method_rank):
        rs = per_method[method]
        total = len(rs)
        reach = []
        for r in rs:
            target = target_from_percent(r.reference_ub, target_percent)
            if method == "static-bounds":
                reach.append(0 if max(r.alpha, r.gamma) >= target else None)
                continue
            e = r.certificate.reached_at(target)
            if e is None and r.certificate.finished and r.certificate.proved_bound >= target:
                e = r.certificate.expansions
            if e is not None and e > max_expansions:
                e = None
            reach.append(e)
        points = sorted({0, max_expansions, *(e for e in reach if e is not None)})
        for p in points:
            hit = sum(1 for e in reach if e is not None and e <= p)
            rows.append((method, p, hit / total))
    return rows


def profile_csv(rows) -> str:
    return _csv_text(("method", "expansions", "fraction"),
                     ([m, e, f"{f:.6f}"] for m, e, f in rows))
