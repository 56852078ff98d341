"""Instance generation, Matrix Market input and the canonical instance file.

Randomness comes from numpy's PCG64 generator (``np.random.default_rng``),
seeded explicitly, so a (generator, parameters, seed) triple pins the graph.
Vertex pairs are visited in lexicographic order (u < v), one uniform draw
per pair.
"""

from __future__ import annotations

import io
import math
import re
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import scipy.io

from .bandwidth import Graph

FORMAT_VERSION = 1
UB_TAGS = ("planted_phi", "heuristic", "exact")
SOURCES = ("random", "turner", "matrix_market")


class InstanceFormatError(ValueError):
    """Raised for unreadable instance or Matrix Market text."""


@dataclass(frozen=True)
class InstanceRecord:
    """A graph plus where it came from and an optional reference upper bound.

    `params` holds generator parameters as strings (seed, d, phi, path, ...)
    so records round-trip through the text format unchanged.
    """

    graph: Graph
    name: str
    source: str
    params: tuple[tuple[str, str], ...] = ()
    reference_ub: int | None = None
    ub_tag: str | None = None
    planted_layout: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if (self.reference_ub is None) != (self.ub_tag is None):
            raise ValueError("reference_ub and ub_tag go together")
        if self.ub_tag is not None and self.ub_tag not in UB_TAGS:
            raise ValueError(f"unknown ub tag {self.ub_tag!r}")
        if not re.fullmatch(r"[A-Za-z0-9_.\-]+", self.name):
            raise ValueError(f"instance name {self.name!r} must be a plain token")
        if self.planted_layout is not None:
            if sorted(self.planted_layout) != list(range(self.graph.n)):
                raise ValueError("planted layout must be a permutation of the vertices")

    def param(self, key: str, cast=str):
        for k, v in self.params:
            if k == key:
                return cast(v)
        raise KeyError(key)

    def with_ub(self, ub: int, tag: str) -> InstanceRecord:
        return replace(self, reference_ub=int(ub), ub_tag=tag)


def _fmt_prob(d: float) -> str:
    return repr(float(d))


def _upper_pairs(n: int):
    iu, ju = np.triu_indices(n, 1)
    return iu, ju


def gen_random(n: int, d: float, seed: int) -> InstanceRecord:
    """Erdos-Renyi G(n, d): each of the n(n-1)/2 pairs kept with probability d."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= d <= 1.0:
        raise ValueError("d must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = _upper_pairs(n)
    keep = rng.random(len(iu)) < d
    g = Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))
    name = f"random_n{n}_d{d:g}_s{seed}"
    params = (("d", _fmt_prob(d)), ("n", str(n)), ("seed", str(seed)))
    return InstanceRecord(g, name, "random", params)


def turner_candidate_count(n: int, phi: int) -> int:
    """Pairs at layout distance at most phi: phi*n - phi*(phi+1)/2."""
    return phi * n - phi * (phi + 1) // 2


def turner_edge_probability(n: int, phi: int, d: float) -> float:
    """Per-candidate probability giving expected density d, clamped at 1."""
    cand = turner_candidate_count(n, phi)
    if cand == 0:
        return 0.0
    wanted = d * (n * (n - 1) / 2)
    p = wanted / cand
    if p > 1.0 + 1e-9:
        warnings.warn(
            f"density {d} unreachable with bandwidth {phi} on {n} vertices "
            f"(max {cand / (n * (n - 1) / 2):.4f}); using every candidate edge",
            RuntimeWarning, stacklevel=3)
    return min(1.0, p)


def turner_target_density(n: int, phi: int, d: float) -> float:
    """Density the generator actually aims for: min(d, achievable)."""
    pairs = n * (n - 1) / 2
    return min(d, turner_candidate_count(n, phi) / pairs) if pairs else 0.0


def gen_turner(n: int, phi: int, d: float, seed: int) -> InstanceRecord:
    """Random graph whose edges all fit a hidden layout of bandwidth <= phi.

    The hidden layout is a uniform random permutation; each pair of
    vertices at most phi apart in it becomes an edge independently.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 1 <= phi <= n - 1:
        raise ValueError("phi must lie in [1, n-1]")
    if not 0.0 <= d <= 1.0:
        raise ValueError("d must lie in [0, 1]")
    p = turner_edge_probability(n, phi, d)
    rng = np.random.default_rng(seed)
    layout = rng.permutation(n)  # layout[i] = vertex at position i
    pos = np.empty(n, dtype=np.int64)
    pos[layout] = np.arange(n)
    iu, ju = _upper_pairs(n)
    near = np.abs(pos[iu] - pos[ju]) <= phi
    draws = rng.random(len(iu))
    keep = near & (draws < p)
    g = Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))
    name = f"turner_n{n}_phi{phi}_d{d:g}_s{seed}"
    params = (("d", _fmt_prob(d)), ("n", str(n)), ("phi", str(phi)), ("seed", str(seed)))
    return InstanceRecord(g, name, "turner", params, reference_ub=phi,
                          ub_tag="planted_phi",
                          planted_layout=tuple(int(v) for v in layout))


# ----------------------------------------------------------------- Matrix Market

def parse_matrix_market(text: str, name: str = "mm", path: str | None = None) -> InstanceRecord:
    """Undirected graph of the off-diagonal pattern of a square coordinate matrix.

    Stored entries count as edges whatever their value; symmetry qualifiers
    do not matter since (i, j) and (j, i) give the same edge.
    """
    raw = text.encode()
    try:
        rows, cols, _entries, fmt, _field, _symm = scipy.io.mminfo(io.BytesIO(raw))
    except ValueError as exc:
        raise InstanceFormatError(f"bad Matrix Market header: {exc}") from exc
    if fmt != "coordinate":
        raise InstanceFormatError(f"only coordinate format is supported, got {fmt!r}")
    if rows != cols:
        raise InstanceFormatError(f"matrix must be square, got {rows}x{cols}")
    try:
        mat = scipy.io.mmread(io.BytesIO(raw))
    except ValueError as exc:
        raise InstanceFormatError(f"bad Matrix Market entries: {exc}") from exc
    coo = mat.tocoo()
    edges = {(min(i, j), max(i, j)) for i, j in zip(coo.row.tolist(), coo.col.tolist()) if i != j}
    labels = tuple(str(i + 1) for i in range(rows))
    g = Graph.from_edges(rows, sorted(edges), labels=labels)
    params = (("path", path),) if path is not None else ()
    return InstanceRecord(g, name, "matrix_market", params)


def read_matrix_market(path: str | Path) -> InstanceRecord:
    path = Path(path)
    return parse_matrix_market(path.read_text(), name=path.stem, path=str(path))


# ----------------------------------------------------------------- canonical file

_HEADER = re.compile(r"bandwidth-instance v(\d+) n=(\d+) m=(\d+)")
_META = re.compile(r"# ([A-Za-z_][A-Za-z0-9_]*)=(.*)")
_RESERVED = ("name", "source", "reference_ub", "tag", "labels", "planted_layout")


def format_instance(record: InstanceRecord) -> str:
    """Canonical text: header, `# key=value` metadata, sorted 0-based edges."""
    g = record.graph
    lines = [f"bandwidth-instance v{FORMAT_VERSION} n={g.n} m={g.m}",
             f"# name={record.name}", f"# source={record.source}"]
    for key, value in sorted(record.params):
        if key in _RESERVED or "\n" in value:
            raise ValueError(f"parameter {key}={value!r} cannot be written")
        lines.append(f"# {key}={value}")
    if record.reference_ub is not None:
        lines.append(f"# reference_ub={record.reference_ub}")
        lines.append(f"# tag={record.ub_tag}")
    if g.labels is not None:
        if any("," in lab or "\n" in lab for lab in g.labels):
            raise ValueError("vertex labels may not contain commas or newlines")
        lines.append("# labels=" + ",".join(g.labels))
    if record.planted_layout is not None:
        lines.append("# planted_layout=" + ",".join(map(str, record.planted_layout)))
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> InstanceRecord:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise InstanceFormatError("empty instance file")
    head = _HEADER.fullmatch(lines[0])
    if head is None:
        raise InstanceFormatError(f"bad header line {lines[0]!r}")
    version, n, m = map(int, head.groups())
    if version != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported format version {version}")
    meta: dict[str, str] = {}
    params = []
    i = 1
    while i < len(lines) and lines[i].startswith("#"):
        mt = _META.fullmatch(lines[i])
        if mt is None:
            raise InstanceFormatError(f"bad metadata line {lines[i]!r}")
        key, value = mt.groups()
        if key in meta or any(k == key for k, _ in params):
            raise InstanceFormatError(f"repeated metadata key {key!r}")
        if key in _RESERVED:
            meta[key] = value
        else:
            params.append((key, value))
        i += 1
    edges = []
    for line in lines[i:]:
        parts = line.split(" ")
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise InstanceFormatError(f"bad edge line {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if not u < v < n:
            raise InstanceFormatError(f"edge {u} {v} must satisfy u < v < n={n}")
        if edges and (u, v) <= edges[-1]:
            raise InstanceFormatError("edges must be sorted and distinct")
        edges.append((u, v))
    if len(edges) != m:
        raise InstanceFormatError(f"header says m={m} but found {len(edges)} edges")
    labels = tuple(meta["labels"].split(",")) if "labels" in meta else None
    if labels is not None and len(labels) != n:
        raise InstanceFormatError("labels must name every vertex")
    try:
        g = Graph.from_edges(n, edges, labels=labels)
        ub = meta.get("reference_ub")
        planted = meta.get("planted_layout")
        return InstanceRecord(
            g, meta.get("name", "instance"), meta.get("source", "matrix_market"),
            tuple(params),
            reference_ub=None if ub is None else int(ub),
            ub_tag=meta.get("tag"),
            planted_layout=None if planted is None else tuple(int(x) for x in planted.split(",")),
        )
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def write_instance(record: InstanceRecord, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(format_instance(record))
    return path


def read_instance(path: str | Path) -> InstanceRecord:
    return parse_instance(Path(path).read_text())


def random_suite(n: int = 30, densities=None, seeds=range(10)) -> list[InstanceRecord]:
    """Random grid: every density crossed with every seed (90 graphs by default).

    Seeds are made distinct per cell so two cells never share a stream.
    """
    densities = [round(0.1 * k, 1) for k in range(1, 10)] if densities is None else densities
    out = []
    for di, d in enumerate(densities):
        for s in seeds:
            out.append(gen_random(n, d, 1000 * di + s))
    return out


def turner_suite(n: int = 30, phis=None, densities=(0.3, 0.5), seeds=range(10)) -> list[InstanceRecord]:
    """Turner grid over bandwidths, densities and seeds."""
    phis = list(range(3, 28, 3)) if phis is None else phis
    out = []
    for pi, phi in enumerate(phis):
        for di, d in enumerate(densities):
            for s in seeds:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    out.append(gen_turner(n, phi, d, 100000 + 1000 * (pi * len(densities) + di) + s))
    return out


def density(g: Graph) -> float:
    pairs = g.n * (g.n - 1) / 2
    return g.m / pairs if pairs else 0.0


def binomial_sigma(pairs: int, p: float) -> float:
    return math.sqrt(pairs * p * (1 - p))
