"""
Bernoulli edge percolation with terminal-pair connection events.

Each edge of a fixed host graph is open independently with probability p.
The event for a terminal pair ``(x, y)`` is that an open x-y path exists;
its minimal witnesses are the edge sets of open simple paths, so the pairs
occur disjointly exactly when they can be joined by pairwise edge-disjoint
open paths.

Configurations are integer bitmasks over edge indices (bit ``e`` set means
edge ``e`` is open). Vertices and edges are 0-based in the Python API and
1-based in files and on the command line.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .bounds import bk_chernoff
from .errors import InstanceTooLargeError, SpecFormatError
from .events import Event
from .space import ProductSpace, as_fraction

MAX_PAIRS = 6
MAX_OPEN_EDGES = 32
EXACT_EDGE_CAP = 20


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple((min(u, v), max(u, v)) for u, v in self.edges)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
        object.__setattr__(self, "edges", edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @classmethod
    def grid(cls, rows: int, cols: int) -> "Graph":
        """Grid graph; vertex ``r * cols + c`` (row-major)."""
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
        return cls(rows * cols, tuple(edges))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        """First line: vertex count. Then one ``u v`` edge per line (1-based)."""
        lines = [(no, l.split("#")[0].strip()) for no, l in enumerate(text.splitlines(), 1)]
        lines = [(no, l) for no, l in lines if l]
        if not lines:
            raise SpecFormatError("empty graph file")
        no, first = lines[0]
        try:
            n = int(first)
        except ValueError:
            raise SpecFormatError(f"expected vertex count, got {first!r}", no) from None
        edges = []
        for no, l in lines[1:]:
            parts = l.split()
            if len(parts) != 2:
                raise SpecFormatError(f"expected 'u v', got {l!r}", no)
            try:
                u, v = int(parts[0]) - 1, int(parts[1]) - 1
            except ValueError:
                raise SpecFormatError(f"non-integer vertex in {l!r}", no) from None
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise SpecFormatError(f"invalid edge {l!r}", no)
            edges.append((u, v))
        return cls(n, tuple(edges))

    @classmethod
    def named(cls, name: str) -> "Graph":
        """``gridRxC``, ``cycleN``, ``pathN``, ``completeN`` or ``file:<path>``."""
        import re

        if name.startswith("file:"):
            return cls.from_text(Path(name[5:]).read_text())
        m = re.fullmatch(r"grid(\d+)x(\d+)", name)
        if m:
            return cls.grid(int(m[1]), int(m[2]))
        m = re.fullmatch(r"(cycle|path|complete)(\d+)", name)
        if m:
            return getattr(cls, m[1])(int(m[2]))
        raise ValueError(f"unknown graph {name!r}")

    def to_text(self) -> str:
        return "\n".join([str(self.n_vertices)] + [f"{u + 1} {v + 1}" for u, v in self.edges]) + "\n"


def check_pairs(graph: Graph, pairs: Sequence[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    pairs = tuple((int(x), int(y)) for x, y in pairs)
    flat = [v for p in pairs for v in p]
    if len(set(flat)) != len(flat):
        raise ValueError("terminal vertices must be pairwise distinct")
    if any(not 0 <= v < graph.n_vertices for v in flat):
        raise ValueError("terminal vertex out of range")
    return pairs


def parse_pairs(text: str) -> list[tuple[int, int]]:
    """``"1-9,3-7"`` (1-based) -> ``[(0, 8), (2, 6)]``."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            a, b = item.split("-")
            out.append((int(a) - 1, int(b) - 1))
        except ValueError:
            raise SpecFormatError(f"bad pair {item!r}; expected 'x-y'") from None
    return out


# -- configurations ------------------------------------------------------------------

def sample_configuration(graph: Graph, p: float, rng: np.random.Generator) -> int:
    """Open each edge independently with probability p."""
    if not 0 <= p <= 1:
        raise ValueError(f"p = {p} outside [0, 1]")
    draws = rng.random(graph.n_edges) < p
    return int(sum(1 << i for i in np.flatnonzero(draws)))


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Substream for one sample, keyed by (seed, sample index)."""
    return np.random.default_rng([index, seed])


def _components(n, edges, config):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e, (u, v) in enumerate(edges):
        if config >> e & 1:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    return find


def path_exists(graph: Graph, config: int, x: int, y: int) -> bool:
    if x == y:
        return True
    find = _components(graph.n_vertices, graph.edges, config)
    return find(x) == find(y)


def _simple_paths(graph: Graph, config: int, x: int, y: int) -> list[int]:
    """Edge masks of every open simple x-y path."""
    adj = [[] for _ in range(graph.n_vertices)]
    for e, (u, v) in enumerate(graph.edges):
        if config >> e & 1:
            adj[u].append((v, e))
            adj[v].append((u, e))
    out = []

    def dfs(u, seen, used):
        if u == y:
            out.append(used)
            return
        for v, e in adj[u]:
            if not seen >> v & 1:
                dfs(v, seen | (1 << v), used | (1 << e))

    dfs(x, 1 << x, 0)
    return out


@lru_cache(maxsize=1 << 16)
def _max_disjoint_cached(graph: Graph, pairs: tuple, config: int) -> int:
    from .disjoint import max_packing

    fams = [_simple_paths(graph, config, x, y) for x, y in pairs]
    # a simple path never contains another path's edge set between the same
    # endpoints, so these families are already inclusion-minimal
    return max_packing(fams)


def max_disjoint_connected_pairs(graph: Graph, config: int, pairs: Sequence[tuple[int, int]]) -> int:
    """Most pairs joinable at once by pairwise edge-disjoint open paths."""
    pairs = check_pairs(graph, pairs)
    if len(pairs) > MAX_PAIRS:
        raise InstanceTooLargeError(f"at most {MAX_PAIRS} pairs for the exact search")
    if bin(config).count("1") > MAX_OPEN_EDGES:
        raise InstanceTooLargeError(f"at most {MAX_OPEN_EDGES} open edges for the exact search")
    return _max_disjoint_cached(graph, pairs, config)


def _configurations_with_weights(graph: Graph, p: Fraction):
    m = graph.n_edges
    if m > EXACT_EDGE_CAP:
        raise InstanceTooLargeError(f"exact enumeration capped at {EXACT_EDGE_CAP} edges")
    q = 1 - p
    pw = [p ** j * q ** (m - j) for j in range(m + 1)]
    for config in range(1 << m):
        yield config, pw[bin(config).count("1")]


def exact_pair_probability(graph: Graph, p, pair: tuple[int, int]) -> Fraction:
    """Exact connection probability by enumerating every configuration."""
    p = as_fraction(p)
    x, y = pair
    return sum((w for c, w in _configurations_with_weights(graph, p) if path_exists(graph, c, x, y)),
               Fraction(0))


def exact_X_distribution(graph: Graph, p, pairs) -> list[Fraction]:
    """Exact pmf of the maximum disjoint-connection count."""
    p = as_fraction(p)
    pairs = check_pairs(graph, pairs)
    pmf = [Fraction(0)] * (len(pairs) + 1)
    for c, w in _configurations_with_weights(graph, p):
        pmf[max_disjoint_connected_pairs(graph, c, pairs)] += w
    return pmf


# -- product-space embedding ---------------------------------------------------------

def edge_space(graph: Graph, p) -> ProductSpace:
    """``{0,1}^E`` with Bernoulli(p) factors; coordinate e is edge e."""
    return ProductSpace.bernoulli([as_fraction(p)] * graph.n_edges)


def outcome_to_config(outcome) -> int:
    return sum(1 << e for e, x in enumerate(outcome) if x)


def config_to_outcome(config: int, n_edges: int) -> tuple:
    return tuple(config >> e & 1 for e in range(n_edges))


def path_events(graph: Graph, pairs, space: ProductSpace | None = None) -> list[Event]:
    """Connection events as explicit events on the edge product space."""
    space = space or edge_space(graph, Fraction(1, 2))
    pairs = check_pairs(graph, pairs)
    m = graph.n_edges
    # lexicographic outcome order puts edge 0 in the most significant position
    configs = [sum(((idx >> (m - 1 - e)) & 1) << e for e in range(m)) for idx in range(1 << m)]
    return [
        Event(space, [path_exists(graph, c, x, y) for c in configs], label=f"{x + 1}-{y + 1}")
        for x, y in pairs
    ]


# -- Monte Carlo ---------------------------------------------------------------------

@dataclass
class MonteCarloReport:
    p: float
    samples: int
    seed: int
    lam: float
    lam_exact: bool
    counts: list[int]  # counts[v] = number of samples with X == v
    rows: list[dict] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["r,empirical_survival,std_err,lambda,t,chernoff_bound"]
        for row in self.rows:
            t = "" if row["t"] is None else f"{row['t']:.15g}"
            b = "" if row["chernoff_bound"] is None else f"{row['chernoff_bound']:.15g}"
            lines.append(f"{row['r']},{row['empirical_survival']:.15g},{row['std_err']:.15g},"
                         f"{self.lam:.15g},{t},{b}")
        return "\n".join(lines) + "\n"

    def bound_violations(self, n_se: float = 3.0) -> list[dict]:
        """Rows above lambda where survival - n_se * SE exceeds the bound."""
        return [row for row in self.rows
                if row["chernoff_bound"] is not None
                and row["empirical_survival"] - n_se * row["std_err"] > row["chernoff_bound"]]


def _count_chunk(args):
    graph, pairs, p, seed, start, stop = args
    counts = [0] * (len(pairs) + 1)
    for i in range(start, stop):
        config = sample_configuration(graph, p, sample_rng(seed, i))
        counts[_max_disjoint_cached(graph, pairs, config)] += 1
    return counts


def monte_carlo_tail(graph: Graph, pairs, p, samples: int, seed: int, workers: int = 1,
                     lam: float | None = None) -> MonteCarloReport:
    """Empirical survival of X with standard errors and the Chernoff column.

    Sample ``i`` draws from its own substream keyed by ``(seed, i)``, so the
    report does not depend on ``workers``. lambda is exact when the graph has
    at most 20 edges, otherwise estimated from the same samples (flagged).
    """
    pairs = check_pairs(graph, pairs)
    if len(pairs) > MAX_PAIRS:
        raise InstanceTooLargeError(f"at most {MAX_PAIRS} pairs for the exact search")
    if samples < 1:
        raise ValueError("need at least one sample")
    pf = float(p)
    if not 0 <= pf <= 1:
        raise ValueError(f"p = {p} outside [0, 1]")
    bounds = np.linspace(0, samples, max(1, workers) * 4 + 1).astype(int)
    chunks = [(graph, pairs, pf, seed, int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_count_chunk, chunks))
    else:
        parts = [_count_chunk(c) for c in chunks]
    counts = [sum(col) for col in zip(*parts)]

    lam_exact = lam is None and graph.n_edges <= EXACT_EDGE_CAP
    if lam is None:
        if lam_exact:
            pe = as_fraction(p)
            lam = float(sum((exact_pair_probability(graph, pe, pr) for pr in pairs), Fraction(0)))
        else:
            lam = _estimate_lambda(graph, pairs, pf, samples, seed)
    report = MonteCarloReport(pf, samples, seed, lam, lam_exact, counts)
    surv = samples
    for r in range(1, len(pairs) + 1):
        surv -= counts[r - 1]
        ph = surv / samples
        se = math.sqrt(ph * (1 - ph) / samples)
        t = r - lam if r > lam else None
        report.rows.append({
            "r": r,
            "empirical_survival": ph,
            "std_err": se,
            "t": t,
            "chernoff_bound": bk_chernoff(lam, t) if t is not None else None,
        })
    return report


def _estimate_lambda(graph, pairs, p, samples, seed):
    hits = 0
    for i in range(samples):
        config = sample_configuration(graph, p, sample_rng(seed, i))
        hits += sum(path_exists(graph, config, x, y) for x, y in pairs)
    return hits / samples
