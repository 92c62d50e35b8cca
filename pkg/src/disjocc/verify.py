"""
Exhaustive and seeded-random verification corpora.

Each ``*_suite`` function walks a corpus of small instances, checks one
family of exact claims on every instance and returns a :class:`SuiteResult`.
Instances are generated smallest first, so the first recorded violation is a
minimal counterexample within the corpus.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .bounds import FLOAT_SLACK, bk_chernoff, janson_bound
from .disjoint import (
    X_distribution,
    Y_distribution,
    Z_distribution,
    box_event,
    domination_violations,
    max_packing,
)
from .events import Event, are_independent, probability, psi
from .space import Factor, ProductSpace, is_linear, is_positively_associated, upsets
from .specfile import instance_to_dict

MAX_RECORDED = 5

BINARY_FACTORS = (
    Factor.bernoulli(Fraction(1, 2)),
    Factor.bernoulli(Fraction(1, 3)),
    Factor.bernoulli(Fraction(2, 3)),
)

DIAMOND_FACTORS = (
    Factor.diamond([Fraction(1, 4)] * 4),
    Factor.diamond([Fraction(4, 9), Fraction(2, 9), Fraction(2, 9), Fraction(1, 9)]),
    Factor.diamond([Fraction(1, 6), Fraction(1, 6), Fraction(1, 6), Fraction(1, 2)]),
)


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    checks: int = 0
    violations: int = 0
    counterexamples: list = field(default_factory=list)
    elapsed: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, space, events, **detail):
        self.violations += 1
        if len(self.counterexamples) < MAX_RECORDED:
            doc = instance_to_dict(space, events)
            doc["detail"] = {k: str(v) for k, v in detail.items()}
            self.counterexamples.append(doc)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: {self.instances} instances, {self.checks} checks, "
                f"{self.violations} violations ({self.elapsed:.1f}s)")


class _Timer:
    def __init__(self, result):
        self.result = result

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.result

    def __exit__(self, *exc):
        self.result.elapsed = time.perf_counter() - self.t0


# -- corpora -------------------------------------------------------------------------

def outcome_leq_matrix(space: ProductSpace) -> np.ndarray:
    """Product order on outcome indices."""
    grids = np.array(list(itertools.product(*(range(s) for s in space.shape))), dtype=np.intp)
    leq = np.ones((space.size, space.size), dtype=bool)
    for i, f in enumerate(space.factors):
        col = grids[:, i]
        leq &= f.leq_matrix[col[:, None], col[None, :]]
    return leq


_UPSET_CACHE: dict = {}


def all_upsets(space: ProductSpace) -> list[np.ndarray]:
    """Membership arrays of every increasing event of the space."""
    sig = space.order_signature
    if sig not in _UPSET_CACHE:
        masks = upsets(outcome_leq_matrix(space))
        size = space.size
        _UPSET_CACHE[sig] = [np.array([m >> i & 1 for i in range(size)], dtype=bool) for m in masks]
    return _UPSET_CACHE[sig]


def spaces_over(factor_options: Sequence[Factor], n: int) -> Iterator[ProductSpace]:
    for combo in itertools.product(factor_options, repeat=n):
        yield ProductSpace(combo)


def monotone_corpus(factor_options: Sequence[Factor], max_n: int, max_k: int,
                    direction: str = "increasing") -> Iterator[tuple[ProductSpace, list[Event]]]:
    """Every space over the factor options and every ordered family of monotone events.

    ``direction`` is ``"increasing"`` or ``"decreasing"``; decreasing events
    are the complements of the up-sets.
    """
    for n in range(1, max_n + 1):
        for space in spaces_over(factor_options, n):
            ups = all_upsets(space)
            base = [u if direction == "increasing" else ~u for u in ups]
            evs = [Event(space, m) for m in base]
            for k in range(1, max_k + 1):
                for fam in itertools.product(evs, repeat=k):
                    yield space, list(fam)


def random_space(rng: np.random.Generator, max_n: int, max_size: int, linear: bool = True,
                 allow_zero: bool = False, n: int | None = None) -> ProductSpace:
    n = int(rng.integers(1, max_n + 1)) if n is None else n
    factors = []
    for _ in range(n):
        s = int(rng.integers(2, max_size + 1))
        lo = 0 if allow_zero else 1
        raw = [int(x) for x in rng.integers(lo, 6, size=s)]
        if sum(raw) == 0:
            raw[0] = 1
        total = sum(raw)
        weights = [Fraction(x, total) for x in raw]
        if linear:
            factors.append(Factor.chain(weights))
        else:
            factors.append(Factor.antichain([str(i) for i in range(s)], weights))
    return ProductSpace(tuple(factors))


def random_event(rng: np.random.Generator, space: ProductSpace, kind: str = "arbitrary") -> Event:
    if kind == "arbitrary":
        density = rng.random()
        return Event(space, rng.random(space.size) < density)
    if kind == "cylinder":
        coord = int(rng.integers(0, space.n))
        values = np.flatnonzero(rng.random(space.shape[coord]) < 0.5)
        return Event.cylinder(space, coord, values.tolist())
    gens = [space.outcome(int(i)) for i in rng.integers(0, space.size, size=int(rng.integers(0, 3)))]
    return Event.upset(space, gens) if kind == "increasing" else Event.downset(space, gens)


def random_corpus(seed: int, count: int, max_n: int = 3, max_size: int = 3, max_k: int = 4,
                  linear: bool = True, kinds: Sequence[str] = ("arbitrary", "arbitrary", "cylinder")):
    """Seeded random spaces and families; each event's kind is drawn from ``kinds``."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        space = random_space(rng, max_n, max_size, linear)
        k = int(rng.integers(1, max_k + 1))
        yield space, [random_event(rng, space, kinds[int(rng.integers(0, len(kinds)))]) for _ in range(k)]


# -- suites --------------------------------------------------------------------------

def domination_suite(corpus: Iterable, name: str = "monotone-domination", check_pa: bool = True) -> SuiteResult:
    """X is stochastically dominated by Y on every instance.

    With ``check_pa`` (the default) instances over factors that are not
    positively associated are skipped, as the theorem requires.
    """
    res = SuiteResult(name)
    pa_cache = {}
    with _Timer(res):
        for space, events in corpus:
            if check_pa:
                ok = True
                for f in space.factors:
                    if id(f) not in pa_cache:
                        pa_cache[id(f)] = is_positively_associated(f)
                    ok = ok and pa_cache[id(f)]
                if not ok:
                    res.notes["skipped_non_pa"] = res.notes.get("skipped_non_pa", 0) + 1
                    continue
            res.instances += 1
            xd = X_distribution(events)
            yd = Y_distribution([probability(e) for e in events])
            res.checks += max(xd.k, yd.k) + 1
            bad = domination_violations(xd, yd)
            if bad:
                r, px, py = bad[0]
                res.record(space, events, r=r, pr_X_ge_r=px, pr_Y_ge_r=py)
    return res


def monotone_domination_suite(max_n: int = 3, max_k: int = 3, factor_options=BINARY_FACTORS,
                   check_pa: bool = True) -> SuiteResult:
    corpus = itertools.chain(
        monotone_corpus(factor_options, max_n, max_k, "increasing"),
        monotone_corpus(factor_options, max_n, max_k, "decreasing"),
    )
    return domination_suite(corpus, "monotone-domination", check_pa)


def pa_poset_suite(max_n: int = 2, max_k: int = 2, factor_options=DIAMOND_FACTORS) -> SuiteResult:
    corpus = itertools.chain(
        monotone_corpus(factor_options, max_n, max_k, "increasing"),
        monotone_corpus(factor_options, max_n, max_k, "decreasing"),
    )
    res = domination_suite(corpus, "pa-poset")
    res.name = "pa-poset"
    return res


def bk_suite(n: int = 2) -> SuiteResult:
    """mu(A box B) <= mu(A) mu(B) for every ordered pair of increasing events."""
    res = SuiteResult("bk-recovery")
    with _Timer(res):
        space = ProductSpace.cube(n)
        evs = [Event(space, m) for m in all_upsets(space)]
        for a, b in itertools.product(evs, repeat=2):
            res.instances += 1
            res.checks += 1
            lhs = probability(box_event([a, b]))
            rhs = probability(a) * probability(b)
            if lhs > rhs:
                res.record(space, [a, b], box=lhs, product=rhs)
    return res


def reimer_suite(n: int = 2, k: int = 2, random_instances: int = 0, seed: int = 0,
                 random_n: int = 3, random_k: int = 3) -> SuiteResult:
    """mu(box of A_i) <= prod mu(A_i) for arbitrary events on uniform {0,1}^n.

    Exhaustive over all ordered k-tuples of events for the given n, plus
    ``random_instances`` seeded random families on {0,1}^random_n.
    """
    res = SuiteResult("reimer")
    with _Timer(res):
        space = ProductSpace.cube(n)
        all_events = [Event(space, [m >> i & 1 for i in range(space.size)]) for m in range(1 << space.size)]
        for fam in itertools.product(all_events, repeat=k):
            _reimer_check(res, space, list(fam))
        rng = np.random.default_rng(seed)
        rspace = ProductSpace.cube(random_n)
        for _ in range(random_instances):
            fam = [Event(rspace, rng.random(rspace.size) < 0.5) for _ in range(random_k)]
            _reimer_check(res, rspace, fam)
    return res


def _reimer_check(res, space, fam):
    res.instances += 1
    res.checks += 1
    lhs = probability(box_event(fam))
    rhs = Fraction(1)
    for e in fam:
        rhs *= probability(e)
    if lhs > rhs:
        res.record(space, fam, box=lhs, product=rhs)


def tail_bound_suite(corpus: Iterable, variable: str = "X") -> SuiteResult:
    """Exact Pr(V >= lam + t) <= exp(-lam phi(t/lam)) for every integer t >= 1.

    ``variable`` is ``"X"`` (requires linearly ordered factors) or ``"Z"``.
    """
    name = "tail-X" if variable == "X" else "tail-Z"
    res = SuiteResult(name)
    with _Timer(res):
        for space, events in corpus:
            if variable == "X" and not all(is_linear(f) for f in space.factors):
                res.notes["skipped_nonlinear"] = res.notes.get("skipped_nonlinear", 0) + 1
                continue
            res.instances += 1
            lam = sum((probability(e) for e in events), Fraction(0))
            dist = X_distribution(events) if variable == "X" else Z_distribution(events)
            bound_fn = bk_chernoff if variable == "X" else janson_bound
            for t in range(1, len(events) + 2):
                res.checks += 1
                tail = dist.survival(lam + t)
                bound = bound_fn(float(lam), float(t))
                if float(tail) > bound + FLOAT_SLACK:
                    res.record(space, events, t=t, lam=lam, tail=tail, bound=bound)
    return res


def psi_zero_suite(corpus: Iterable) -> SuiteResult:
    """When no coordinate affects two events, the laws of X and Y coincide."""
    res = SuiteResult("psi-zero")
    psi_cache = {}
    with _Timer(res):
        for space, events in corpus:
            key = (space.order_signature, tuple(e.key for e in events))
            if key not in psi_cache:
                psi_cache[key] = psi(events)
            if psi_cache[key] != 0:
                continue
            res.instances += 1
            res.checks += 1
            xd = X_distribution(events)
            yd = Y_distribution([probability(e) for e in events])
            if xd.pmf != yd.pmf:
                res.record(space, events, X=xd.pmf, Y=yd.pmf)
    return res


def harris_suite(corpus: Iterable) -> SuiteResult:
    """Mutually independent increasing events: mu(box_I) == mu(cap_I) for every I."""
    res = SuiteResult("harris")
    with _Timer(res):
        for space, events in corpus:
            if not are_independent(events):
                continue
            res.instances += 1
            k = len(events)
            for r in range(1, k + 1):
                for I in itertools.combinations(range(k), r):
                    res.checks += 1
                    inter = np.logical_and.reduce([events[i].membership for i in I])
                    lhs = probability(box_event(events, I))
                    rhs = space.mass(inter)
                    if lhs != rhs:
                        res.record(space, events, I=I, box=lhs, intersection=rhs)
    return res


def cylinder_corpus(factor_options=BINARY_FACTORS, max_n: int = 3, max_k: int = 3):
    """Increasing events each depending on its own block of coordinates.

    Every assignment of coordinates to ``k`` labelled blocks (or to no block)
    is used; each event ranges over the up-sets of its block's subcube.
    """
    for n in range(1, max_n + 1):
        for space in spaces_over(factor_options, n):
            for k in range(1, max_k + 1):
                for assign in itertools.product(range(k + 1), repeat=n):
                    blocks = [[i for i in range(n) if assign[i] == j] for j in range(k)]
                    choices = [_block_upsets(space, b) for b in blocks]
                    for fam in itertools.product(*choices):
                        yield space, list(fam)


def _block_upsets(space, block):
    """Increasing events determined by the coordinates in ``block``."""
    sub = ProductSpace(tuple(space.factors[i] for i in block)) if block else None
    out = []
    if sub is None:
        return [Event.full(space), Event.empty(space)]
    grids = list(itertools.product(*(range(s) for s in space.shape)))
    for m in all_upsets(sub):
        arr = np.array([m[sub.index(tuple(w[i] for i in block))] for w in grids], dtype=bool)
        out.append(Event(space, arr))
    return out


# -- oracle equivalence ----------------------------------------------------------------

def brute_witness_sets(event: Event, w) -> list[int]:
    """Every witnessing coordinate set, straight from the definition."""
    space = event.space
    n = space.n
    out = []
    outcomes = list(itertools.product(*(range(s) for s in space.shape)))
    member = {o: bool(event.membership[i]) for i, o in enumerate(outcomes)}
    for S in range(1 << n):
        if all(member[o] for o in outcomes if all(o[i] == w[i] for i in range(n) if S >> i & 1)):
            out.append(S)
    return out


def brute_X(w, events: Sequence[Event]) -> int:
    """Largest disjoint witness system over all witnessing sets (no minimality, no bounding)."""
    fams = [brute_witness_sets(e, w) for e in events]
    best = 0

    def rec(i, used, count):
        nonlocal best
        if i == len(fams):
            best = max(best, count)
            return
        rec(i + 1, used, count)
        for S in fams[i]:
            if not S & used:
                rec(i + 1, used | S, count + 1)

    rec(0, 0, 0)
    return best


def oracle_suite(seed: int = 0, count: int = 1000, max_n: int = 4, max_k: int = 3) -> SuiteResult:
    """X from the packing search against :func:`brute_X` on seeded random instances."""
    from .disjoint import X_values

    res = SuiteResult("oracle")
    rng = np.random.default_rng(seed)
    kinds = ("arbitrary", "increasing", "decreasing")
    with _Timer(res):
        for _ in range(count):
            n = int(rng.integers(1, max_n + 1))
            max_size = 2 if n == 4 else 3
            space = random_space(rng, max_n, max_size, n=n)
            k = int(rng.integers(1, max_k + 1))
            events = [random_event(rng, space, kinds[int(rng.integers(0, 3))]) for _ in range(k)]
            res.instances += 1
            fast = X_values(events)
            for idx in range(space.size):
                res.checks += 1
                w = space.outcome(idx)
                slow = brute_X(w, events)
                if int(fast[idx]) != slow:
                    res.record(space, events, outcome=w, fast=int(fast[idx]), brute=slow)
                    break
    return res


def percolation_oracle_suite(cases=None) -> SuiteResult:
    """Edge-disjoint path search against X on the edge product space, all configurations."""
    from .disjoint import X_values
    from .percolation import Graph, max_disjoint_connected_pairs, path_events

    if cases is None:
        cases = default_percolation_cases()
    res = SuiteResult("percolation-oracle")
    with _Timer(res):
        for graph, pairs in cases:
            res.instances += 1
            evs = path_events(graph, pairs)
            xs = X_values(evs)
            m = graph.n_edges
            for idx in range(1 << m):
                res.checks += 1
                config = sum(((idx >> (m - 1 - e)) & 1) << e for e in range(m))
                got = max_disjoint_connected_pairs(graph, config, pairs)
                if got != int(xs[idx]):
                    res.record(evs[0].space, evs, config=config, paths=got, X=int(xs[idx]))
    return res


def default_percolation_cases():
    from .percolation import Graph

    return [
        (Graph.grid(3, 3), [(0, 8), (2, 6)]),
        (Graph.grid(3, 3), [(0, 2), (6, 8), (3, 5)]),
        (Graph.grid(2, 3), [(0, 5), (1, 4), (2, 3)]),
        (Graph.cycle(6), [(0, 3), (1, 4), (2, 5)]),
        (Graph.complete(4), [(0, 1), (2, 3)]),
        (Graph.complete(5), [(0, 1), (2, 3)]),
        (Graph.path(7), [(0, 6), (1, 5), (2, 4)]),
    ]


# -- driver ----------------------------------------------------------------------------

def run_all(max_coords: int = 3, max_factor_size: int = 3, families: int = 3, seed: int = 0,
            random_instances: int = 2000, skip_pa_check: bool = False,
            log: Callable[[str], None] | None = None) -> list[SuiteResult]:
    """Every suite within the given budgets; a zero budget yields an empty run."""
    results = []
    if max_coords <= 0 or families <= 0:
        return results

    def add(r):
        results.append(r)
        if log:
            log(r.line())

    options = BINARY_FACTORS
    if skip_pa_check:
        options = options + (Factor.antichain(["a", "b"]),)
    add(monotone_domination_suite(max_coords, families, options, check_pa=not skip_pa_check))
    if max_factor_size >= 4:
        add(pa_poset_suite(min(2, max_coords), min(2, families)))
    add(bk_suite(min(2, max_coords)))
    add(reimer_suite(min(2, max_coords), min(2, families), random_instances // 10, seed))
    corpus = list(random_corpus(seed, random_instances, max_coords, max(2, max_factor_size), families + 1))
    add(tail_bound_suite(corpus, "X"))
    add(tail_bound_suite(corpus, "Z"))
    add(psi_zero_suite(monotone_corpus(BINARY_FACTORS, max_coords, families)))
    add(harris_suite(monotone_corpus(BINARY_FACTORS, max_coords, min(families, 3))))
    add(oracle_suite(seed, max(1, random_instances // 10), min(4, max_coords + 1), families))
    return results
