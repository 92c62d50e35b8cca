"""
Disjoint occurrence, the count variables X and Z, and the Bernoulli-sum Y.

``X(w)`` is the largest number of events that occur disjointly at ``w``,
found by an exact branch-and-bound packing of minimal witness sets. ``Z(w)``
is the largest mutually independent subfamily whose events all contain
``w``. ``Y`` is a sum of independent Bernoullis with the events'
probabilities. All laws are exact rational pmfs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import TooManyEventsError
from .events import (
    INDEPENDENCE_CAP,
    Event,
    _common_space,
    are_independent,
    is_witness,
    mask_to_coords,
    probability,
    witness_table,
)
from .space import Outcome


@dataclass(frozen=True)
class DisjointnessCertificate:
    """Pairwise-disjoint witness sets, one per index in ``indices``.

    Indices and coordinates are 0-based; ``witnesses[i]`` is a frozenset of
    coordinates witnessing ``outcome`` in event ``i``.
    """

    outcome: Outcome
    indices: tuple[int, ...]
    witnesses: dict

    def verify(self, events: Sequence[Event]) -> bool:
        """Independent re-check: disjointness plus a witness test per event."""
        sets = [self.witnesses[i] for i in self.indices]
        for a, b in itertools.combinations(sets, 2):
            if a & b:
                return False
        return all(is_witness(events[i], self.outcome, self.witnesses[i]) for i in self.indices)


@dataclass(frozen=True)
class CountDistribution:
    """Exact pmf on ``{0, ..., k}``; ``pmf[v] = Pr(count == v)``."""

    pmf: tuple[Fraction, ...]

    def __post_init__(self):
        pmf = tuple(p if type(p) is Fraction else Fraction(p) for p in self.pmf)
        if not pmf:
            raise ValueError("empty pmf")
        if any(p < 0 for p in pmf):
            raise ValueError("negative probability in pmf")
        if sum(pmf) != 1:
            raise ValueError(f"pmf sums to {sum(pmf)}")
        object.__setattr__(self, "pmf", pmf)

    @classmethod
    def point_mass(cls, value: int, k: int | None = None) -> "CountDistribution":
        k = value if k is None else k
        return cls(tuple(Fraction(int(v == value)) for v in range(k + 1)))

    @property
    def k(self) -> int:
        return len(self.pmf) - 1

    def survival(self, r) -> Fraction:
        """``Pr(count >= r)`` for any real ``r``."""
        start = max(0, -int(-Fraction(r) // 1))  # ceil(r)
        return sum(self.pmf[start:], Fraction(0))

    def survivals(self) -> tuple[Fraction, ...]:
        out, acc = [], Fraction(0)
        for p in reversed(self.pmf):
            acc += p
            out.append(acc)
        return tuple(reversed(out))

    @property
    def mean(self) -> Fraction:
        return sum((v * p for v, p in enumerate(self.pmf)), Fraction(0))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, p in enumerate(self.pmf) if p)

    def __getitem__(self, v):
        return self.pmf[v] if 0 <= v < len(self.pmf) else Fraction(0)


def stochastically_dominates(lower: CountDistribution, upper: CountDistribution) -> bool:
    """True iff ``Pr(lower >= r) <= Pr(upper >= r)`` for every integer r."""
    return not domination_violations(lower, upper)


def domination_violations(lower: CountDistribution, upper: CountDistribution) -> list[tuple[int, Fraction, Fraction]]:
    """Thresholds ``r`` where ``Pr(lower >= r) > Pr(upper >= r)``."""
    zero = Fraction(0)
    lo, up = lower.survivals(), upper.survivals()
    top = max(len(lo), len(up))
    lo += (zero,) * (top - len(lo))
    up += (zero,) * (top - len(up))
    return [(r, a, b) for r, (a, b) in enumerate(zip(lo, up)) if a > b]


# -- disjoint occurrence -----------------------------------------------------------

def _tables(events):
    return [witness_table(e) for e in events]


def box_occurs_at(w: Outcome, events: Sequence[Event], I=None) -> DisjointnessCertificate | None:
    """A certificate that the events indexed by ``I`` occur disjointly at ``w``.

    ``I`` defaults to every index. Returns ``None`` iff no system of pairwise
    disjoint witnesses exists. Among several systems the lexicographically
    smallest tuple of witness bitmasks is returned.
    """
    I = tuple(range(len(events))) if I is None else tuple(sorted(set(I)))
    if not I:
        return DisjointnessCertificate(tuple(w), (), {})
    space = _common_space(events)
    w = space.check_outcome(w)
    idx = space.index(w)
    fams = [witness_table(events[i])[idx] for i in I]
    if any(not f for f in fams):
        return None
    chosen = []

    def rec(pos, used):
        if pos == len(fams):
            return True
        for S in fams[pos]:
            if not S & used:
                chosen.append(S)
                if rec(pos + 1, used | S):
                    return True
                chosen.pop()
        return False

    if not rec(0, 0):
        return None
    return DisjointnessCertificate(w, I, {i: mask_to_coords(S) for i, S in zip(I, chosen)})


def box_event(events: Sequence[Event], I=None) -> Event:
    """The event that the events indexed by ``I`` occur disjointly."""
    space = _common_space(events)
    I = tuple(range(len(events))) if I is None else tuple(sorted(set(I)))
    if not I:
        return Event.full(space)
    tables = [witness_table(events[i]) for i in I]
    arr = np.zeros(space.size, dtype=bool)
    for idx in range(space.size):
        arr[idx] = _packs_all([t[idx] for t in tables])
    return Event(space, arr)


def _packs_all(fams) -> bool:
    if any(not f for f in fams):
        return False
    fams = sorted(fams, key=len)

    def rec(pos, used):
        if pos == len(fams):
            return True
        return any(not S & used and rec(pos + 1, used | S) for S in fams[pos])

    return rec(0, 0)


def max_packing(fams) -> int:
    """Largest number of families from which pairwise-disjoint masks can be picked.

    Branch and bound: families are tried smallest first, and a branch is cut
    once the families left cannot lift it above the best count so far.
    """
    fams = sorted((f for f in fams if f), key=len)
    m = len(fams)
    best = 0

    def rec(pos, used, count):
        nonlocal best
        if count > best:
            best = count
        if pos == m or count + (m - pos) <= best:
            return
        for S in fams[pos]:
            if not S & used:
                rec(pos + 1, used | S, count + 1)
                if best == m:
                    return
        rec(pos + 1, used, count)

    rec(0, 0, 0)
    return best


def X_at(w: Outcome, events: Sequence[Event]) -> int:
    """Maximum number of the events that occur disjointly at ``w``."""
    if not events:
        return 0
    space = _common_space(events)
    idx = space.index(w)
    return max_packing([t[idx] for t in _tables(events)])


def max_certificate(w: Outcome, events: Sequence[Event]) -> DisjointnessCertificate:
    """A certificate of size ``X_at(w)`` with the lexicographically smallest index set."""
    x = X_at(w, events)
    for I in itertools.combinations(range(len(events)), x):
        cert = box_occurs_at(w, events, I)
        if cert is not None:
            return cert
    raise AssertionError("unreachable: X_at returned an unattainable count")


_X_CACHE: dict = {}
_X_CACHE_LIMIT = 1 << 16


def X_values(events: Sequence[Event]) -> np.ndarray:
    """``X`` at every outcome, in enumeration order.

    Cached on (order structure, memberships): witness sets never depend on
    the weights, so reweighted copies of a family share one computation.
    """
    space = _common_space(events)
    key = (space.order_signature, tuple(e.key for e in events))
    vals = _X_CACHE.get(key)
    if vals is None:
        tables = _tables(events)
        vals = np.array([max_packing(fams) for fams in zip(*tables)], dtype=np.int64)
        vals.setflags(write=False)
        if len(_X_CACHE) >= _X_CACHE_LIMIT:
            _X_CACHE.clear()
        _X_CACHE[key] = vals
    return vals


def _distribution(values: np.ndarray, k: int, space) -> CountDistribution:
    nums, den = space.weight_numerators, space.weight_denominator
    counts = np.zeros(k + 1, dtype=nums.dtype)
    np.add.at(counts, values, nums)
    return CountDistribution(tuple(Fraction(int(c), den) for c in counts))


def X_distribution(events: Sequence[Event], space=None) -> CountDistribution:
    """Exact law of X under the product measure.

    ``space`` is only needed when ``events`` is empty.
    """
    if not events:
        return CountDistribution.point_mass(0)
    space = _common_space(events)
    space.check_enumerable()
    return _distribution(X_values(events), len(events), space)


def Y_distribution(probs: Sequence) -> CountDistribution:
    """Poisson-binomial law of a sum of independent Bernoulli(p_i).

    The convolution runs on integer numerators over a common denominator.
    """
    fr = [p if type(p) is Fraction else Fraction(p) for p in probs]
    for p in fr:
        if not 0 <= p <= 1:
            raise ValueError(f"probability {p} outside [0, 1]")
    den = math.lcm(*(p.denominator for p in fr)) if fr else 1
    poly = [1]
    for p in fr:
        a = p.numerator * (den // p.denominator)
        b = den - a
        nxt = [0] * (len(poly) + 1)
        for v, c in enumerate(poly):
            nxt[v] += c * b
            nxt[v + 1] += c * a
        poly = nxt
    total = den ** len(fr)
    return CountDistribution(tuple(Fraction(c, total) for c in poly))


# -- independent subfamilies (Z) -----------------------------------------------------

def independent_subfamilies(events: Sequence[Event]) -> list[int]:
    """Every mutually independent subfamily, as a bitmask over event indices.

    Grown by extension in index order; a dependent family is never
    extended, since mutual independence is inherited by subfamilies.
    """
    k = len(events)
    if k > INDEPENDENCE_CAP:
        raise TooManyEventsError(f"Z is capped at {INDEPENDENCE_CAP} events")
    if k == 0:
        return [0]
    space = _common_space(events)
    probs = [probability(e) for e in events]
    out = [0]

    def product_rule(members, j):
        # members is already independent; only subfamilies containing j are new
        for r in range(1, len(members) + 1):
            for sub in itertools.combinations(members, r):
                inter = events[j].membership.copy()
                p = probs[j]
                for i in sub:
                    inter &= events[i].membership
                    p *= probs[i]
                if space.mass(inter) != p:
                    return False
        return True

    def rec(members, mask):
        start = members[-1] + 1 if members else 0
        for j in range(start, k):
            if product_rule(members, j):
                nm = mask | (1 << j)
                out.append(nm)
                rec(members + [j], nm)

    rec([], 0)
    return out


def Z_values(events: Sequence[Event]) -> np.ndarray:
    space = _common_space(events)
    fams = independent_subfamilies(events)
    occ = np.zeros(space.size, dtype=np.int64)
    for i, e in enumerate(events):
        occ |= e.membership.astype(np.int64) << i
    best = {}
    vals = np.empty(space.size, dtype=np.int64)
    for idx, o in enumerate(occ.tolist()):
        if o not in best:
            best[o] = max(bin(f).count("1") for f in fams if f & o == f)
        vals[idx] = best[o]
    return vals


def Z_at(w: Outcome, events: Sequence[Event]) -> int:
    """Largest mutually independent subfamily whose events all contain ``w``."""
    if not events:
        return 0
    space = _common_space(events)
    return int(Z_values(events)[space.index(w)])


def Z_distribution(events: Sequence[Event]) -> CountDistribution:
    if not events:
        return CountDistribution.point_mass(0)
    space = _common_space(events)
    space.check_enumerable()
    return _distribution(Z_values(events), len(events), space)


def occurrence_counts(events: Sequence[Event]) -> np.ndarray:
    """Number of events containing each outcome."""
    return np.sum([e.membership for e in events], axis=0, dtype=np.int64)


__all__ = [
    "CountDistribution",
    "DisjointnessCertificate",
    "X_at",
    "X_distribution",
    "X_values",
    "Y_distribution",
    "Z_at",
    "Z_values",
    "Z_distribution",
    "are_independent",
    "box_event",
    "box_occurs_at",
    "domination_violations",
    "independent_subfamilies",
    "max_certificate",
    "max_packing",
    "occurrence_counts",
    "stochastically_dominates",
]
