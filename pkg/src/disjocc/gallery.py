"""
Worked examples and counterexamples, rebuilt and recomputed on every run.

Each case constructs its instance in code, derives every quantity with the
core modules, and checks the expected facts against those derived values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .disjoint import (
    X_distribution,
    X_values,
    Y_distribution,
    Z_distribution,
    Z_values,
    box_event,
    stochastically_dominates,
)
from .events import Event, are_independent, is_decreasing, is_increasing, probability
from .space import Factor, ProductSpace


@dataclass
class Fact:
    statement: str
    holds: bool


@dataclass
class GalleryResult:
    name: str
    facts: list[Fact] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)
    space: ProductSpace | None = None
    events: list = field(default_factory=list)

    def check(self, statement: str, holds: bool):
        self.facts.append(Fact(statement, bool(holds)))

    def say(self, text: str):
        self.lines.append(text)

    @property
    def passed(self) -> bool:
        return all(f.holds for f in self.facts)

    def render(self) -> str:
        out = [f"== {self.name} =="] + self.lines
        out += [f"[{'ok' if f.holds else 'FAILED'}] {f.statement}" for f in self.facts]
        return "\n".join(out) + "\n"


def _pmf(d):
    return ", ".join(f"P({v})={p}" for v, p in enumerate(d.pmf))


def opposite_singletons():
    """Two-point space {0, 1}, uniform, A_1 = {0}, A_2 = {1}."""
    space = ProductSpace((Factor.bernoulli(Fraction(1, 2)),))
    return space, [Event.explicit(space, [(0,)], "A1"), Event.explicit(space, [(1,)], "A2")]


def remark_ii() -> GalleryResult:
    res = GalleryResult("remark-ii")
    space, events = opposite_singletons()
    res.space, res.events = space, events
    xd = X_distribution(events)
    yd = Y_distribution([probability(e) for e in events])
    res.say("Omega = {0,1} uniform; A1 = {0}, A2 = {1}")
    res.say(f"X: {_pmf(xd)}")
    res.say(f"Y: {_pmf(yd)}")
    res.say(f"A1 increasing: {is_increasing(events[0])}; A2 decreasing: {is_decreasing(events[1])}")
    res.check("Pr(X >= 1) = 1", xd.survival(1) == 1)
    res.check("Pr(Y >= 1) = 3/4", yd.survival(1) == Fraction(3, 4))
    res.check("X is not dominated by Y", not stochastically_dominates(xd, yd))
    res.check("the events are not all increasing (nor all decreasing)",
              not all(map(is_increasing, events)) and not all(map(is_decreasing, events)))
    return res


def remark_iv() -> GalleryResult:
    res = GalleryResult("remark-iv")
    space, events = opposite_singletons()
    res.space, res.events = space, events
    zd = Z_distribution(events)
    yd = Y_distribution([probability(e) for e in events])
    res.say("Omega = {0,1} uniform; A1 = {0}, A2 = {1}")
    res.say(f"Z: {_pmf(zd)}")
    res.say(f"Y: {_pmf(yd)}")
    res.check("A1, A2 are not independent", not are_independent(events))
    res.check("Pr(Z >= 1) = 1", zd.survival(1) == 1)
    res.check("Pr(Z >= 1) > Pr(Y >= 1) = 3/4", zd.survival(1) > yd.survival(1) == Fraction(3, 4))
    res.check("Z is not dominated by Y", not stochastically_dominates(zd, yd))
    return res


def differs_from_last(n: int):
    """Uniform {0,1}^n with A_i = {w_i != w_n} for i < n."""
    space = ProductSpace.cube(n)
    events = [Event.from_predicate(space, lambda w, i=i: w[i] != w[n - 1], f"A{i + 1}") for i in range(n - 1)]
    return space, events


def theorem2_example(n: int = 5) -> GalleryResult:
    res = GalleryResult("theorem2-example")
    space, events = differs_from_last(n)
    res.space, res.events = space, events
    xs = X_values(events)
    zd = Z_distribution(events)
    res.say(f"Omega = {{0,1}}^{n} uniform; A_i = {{w_i != w_{n}}}, i = 1..{n - 1}")
    res.say(f"X: {_pmf(X_distribution(events))}")
    res.say(f"Z: {_pmf(zd)}")
    witness = None
    zs = Z_values(events)
    for idx in range(space.size):
        if zs[idx] == n - 1:
            witness = space.outcome(idx)
            break
    res.say(f"outcome with Z = {n - 1}: {witness}")
    res.check("max over outcomes of X is 1", int(xs.max()) == 1)
    res.check("the family is mutually independent", are_independent(events))
    res.check("Pr(Z >= 3) > 0", zd.survival(3) > 0)
    res.check(f"Pr(Z = {n - 1}) > 0 (witness found by enumeration)", witness is not None and zd[n - 1] > 0)
    return res


def harris(n: int = 3) -> GalleryResult:
    """Independent increasing cylinders occur disjointly whenever they co-occur."""
    res = GalleryResult("harris")
    space = ProductSpace.bernoulli([Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)][:n])
    events = [Event.cylinder(space, i, [1], f"w{i + 1}=1") for i in range(n)]
    res.space, res.events = space, events
    res.check("the cylinders are mutually independent", are_independent(events))
    res.check("the cylinders are increasing", all(map(is_increasing, events)))
    all_equal = True
    for r in range(1, n + 1):
        for I in itertools.combinations(range(n), r):
            box = probability(box_event(events, I))
            inter = space.mass(np.logical_and.reduce([events[i].membership for i in I]))
            res.say(f"I = {tuple(i + 1 for i in I)}: mu(box) = {box}, mu(cap) = {inter}")
            all_equal &= box == inter
    res.check("mu(box_I) = mu(cap_I) for every subfamily I", all_equal)
    return res


def bk_recovery() -> GalleryResult:
    """With two events and threshold 2, domination reduces to the BK inequality."""
    from .verify import all_upsets

    res = GalleryResult("bk-recovery")
    space = ProductSpace.cube(2)
    ups = [Event(space, m) for m in all_upsets(space)]
    worst = None
    ok = True
    dom_ok = True
    for a, b in itertools.product(ups, repeat=2):
        lhs = probability(box_event([a, b]))
        rhs = probability(a) * probability(b)
        ok &= lhs <= rhs
        xd = X_distribution([a, b])
        dom_ok &= xd.survival(2) == lhs
        gap = rhs - lhs
        if worst is None or gap < worst[0]:
            worst = (gap, a, b)
    a, b = worst[1], worst[2]
    res.space, res.events = space, [a, b]
    res.say(f"{len(ups)} increasing events on uniform {{0,1}}^2, {len(ups) ** 2} ordered pairs")
    res.say(f"tightest pair: mu(A)mu(B) - mu(A box B) = {worst[0]}")
    res.check("Pr(X >= 2) equals mu(A box B) for every pair", dom_ok)
    res.check("mu(A box B) <= mu(A) mu(B) for every increasing pair", ok)
    return res


CASES = {
    "remark-ii": remark_ii,
    "remark-iv": remark_iv,
    "theorem2-example": theorem2_example,
    "harris": harris,
    "bk-recovery": bk_recovery,
}


def run_case(name: str) -> GalleryResult:
    try:
        fn = CASES[name]
    except KeyError:
        raise KeyError(f"unknown gallery case {name!r}; choose from {', '.join(CASES)}") from None
    return fn()
