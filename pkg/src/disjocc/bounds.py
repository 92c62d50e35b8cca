"""
Upper-tail bounds for disjoint-occurrence counts.

    phi(x)        = (1 + x) log(1 + x) - x,   phi(-1) = 1
    bk_chernoff   = exp(-lam * phi(t / lam))
    bernstein     = exp(-t^2 / (2 (lam + t/3)))
    product_bound = lam^t / (lam + t)_t          (t a positive integer)

plus an exact verifier for the factorial-moment (Markov) argument that yields
the bound for arbitrary events on linearly ordered factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .disjoint import X_distribution, box_event
from .errors import HypothesisError
from .events import Event, _common_space, probability
from .space import is_linear

# slack in favour of the bound when an exact tail meets a float bound
FLOAT_SLACK = 1e-12


def _check_nonneg(**kw):
    for name, v in kw.items():
        if v < 0 or math.isnan(v):
            raise ValueError(f"{name} must be nonnegative, got {v}")


def phi(x: float) -> float:
    if x < -1:
        raise ValueError(f"phi is defined for x >= -1, got {x}")
    if x == -1:
        return 1.0
    return (1.0 + x) * math.log1p(x) - x


def bk_chernoff(lam: float, t: float) -> float:
    """Upper bound on Pr(X >= lam + t)."""
    _check_nonneg(lam=lam, t=t)
    if t == 0:
        return 1.0
    if lam == 0:
        return 0.0
    return math.exp(-lam * phi(t / lam))


def janson_bound(lam: float, t: float) -> float:
    """Upper bound on Pr(Z >= lam + t); same formula as :func:`bk_chernoff`."""
    return bk_chernoff(lam, t)


def bernstein(lam: float, t: float) -> float:
    _check_nonneg(lam=lam, t=t)
    if t == 0:
        return 1.0
    return math.exp(-t * t / (2.0 * (lam + t / 3.0)))


def falling_factorial(x, r: int):
    """``x (x-1) ... (x-r+1)``; exact when ``x`` is a Fraction or int."""
    if r < 0:
        raise ValueError("r must be a nonnegative integer")
    out = 1
    for i in range(r):
        out *= x - i
    return out


def product_bound(lam: float, t: int) -> float:
    """``prod_{i<t} lam / (lam + t - i)``."""
    if lam <= 0:
        raise ValueError("product_bound needs lam > 0")
    if t < 1 or int(t) != t:
        raise ValueError("product_bound needs a positive integer t")
    t = int(t)
    return math.exp(sum(math.log(lam / (lam + t - i)) for i in range(t)))


def best_product_bound(lam: float, t: int, k: int) -> tuple[float, bool]:
    """Product bound for an instance with ``k`` events.

    The moment order r must satisfy r <= k; for t <= k the choice r = t is
    used. For t > k the minimum over r in [1, k] is returned and the second
    value is True to flag that regime.
    """
    if t <= k:
        return product_bound(lam, t), False
    vals = [math.exp(sum(math.log(lam / (lam + t - i)) for i in range(r))) for r in range(1, k + 1)]
    return (min(vals) if vals else 1.0), True


@dataclass(frozen=True)
class TailBoundReport:
    lam: float
    t: float
    chernoff: float
    bernstein: float
    product: float | None = None
    exact_tail: Fraction | None = None

    def ordered(self) -> bool:
        """product <= chernoff <= bernstein (where defined)."""
        ok = self.chernoff <= self.bernstein + FLOAT_SLACK
        if self.product is not None:
            ok = ok and self.product <= self.chernoff + FLOAT_SLACK
        return ok

    def exact_within(self) -> bool | None:
        if self.exact_tail is None:
            return None
        return float(self.exact_tail) <= self.chernoff + FLOAT_SLACK


def tail_report(lam: float, t: float, exact_tail: Fraction | None = None) -> TailBoundReport:
    product = None
    if t == 0:
        product = 1.0  # empty product, matching the other t = 0 conventions
    elif lam > 0 and t >= 1 and float(t).is_integer():
        product = product_bound(lam, int(t))
    return TailBoundReport(float(lam), float(t), bk_chernoff(lam, t), bernstein(lam, t), product, exact_tail)


@dataclass
class MarkovReport:
    """Exact quantities of the factorial-moment argument for one order r."""

    r: int
    lam: Fraction
    expected_chi: Fraction
    lam_power: Fraction
    threshold: Fraction  # (lam + r)_r
    tail: Fraction  # Pr(X >= lam + r)
    chi_tail: Fraction  # Pr(chi >= (lam + r)_r)
    markov_bound: Fraction  # lam^r / (lam + r)_r
    box_probabilities: dict = field(default_factory=dict)

    @property
    def moment_ok(self) -> bool:
        return self.expected_chi <= self.lam_power

    @property
    def implication_ok(self) -> bool:
        return self.tail <= self.chi_tail

    @property
    def markov_ok(self) -> bool:
        return self.chi_tail <= self.markov_bound and self.tail <= self.markov_bound

    @property
    def ok(self) -> bool:
        return self.moment_ok and self.implication_ok and self.markov_ok


def markov_chain_verify(events: Sequence[Event], r: int) -> MarkovReport:
    """Check every step of the factorial-moment bound exactly.

    chi = r! * #{I : |I| = r, the events in I occur disjointly}. The report
    holds E chi (to be <= lam^r), Pr(chi >= (lam + r)_r) (to be >= the tail),
    and the Markov bound lam^r / (lam + r)_r (to dominate both).
    """
    space = _common_space(events)
    if space is None or not 1 <= r <= len(events):
        raise ValueError("need 1 <= r <= number of events")
    if not all(is_linear(f) for f in space.factors):
        raise HypothesisError("markov_chain_verify requires linearly ordered factors")
    lam = sum((probability(e) for e in events), Fraction(0))
    fact = math.factorial(r)
    count = None
    boxes = {}
    for I in combinations(range(len(events)), r):
        b = box_event(events, I)
        boxes[I] = probability(b)
        ind = b.membership.astype(int)
        count = ind if count is None else count + ind
    chi = count * fact
    expected_chi = _expectation(space, chi)
    threshold = falling_factorial(lam + r, r)
    chi_tail = space.mass(chi >= _ceil_frac(threshold))
    tail = X_distribution(events).survival(lam + r)
    lam_power = lam ** r
    return MarkovReport(r, lam, expected_chi, lam_power, threshold, tail, chi_tail,
                        lam_power / threshold, boxes)


def _ceil_frac(x: Fraction) -> int:
    return -int(-x // 1)


def _expectation(space, values) -> Fraction:
    nums, den = space.weight_numerators, space.weight_denominator
    total = sum(int(v) * int(w) for v, w in zip(values, nums))
    return Fraction(total, den)
