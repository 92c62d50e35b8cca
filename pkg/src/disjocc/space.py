"""
Finite product probability spaces with partially ordered factors.

A :class:`Factor` is a finite poset carrying an exact rational probability
vector. A :class:`ProductSpace` is an ordered tuple of factors with the
coordinatewise order and the product measure. Outcomes are tuples of
element indices (one per factor); coordinates are 0-based in the Python API.

Outcomes are enumerated in lexicographic coordinate order, which is the
C-order flattening of an array of shape ``space.shape``. Every membership
array in the package uses that flattening.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    FactorTooLargeError,
    InvalidFactorError,
    SpaceMismatchError,
    SpaceTooLargeError,
)

Outcome = tuple  # tuple[int, ...], one element index per factor

DEFAULT_OUTCOME_CAP = 2 ** 24
PA_ELEMENT_CAP = 12


def as_fraction(value) -> Fraction:
    """Parse a weight given as Fraction, int, "p/q" string or decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats are accepted only through their shortest decimal repr
        return Fraction(repr(value))
    return Fraction(value)


def _close_order(n: int, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    leq = np.eye(n, dtype=bool)
    for a, b in pairs:
        leq[a, b] = True
    for k in range(n):
        leq |= leq[:, k:k + 1] & leq[k:k + 1, :]
    return leq


@dataclass(frozen=True)
class Factor:
    """A finite partially ordered set with a probability weight per element.

    ``order`` holds the reflexive-transitive closure of the pairs given at
    construction, as ``(a, b)`` label pairs meaning ``a <= b``.
    """

    elements: tuple[str, ...]
    order: frozenset
    weights: tuple[Fraction, ...]
    leq_matrix: np.ndarray = field(compare=False, repr=False, hash=False, default=None)

    @classmethod
    def build(cls, elements: Sequence, order: Iterable[Sequence] = (), weights=None) -> "Factor":
        """Construct a factor from covering (or any generating) pairs.

        ``weights`` may be a mapping label -> weight or a sequence aligned with
        ``elements``; it defaults to the uniform measure. No validation is done
        here; see :func:`validate_factor`.
        """
        elements = tuple(str(e) for e in elements)
        pos = {e: i for i, e in enumerate(elements)}
        pairs = []
        for a, b in order:
            a, b = str(a), str(b)
            if a not in pos or b not in pos:
                raise InvalidFactorError([f"order pair ({a}, {b}) names an unknown element"])
            pairs.append((pos[a], pos[b]))
        if weights is None:
            w = tuple(Fraction(1, len(elements)) for _ in elements) if elements else ()
        elif isinstance(weights, Mapping):
            unknown = set(map(str, weights)) - set(elements)
            if unknown:
                raise InvalidFactorError([f"weight given for unknown element {sorted(unknown)[0]}"])
            lookup = {str(k): as_fraction(v) for k, v in weights.items()}
            missing = [e for e in elements if e not in lookup]
            if missing:
                raise InvalidFactorError([f"no weight given for element {missing[0]}"])
            w = tuple(lookup[e] for e in elements)
        else:
            w = tuple(as_fraction(v) for v in weights)
            if len(w) != len(elements):
                raise InvalidFactorError([f"{len(w)} weights for {len(elements)} elements"])
        leq = _close_order(len(elements), pairs)
        closed = frozenset(
            (elements[i], elements[j]) for i, j in zip(*np.nonzero(leq))
        )
        return cls(elements, closed, w, leq)

    def __post_init__(self):
        if self.leq_matrix is None:
            pos = {e: i for i, e in enumerate(self.elements)}
            leq = _close_order(len(self.elements), ((pos[a], pos[b]) for a, b in self.order))
            object.__setattr__(self, "order", frozenset(
                (self.elements[i], self.elements[j]) for i, j in zip(*np.nonzero(leq))))
            object.__setattr__(self, "leq_matrix", leq)
        self.leq_matrix.setflags(write=False)

    # -- convenience constructors -------------------------------------------------

    @classmethod
    def chain(cls, weights: Sequence, labels: Sequence | None = None) -> "Factor":
        """Linearly ordered factor ``labels[0] < labels[1] < ...``."""
        labels = [str(i) for i in range(len(weights))] if labels is None else labels
        covers = list(zip(labels, labels[1:]))
        return cls.build(labels, covers, weights)

    @classmethod
    def bernoulli(cls, p) -> "Factor":
        """The chain ``0 < 1`` with ``Pr(1) = p``."""
        p = as_fraction(p)
        return cls.chain([1 - p, p])

    @classmethod
    def antichain(cls, labels: Sequence, weights=None) -> "Factor":
        return cls.build(labels, (), weights)

    @classmethod
    def diamond(cls, weights=None) -> "Factor":
        """Four-element lattice ``bot < a, b < top`` with ``a``, ``b`` incomparable."""
        return cls.build(
            ["bot", "a", "b", "top"],
            [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
            weights,
        )

    # -- queries -------------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, label) -> int:
        try:
            return self.elements.index(str(label))
        except ValueError:
            raise KeyError(f"unknown element {label!r}") from None

    def leq(self, a: int, b: int) -> bool:
        return bool(self.leq_matrix[a, b])

    @cached_property
    def minima(self) -> tuple[int, ...]:
        leq = self.leq_matrix
        return tuple(i for i in range(self.size) if not any(leq[j, i] and j != i for j in range(self.size)))

    @cached_property
    def maxima(self) -> tuple[int, ...]:
        leq = self.leq_matrix
        return tuple(i for i in range(self.size) if not any(leq[i, j] and j != i for j in range(self.size)))

    @cached_property
    def covers(self) -> tuple[tuple[int, int], ...]:
        """Covering pairs ``(a, b)``: ``a < b`` with nothing strictly between."""
        leq = self.leq_matrix
        n = self.size
        out = []
        for a in range(n):
            for b in range(n):
                if a == b or not leq[a, b]:
                    continue
                if not any(c not in (a, b) and leq[a, c] and leq[c, b] for c in range(n)):
                    out.append((a, b))
        return tuple(out)


def validate_factor(f: Factor) -> list[str]:
    """Return a list of every violated factor axiom; empty when valid."""
    problems = []
    n = f.size
    if n == 0:
        problems.append("factor has no elements")
    if len(set(f.elements)) != n:
        problems.append("duplicate element labels")
    if len(f.weights) != n:
        problems.append(f"{len(f.weights)} weights for {n} elements")
    for e, w in zip(f.elements, f.weights):
        if w < 0:
            problems.append(f"weight of {e} is negative ({w})")
        elif w > 1:
            problems.append(f"weight of {e} exceeds 1 ({w})")
    total = sum(f.weights, Fraction(0))
    if total != 1:
        problems.append(f"weights sum to {total} ≠ 1")
    leq = f.leq_matrix
    if not all(leq[i, i] for i in range(n)):
        problems.append("reflexivity violated")
    for i in range(n):
        for j in range(i + 1, n):
            if leq[i, j] and leq[j, i]:
                problems.append(f"antisymmetry violated: {f.elements[i]} ≤ {f.elements[j]} and {f.elements[j]} ≤ {f.elements[i]}")
    if np.any((leq.astype(np.int64) @ leq.astype(np.int64) > 0) & ~leq):
        problems.append("transitivity violated")
    return problems


def is_linear(f: Factor) -> bool:
    """True iff every pair of elements is comparable."""
    leq = f.leq_matrix
    return bool(np.all(leq | leq.T))


def upsets(leq: np.ndarray) -> list[int]:
    """All up-sets of a finite poset, as bitmasks over its elements.

    ``leq`` is the (closed) order matrix. Elements are decided from the top
    down, so an element may join only once every element above it has.
    """
    n = leq.shape[0]
    # number of strict successors gives a valid top-down order
    order = sorted(range(n), key=lambda i: int(leq[i].sum()))
    above = [sum(1 << j for j in range(n) if j != i and leq[i, j]) for i in range(n)]
    out = []

    def rec(pos, cur):
        if pos == n:
            out.append(cur)
            return
        i = order[pos]
        rec(pos + 1, cur)
        if above[i] & cur == above[i]:
            rec(pos + 1, cur | (1 << i))

    rec(0, 0)
    return sorted(out)


def is_positively_associated(f: Factor) -> bool:
    """Exhaustive check that m(A & B) >= m(A) m(B) for every pair of up-sets."""
    if f.size > PA_ELEMENT_CAP:
        raise FactorTooLargeError(f"PA check capped at {PA_ELEMENT_CAP} elements, factor has {f.size}")
    ups = upsets(f.leq_matrix)

    def m(mask):
        return sum((w for i, w in enumerate(f.weights) if mask >> i & 1), Fraction(0))

    mass = {u: m(u) for u in ups}
    for i, a in enumerate(ups):
        for b in ups[i:]:
            if m(a & b) < mass[a] * mass[b]:
                return False
    return True


@dataclass(frozen=True)
class ProductSpace:
    """Product of finitely many factors, with coordinatewise order and product measure."""

    factors: tuple[Factor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise InvalidFactorError(["a product space needs at least one factor"])
        problems = []
        for i, f in enumerate(self.factors):
            problems += [f"factor {i + 1}: {p}" for p in validate_factor(f)]
        if problems:
            raise InvalidFactorError(problems)

    @classmethod
    def bernoulli(cls, ps: Sequence) -> "ProductSpace":
        return cls(tuple(Factor.bernoulli(p) for p in ps))

    @classmethod
    def cube(cls, n: int, p=Fraction(1, 2)) -> "ProductSpace":
        return cls.bernoulli([p] * n)

    @property
    def n(self) -> int:
        return len(self.factors)

    @cached_property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.factors)

    @cached_property
    def size(self) -> int:
        return math.prod(self.shape)

    @cached_property
    def order_signature(self) -> tuple:
        """Hashable summary of the ordered structure, ignoring weights."""
        return tuple((f.size, f.leq_matrix.tobytes()) for f in self.factors)

    def same_structure(self, other: "ProductSpace") -> bool:
        return self.order_signature == other.order_signature

    def check_outcome(self, w: Outcome) -> Outcome:
        w = tuple(w)
        if len(w) != self.n:
            raise SpaceMismatchError(f"outcome has {len(w)} coordinates, space has {self.n}")
        for i, (x, s) in enumerate(zip(w, self.shape)):
            if not 0 <= x < s:
                raise SpaceMismatchError(f"coordinate {i} index {x} out of range for factor of size {s}")
        return w

    def index(self, w: Outcome) -> int:
        """Position of an outcome in lexicographic enumeration order."""
        return int(np.ravel_multi_index(self.check_outcome(w), self.shape))

    def outcome(self, idx: int) -> Outcome:
        return tuple(int(x) for x in np.unravel_index(idx, self.shape))

    def outcome_from_labels(self, labels: Sequence) -> Outcome:
        if len(labels) != self.n:
            raise SpaceMismatchError(f"outcome has {len(labels)} coordinates, space has {self.n}")
        return tuple(f.index(x) for f, x in zip(self.factors, labels))

    def labels(self, w: Outcome) -> tuple[str, ...]:
        return tuple(f.elements[x] for f, x in zip(self.factors, w))

    def check_enumerable(self, cap: int = DEFAULT_OUTCOME_CAP) -> None:
        if self.size > cap:
            raise SpaceTooLargeError(f"space has {self.size} outcomes, cap is {cap}")

    # -- exact measure -------------------------------------------------------------

    @cached_property
    def _integer_weights(self) -> tuple[np.ndarray, int]:
        self.check_enumerable()
        dens = [math.lcm(*(w.denominator for w in f.weights)) for f in self.factors]
        denominator = math.prod(dens)
        dtype = np.int64 if denominator < 2 ** 62 else object
        arr = np.ones(1, dtype=dtype)
        for f, d in zip(self.factors, dens):
            nums = np.array([int(w * d) for w in f.weights], dtype=dtype)
            arr = np.multiply.outer(arr, nums).reshape(-1)
        arr.setflags(write=False)
        return arr, denominator

    @property
    def weight_numerators(self) -> np.ndarray:
        """Outcome weights times :attr:`weight_denominator`, as integers."""
        return self._integer_weights[0]

    @property
    def weight_denominator(self) -> int:
        return self._integer_weights[1]

    def mass(self, membership: np.ndarray) -> Fraction:
        """Exact measure of the outcomes flagged in a boolean membership array."""
        nums, den = self._integer_weights
        return Fraction(int(nums[membership].sum()), den)

    def weight(self, w: Outcome) -> Fraction:
        return math.prod((f.weights[x] for f, x in zip(self.factors, self.check_outcome(w))), start=Fraction(1))


def leq(space: ProductSpace, w1: Outcome, w2: Outcome) -> bool:
    """Coordinatewise order on outcomes."""
    w1, w2 = space.check_outcome(w1), space.check_outcome(w2)
    return all(f.leq_matrix[a, b] for f, a, b in zip(space.factors, w1, w2))


def measure(space: ProductSpace, outcomes: Iterable[Outcome]) -> Fraction:
    """Exact product measure of a set of outcomes (duplicates counted once)."""
    return sum((space.weight(w) for w in {space.check_outcome(w) for w in outcomes}), Fraction(0))


def enumerate_outcomes(space: ProductSpace, cap: int = DEFAULT_OUTCOME_CAP) -> Iterator[Outcome]:
    """Yield every outcome once, in lexicographic coordinate order."""
    space.check_enumerable(cap)
    return itertools.product(*(range(s) for s in space.shape))
