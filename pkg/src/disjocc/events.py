"""
Events over a product space: monotonicity, witnesses, "affects", psi, independence.

An :class:`Event` materializes its membership as a boolean array over the
space's outcomes (lexicographic order). Witness sets are bitmasks over the
0-based coordinates: bit ``i`` set means coordinate ``i`` is in the set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import SpaceMismatchError, SpaceTooLargeError, TooManyEventsError
from .space import DEFAULT_OUTCOME_CAP, Outcome, ProductSpace

INDEPENDENCE_CAP = 20
WITNESS_TABLE_CAP = 2 ** 26


def mask_to_coords(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def coords_to_mask(coords: Iterable[int]) -> int:
    m = 0
    for i in coords:
        m |= 1 << i
    return m


class Event:
    """A subset of a product space's outcomes."""

    __slots__ = ("space", "membership", "label", "_key", "_prob")

    def __init__(self, space: ProductSpace, membership, label: str | None = None):
        arr = np.array(membership, dtype=bool).reshape(-1)
        if arr.size != space.size:
            raise SpaceMismatchError(f"membership has {arr.size} entries, space has {space.size} outcomes")
        arr.setflags(write=False)
        self.space = space
        self.membership = arr
        self.label = label
        self._key = None
        self._prob = None

    # -- constructors --------------------------------------------------------------

    @classmethod
    def full(cls, space, label=None):
        space.check_enumerable()
        return cls(space, np.ones(space.size, dtype=bool), label)

    @classmethod
    def empty(cls, space, label=None):
        space.check_enumerable()
        return cls(space, np.zeros(space.size, dtype=bool), label)

    @classmethod
    def explicit(cls, space, outcomes: Iterable[Outcome], label=None):
        space.check_enumerable()
        arr = np.zeros(space.size, dtype=bool)
        for w in outcomes:
            arr[space.index(w)] = True
        return cls(space, arr, label)

    @classmethod
    def from_predicate(cls, space, pred, label=None):
        space.check_enumerable()
        arr = np.fromiter((bool(pred(w)) for w in itertools.product(*map(range, space.shape))),
                          dtype=bool, count=space.size)
        return cls(space, arr, label)

    @classmethod
    def cylinder(cls, space, coord: int, values: Iterable[int], label=None):
        """``{w : w[coord] in values}`` (0-based coordinate, element indices)."""
        space.check_enumerable()
        if not 0 <= coord < space.n:
            raise SpaceMismatchError(f"coordinate {coord} out of range for {space.n} factors")
        allowed = np.zeros(space.shape[coord], dtype=bool)
        for v in values:
            allowed[v] = True
        shape = [1] * space.n
        shape[coord] = space.shape[coord]
        arr = np.broadcast_to(allowed.reshape(shape), space.shape)
        return cls(space, arr, label)

    @classmethod
    def upset(cls, space, generators: Iterable[Outcome], label=None):
        """Smallest increasing event containing every generator."""
        ev = cls(space, _generated(space, generators, up=True), label)
        assert is_increasing(ev)
        return ev

    @classmethod
    def downset(cls, space, generators: Iterable[Outcome], label=None):
        """Smallest decreasing event containing every generator."""
        ev = cls(space, _generated(space, generators, up=False), label)
        assert is_decreasing(ev)
        return ev

    def on(self, space: ProductSpace) -> "Event":
        """The same outcome set viewed in another space with identical structure."""
        if space.shape != self.space.shape:
            raise SpaceMismatchError("spaces differ in shape")
        ev = Event.__new__(Event)
        ev.space, ev.membership, ev.label, ev._key = space, self.membership, self.label, self._key
        ev._prob = None
        return ev

    # -- boolean algebra -----------------------------------------------------------

    def _check(self, other):
        if other.space != self.space:
            raise SpaceMismatchError("events belong to different spaces")

    def __and__(self, other):
        self._check(other)
        return Event(self.space, self.membership & other.membership)

    def __or__(self, other):
        self._check(other)
        return Event(self.space, self.membership | other.membership)

    def __invert__(self):
        return Event(self.space, ~self.membership)

    def __sub__(self, other):
        self._check(other)
        return Event(self.space, self.membership & ~other.membership)

    # -- identity ------------------------------------------------------------------

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = np.packbits(self.membership).tobytes()
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return self.space == other.space and self.key == other.key

    def __hash__(self):
        return hash((self.space.shape, self.key))

    def __len__(self):
        return int(self.membership.sum())

    def __contains__(self, w):
        return contains(self, w)

    def __iter__(self):
        for idx in np.flatnonzero(self.membership):
            yield self.space.outcome(int(idx))

    def __repr__(self):
        name = f" {self.label!r}" if self.label else ""
        return f"<Event{name} {len(self)}/{self.space.size} outcomes>"


def _generated(space, generators, up):
    space.check_enumerable()
    arr = np.zeros(space.shape, dtype=bool)
    for g in generators:
        g = space.check_outcome(g)
        cur = np.ones([1] * space.n, dtype=bool)
        for i, (f, x) in enumerate(zip(space.factors, g)):
            row = f.leq_matrix[x, :] if up else f.leq_matrix[:, x]
            shape = [1] * space.n
            shape[i] = f.size
            cur = cur & row.reshape(shape)
        arr |= cur
    return arr.reshape(-1)


def _common_space(events: Sequence[Event]):
    if not events:
        return None
    space = events[0].space
    for e in events[1:]:
        if e.space != space:
            raise SpaceMismatchError("events belong to different spaces")
    return space


def contains(E: Event, w: Outcome) -> bool:
    return bool(E.membership[E.space.index(w)])


def probability(E: Event) -> Fraction:
    if E._prob is None:
        E._prob = E.space.mass(E.membership)
    return E._prob


# -- monotonicity --------------------------------------------------------------------

def _monotone(E: Event, up: bool) -> bool:
    # the product order is generated by single-coordinate covering steps
    M = E.membership.reshape(E.space.shape)
    for axis, f in enumerate(E.space.factors):
        for a, b in f.covers:
            lo = np.take(M, a, axis=axis)
            hi = np.take(M, b, axis=axis)
            bad = lo & ~hi if up else hi & ~lo
            if bad.any():
                return False
    return True


def is_increasing(E: Event) -> bool:
    """True iff w in E and w <= w' imply w' in E."""
    return _monotone(E, up=True)


def is_decreasing(E: Event) -> bool:
    """True iff the complement of E is increasing."""
    return _monotone(E, up=False)


# -- witnesses -----------------------------------------------------------------------

def is_witness(E: Event, w: Outcome, S) -> bool:
    """True iff every outcome agreeing with ``w`` on ``S`` lies in E.

    ``S`` is a bitmask or an iterable of 0-based coordinates.
    """
    space = E.space
    w = space.check_outcome(w)
    mask = S if isinstance(S, int) else coords_to_mask(S)
    free = [space.shape[i] for i in range(space.n) if not mask >> i & 1]
    if np.prod(free, dtype=object) > DEFAULT_OUTCOME_CAP:
        raise SpaceTooLargeError("witness sub-product exceeds the enumeration cap")
    M = E.membership.reshape(space.shape)
    index = tuple(w[i] if mask >> i & 1 else slice(None) for i in range(space.n))
    return bool(np.all(M[index]))


@dataclass(frozen=True)
class MinimalWitnessFamily:
    """Inclusion-minimal witness sets of ``outcome`` in an event, as bitmasks."""

    outcome: Outcome
    masks: tuple[int, ...]

    @property
    def sets(self) -> tuple[frozenset, ...]:
        return tuple(mask_to_coords(m) for m in self.masks)

    def __len__(self):
        return len(self.masks)

    def __iter__(self):
        return iter(self.sets)


def _unique_extremes(space: ProductSpace, up: bool):
    ext = [f.minima if up else f.maxima for f in space.factors]
    if all(len(e) == 1 for e in ext):
        return tuple(e[0] for e in ext)
    return None


def monotone_shortcut_applies(E: Event) -> bool:
    """Unique factor minima with E increasing, or unique maxima with E decreasing."""
    space = E.space
    return ((_unique_extremes(space, True) is not None and is_increasing(E))
            or (_unique_extremes(space, False) is not None and is_decreasing(E)))


@lru_cache(maxsize=8192)
def _table_general(shape: tuple, key: bytes) -> tuple:
    """Minimal witness masks for every outcome, by sub-product reduction.

    The "S witnesses w" array for S is ``all(M, over axes outside S)``; it is
    obtained from the one for ``S | {j}`` by reducing axis ``j``.
    """
    n = len(shape)
    size = int(np.prod(shape))
    M = np.unpackbits(np.frombuffer(key, dtype=np.uint8), count=size).astype(bool).reshape(shape)
    full = (1 << n) - 1
    wit = {full: M}
    for S in sorted(range(full), key=lambda s: -bin(s).count("1")):
        j = (full & ~S).bit_length() - 1  # some coordinate outside S
        wit[S] = np.all(wit[S | (1 << j)], axis=j, keepdims=True)
    lists = [[] for _ in range(size)]
    for S in range(full + 1):
        mini = np.broadcast_to(wit[S], shape)
        for i in range(n):
            if S >> i & 1:
                mini = mini & ~np.broadcast_to(wit[S & ~(1 << i)], shape)
        for idx in np.flatnonzero(mini):
            lists[idx].append(S)
    return tuple(tuple(l) for l in lists)


def _minimal_masks(masks):
    out = []
    for m in sorted(set(masks), key=lambda s: (bin(s).count("1"), s)):
        if not any(o & m == o for o in out):
            out.append(m)
    return tuple(sorted(out))


@lru_cache(maxsize=8192)
def _table_monotone(shape: tuple, leqs: tuple, key: bytes, up: bool) -> tuple:
    """Minimal witness masks via the unique-extreme shortcut.

    For increasing E over factors with unique minima, S witnesses w iff the
    outcome equal to w on S and minimal elsewhere lies in E. The witnessing
    sets are then the supersets of supp(g) for minimal elements g <= w of E,
    where supp(g) is the set of coordinates at which g is not the minimum.
    Decreasing events are handled in the dual order.
    """
    n = len(shape)
    size = int(np.prod(shape))
    M = np.unpackbits(np.frombuffer(key, dtype=np.uint8), count=size).astype(bool).reshape(shape)
    leq = [np.frombuffer(l, dtype=bool).reshape(s, s) for l, s in zip(leqs, shape)]
    if not up:
        leq = [l.T for l in leq]
    # g in E is minimal iff no single lower-cover step from g stays in E
    gen = M.copy()
    for axis, l in enumerate(leq):
        s = shape[axis]
        for a in range(s):
            for b in range(s):
                if a != b and l[a, b] and not any(c not in (a, b) and l[a, c] and l[c, b] for c in range(s)):
                    lower = np.take(M, a, axis=axis)
                    idx = [slice(None)] * n
                    idx[axis] = b
                    gen[tuple(idx)] &= ~lower
    base = [int(np.flatnonzero(~(l & ~np.eye(l.shape[0], dtype=bool)).any(axis=0))[0]) for l in leq]
    G = np.array(np.unravel_index(np.flatnonzero(gen), shape), dtype=np.intp).T.reshape(-1, n)
    supp = [coords_to_mask(i for i in range(n) if g[i] != base[i]) for g in G.tolist()]
    W = np.array(np.unravel_index(np.arange(size), shape), dtype=np.intp).T
    below = np.ones((size, len(G)), dtype=bool)
    for i in range(n):
        below &= leq[i][G[:, i][None, :], W[:, i][:, None]]
    flat = M.reshape(-1)
    lists = []
    for idx in range(size):
        if not flat[idx]:
            lists.append(())
        else:
            lists.append(_minimal_masks(supp[j] for j in np.flatnonzero(below[idx])))
    return tuple(lists)


def witness_table(E: Event, shortcut: bool | None = None) -> tuple:
    """Minimal witness masks (ascending) for every outcome index of E.

    ``shortcut=None`` uses the unique-extreme shortcut whenever its
    precondition is verified; ``False`` forces sub-product enumeration.
    """
    space = E.space
    if shortcut is None or shortcut:
        for up in (True, False):
            base = _unique_extremes(space, up)
            if base is not None and (is_increasing(E) if up else is_decreasing(E)):
                leqs = tuple(f.leq_matrix.tobytes() for f in space.factors)
                return _table_monotone(space.shape, leqs, E.key, up)
        if shortcut:
            raise ValueError("monotone shortcut precondition does not hold")
    if (1 << space.n) * space.size > WITNESS_TABLE_CAP:
        raise SpaceTooLargeError("witness table exceeds cap; the monotone shortcut does not apply")
    return _table_general(space.shape, E.key)


def minimal_witnesses(E: Event, w: Outcome) -> MinimalWitnessFamily:
    """Antichain of inclusion-minimal witness sets of ``w`` in E (empty if w not in E)."""
    w = E.space.check_outcome(w)
    return MinimalWitnessFamily(w, witness_table(E)[E.space.index(w)])


# -- dependence structure ------------------------------------------------------------

def affects(i: int, E: Event) -> bool:
    """True iff some w in E and w' not in E differ only at coordinate ``i``."""
    space = E.space
    if not 0 <= i < space.n:
        raise SpaceMismatchError(f"coordinate {i} out of range")
    M = E.membership.reshape(space.shape)
    return bool(np.any(M.any(axis=i) & ~M.all(axis=i)))


def psi(events: Sequence[Event]) -> int:
    """Number of coordinates affecting at least two of the events."""
    space = _common_space(events)
    if space is None:
        return 0
    return sum(1 for i in range(space.n) if sum(affects(i, e) for e in events) >= 2)


def are_independent(events: Sequence[Event]) -> bool:
    """Mutual independence: every subfamily satisfies the product rule exactly."""
    if len(events) > INDEPENDENCE_CAP:
        raise TooManyEventsError(f"independence check capped at {INDEPENDENCE_CAP} events")
    space = _common_space(events)
    if space is None:
        return True
    probs = [probability(e) for e in events]
    k = len(events)

    def rec(start, inter, prod, size):
        for j in range(start, k):
            nxt = inter & events[j].membership
            p = prod * probs[j]
            if size + 1 >= 2 and space.mass(nxt) != p:
                return False
            if not rec(j + 1, nxt, p, size + 1):
                return False
        return True

    return rec(0, np.ones(space.size, dtype=bool), Fraction(1), 0)
