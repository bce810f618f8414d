"""Set- and multiset-approximating sequences of a set system.

Step 0 assigns the empty set to every unknown; step j+1 rebuilds each
unknown from its right-hand side's step-j values. With set semantics
duplicates collapse; with multiset semantics they accumulate as
multiplicities, which is what lets the multiset sequence tell unknowns
apart earlier than the set sequence can.

Multisets are hash-consed like `HFSet`, with a deterministic child
order (shorter canonical spelling first, then lexicographic), so
structural equality is identity here as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Literal

from .hf import EMPTY, HFSet, hfset
from .systems import SetSystem

__all__ = [
    "HFMultiset",
    "MULTI_EMPTY",
    "hfmultiset",
    "embed_set",
    "ApproxTuple",
    "set_approx",
    "multiset_approx",
    "distinguished_step",
    "set_stabilization",
]


class HFMultiset:
    """Interned hereditarily finite multiset.

    `children` pairs each distinct member with its multiplicity (>= 1),
    ordered by the member's canonical spelling. Build values with
    `hfmultiset`; direct construction bypasses interning.
    """

    __slots__ = ("children", "_canon")

    def __init__(self, children: tuple[tuple["HFMultiset", int], ...]):
        self.children = children
        self._canon = None

    def canonical(self) -> str:
        """Square-brackets spelling, members repeated by multiplicity."""
        c = self._canon
        if c is None:
            parts = []
            for child, mult in self.children:
                parts.extend([child.canonical()] * mult)
            c = "[" + ",".join(parts) + "]"
            self._canon = c
        return c

    def is_plain_set(self) -> bool:
        """True when every multiplicity is 1, hereditarily."""
        return all(m == 1 and c.is_plain_set() for c, m in self.children)

    def __len__(self) -> int:
        return sum(m for _, m in self.children)

    def __repr__(self) -> str:
        return f"HFMultiset({self.canonical()})"


_MINTERN: dict[tuple[tuple[HFMultiset, int], ...], HFMultiset] = {}


def _mintern(children: tuple[tuple[HFMultiset, int], ...]) -> HFMultiset:
    node = _MINTERN.get(children)
    if node is None:
        node = _MINTERN.setdefault(children, HFMultiset(children))
    return node


MULTI_EMPTY = _mintern(())


def hfmultiset(items: Iterable[HFMultiset]) -> HFMultiset:
    """Multiset of the given members, multiplicities from repetition."""
    counts: dict[int, int] = {}
    nodes: dict[int, HFMultiset] = {}
    for item in items:
        counts[id(item)] = counts.get(id(item), 0) + 1
        nodes[id(item)] = item
    ordered = sorted(
        ((nodes[k], m) for k, m in counts.items()),
        key=lambda pair: (len(pair[0].canonical()), pair[0].canonical()),
    )
    return _mintern(tuple(ordered))


_EMBED: dict[int, HFMultiset] = {}


def embed_set(h: HFSet) -> HFMultiset:
    """The multiset image of a set: every multiplicity 1, hereditarily."""
    got = _EMBED.get(id(h))
    if got is None:
        got = hfmultiset(embed_set(c) for c in h.children)
        _EMBED[id(h)] = got
    return got


@dataclass(frozen=True)
class ApproxTuple:
    """One row of an approximating sequence: step j and the n values."""

    kind: Literal["set", "multiset"]
    step: int
    values: tuple


def _set_steps(s: SetSystem, j: int) -> Iterator[tuple[HFSet, ...]]:
    cur: tuple[HFSet, ...] = tuple(EMPTY for _ in range(s.n))
    yield cur
    for _ in range(j):
        cur = tuple(hfset(cur[k] for k in row) for row in s.rhs)
        yield cur


def _multiset_steps(s: SetSystem, j: int) -> Iterator[tuple[HFMultiset, ...]]:
    cur: tuple[HFMultiset, ...] = tuple(MULTI_EMPTY for _ in range(s.n))
    yield cur
    for _ in range(j):
        cur = tuple(hfmultiset(cur[k] for k in row) for row in s.rhs)
        yield cur


def _last(steps) -> tuple:
    values = None
    for values in steps:
        pass
    return values


def set_approx(s: SetSystem, j: int) -> ApproxTuple:
    """The step-j tuple of the set-approximating sequence."""
    if j < 0:
        raise ValueError("step must be nonnegative")
    return ApproxTuple("set", j, _last(_set_steps(s, j)))


def multiset_approx(s: SetSystem, j: int) -> ApproxTuple:
    """The step-j tuple of the multiset-approximating sequence."""
    if j < 0:
        raise ValueError("step must be nonnegative")
    return ApproxTuple("multiset", j, _last(_multiset_steps(s, j)))


def distinguished_step(
    s: SetSystem, kind: Literal["set", "multiset"]
) -> dict[tuple[int, int], int | None]:
    """First step at which each pair of unknowns gets different values.

    Keys are pairs (i, i') with i < i'; the value is the first step k
    with different step-k values, or None when the pair is never
    distinguished. Looking further than step n is pointless: the
    sequence factors through the bisimulation quotient, which pins every
    distinguishable pair down within its (at most n) unknowns.
    """
    steps = _set_steps(s, s.n) if kind == "set" else _multiset_steps(s, s.n)
    result: dict[tuple[int, int], int | None] = {
        (i, k): None for i in range(s.n) for k in range(i + 1, s.n)
    }
    undecided = set(result)
    for step, values in enumerate(steps):
        decided = [p for p in undecided if values[p[0]] is not values[p[1]]]
        for p in decided:
            result[p] = step
            undecided.discard(p)
        if not undecided:
            break
    return result


def _stabilizing_indices(s: SetSystem) -> set[int]:
    """Indices whose reachable subgraph is acyclic.

    Iteratively admits every unknown all of whose members are already
    admitted; anything left over can reach a membership cycle.
    """
    safe: set[int] = set()
    changed = True
    while changed:
        changed = False
        for v in range(s.n):
            if v not in safe and all(w in safe for w in s.rhs[v]):
                safe.add(v)
                changed = True
    return safe


def set_stabilization(s: SetSystem) -> tuple[int | None, ...]:
    """Per unknown: first j with equal step-j and step-(j+1) values.

    None marks unknowns that never stabilize (a membership cycle is
    reachable, so their approximants grow forever); for the others the
    first repeat happens within n steps.
    """
    result: list[int | None] = [None] * s.n
    pending = _stabilizing_indices(s)
    prev: tuple[HFSet, ...] | None = None
    for step, values in enumerate(_set_steps(s, s.n + 1)):
        if prev is not None:
            for i in [i for i in pending if values[i] is prev[i]]:
                result[i] = step - 1
                pending.discard(i)
        if not pending:
            break
        prev = values
    return tuple(result)
