"""Well-founded hereditarily finite sets and the Ackermann codec.

`HFSet` values are hash-consed: every distinct set exists as exactly one
interned object, with children stored in ascending code order. Equality
is therefore identity, towers and decoded sets share structure, and all
operations here are pure functions over immutable values.

The code of a set is the bigint whose bit j is 1 exactly when the j-th
set (in code order) is a member. Codes grow as towers of exponentials,
so `ack_compare` works structurally on the children and never
materializes a code, and encode/decode enforce a configurable bit
budget instead of crashing on astronomical values.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .errors import BitBudgetError, ParseError

__all__ = [
    "HFSet",
    "EMPTY",
    "DEFAULT_BIT_BUDGET",
    "hfset",
    "ack_encode",
    "ack_decode",
    "ack_compare",
    "low",
    "successor_set",
    "rank",
    "iterated_singleton",
    "parse_braces",
]

DEFAULT_BIT_BUDGET = 1 << 20


class HFSet:
    """An interned, canonically ordered hereditarily finite set.

    Do not call the constructor directly; build values with `hfset`,
    `ack_decode`, or `parse_braces` so interning stays consistent.
    """

    __slots__ = ("children", "_rank", "_code")

    def __init__(self, children: tuple["HFSet", ...]):
        self.children = children
        self._rank = None
        self._code = None

    def __len__(self) -> int:
        return len(self.children)

    def __iter__(self) -> Iterator["HFSet"]:
        return iter(self.children)

    def __contains__(self, other: "HFSet") -> bool:
        return any(c is other for c in self.children)

    def __repr__(self) -> str:
        return f"HFSet({self.to_braces()})"

    def to_braces(self) -> str:
        return "{" + ",".join(c.to_braces() for c in self.children) + "}"

    # Interned values compare by identity; hashing follows suit (object
    # default), which keeps dict/memo lookups O(1) regardless of depth.


_INTERN: dict[tuple[HFSet, ...], HFSet] = {}


def _intern(children: tuple[HFSet, ...]) -> HFSet:
    node = _INTERN.get(children)
    if node is None:
        # setdefault is atomic under the GIL, so concurrent interning of
        # the same value still yields one canonical object
        node = _INTERN.setdefault(children, HFSet(children))
    return node


EMPTY = _intern(())


def ack_compare(a: HFSet, b: HFSet) -> int:
    """Compare two sets in code order: -1, 0, or 1.

    Walks both children lists from the largest member down; the first
    differing member decides, and if one list is a prefix of the other
    (from the top), the longer set is the larger. This is the
    symmetric-difference rule: the set holding the maximal element of
    a delta b is the greater one.
    """
    if a is b:
        return 0
    for ca, cb in zip(reversed(a.children), reversed(b.children)):
        c = ack_compare(ca, cb)
        if c:
            return c
    return (len(a) > len(b)) - (len(a) < len(b))


def _sorted_unique(items: Iterable[HFSet]) -> tuple[HFSet, ...]:
    unique: list[HFSet] = []
    seen: set[int] = set()
    for item in items:
        if id(item) not in seen:
            seen.add(id(item))
            unique.append(item)
    unique.sort(key=_CompareKey)
    return tuple(unique)


class _CompareKey:
    __slots__ = ("node",)

    def __init__(self, node: HFSet):
        self.node = node

    def __lt__(self, other: "_CompareKey") -> bool:
        return ack_compare(self.node, other.node) < 0


def hfset(children: Iterable[HFSet] = ()) -> HFSet:
    """The set of the given children (deduplicated, canonically ordered)."""
    return _intern(_sorted_unique(children))


def ack_encode(h: HFSet, bit_budget: int = DEFAULT_BIT_BUDGET) -> int:
    """Ackermann code of h: sum over children of 2**code(child).

    Raises BitBudgetError when any intermediate code would exceed
    `bit_budget` bits; singleton towers blow past any budget after a
    handful of levels, so this is a normal, reportable outcome.
    """
    cached = h._code
    if cached is not None:
        if cached.bit_length() > bit_budget:
            raise BitBudgetError(
                f"code needs {cached.bit_length()} bits > budget {bit_budget}")
        return cached
    code = 0
    for child in h.children:
        c = ack_encode(child, bit_budget)
        if c >= bit_budget:
            raise BitBudgetError(
                f"code needs more than {bit_budget} bits "
                f"(a member's code has {c.bit_length()} bits)")
        code |= 1 << c
    h._code = code
    return code


_DECODE_CACHE: dict[int, HFSet] = {0: EMPTY}


def ack_decode(i: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> HFSet:
    """The i-th hereditarily finite set in code order.

    Children are read off the binary expansion of i; bit positions come
    out ascending, which is already the canonical child order.
    """
    if i < 0:
        raise ValueError(f"code must be nonnegative, got {i}")
    if i.bit_length() > bit_budget:
        raise BitBudgetError(
            f"decoding {i.bit_length()}-bit code exceeds budget {bit_budget}")
    cached = _DECODE_CACHE.get(i)
    if cached is not None:
        return cached
    children = []
    rest = i
    while rest:
        lsb = rest & -rest
        children.append(ack_decode(lsb.bit_length() - 1, bit_budget))
        rest ^= lsb
    node = _intern(tuple(children))
    node._code = i
    if i.bit_length() <= 64:
        _DECODE_CACHE[i] = node
    return node


def low(i: int) -> int:
    """Position of the lowest 0-bit of i: the least code absent from h_i."""
    if i < 0:
        raise ValueError(f"code must be nonnegative, got {i}")
    return ((i + 1) & ~i).bit_length() - 1


def successor_set(h: HFSet) -> HFSet:
    """The set whose code is code(h) + 1, computed structurally.

    The members h_0, h_1, ... form a maximal run at the bottom of h;
    incrementing the code clears that run and inserts the next set after
    it, exactly like binary carry propagation.
    """
    t = 0
    for child in h.children:
        if child is ack_decode(t):
            t += 1
        else:
            break
    carry = ack_decode(t)
    return _intern((carry,) + h.children[t:])


def rank(h: HFSet) -> int:
    """von Neumann rank: 0 for the empty set, else 1 + max child rank."""
    r = h._rank
    if r is None:
        r = 1 + max((rank(c) for c in h.children), default=-1)
        h._rank = r
    return r


def iterated_singleton(n: int) -> HFSet:
    """n-fold singleton of the empty set."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    node = EMPTY
    for _ in range(n):
        node = _intern((node,))
    return node


def parse_braces(text: str) -> HFSet:
    """Parse braces notation like `{{},{{}}}` into a set.

    Duplicate members are collapsed and ordering is canonicalized, so
    any well-bracketed spelling of a set parses to the same value.
    """
    pos = 0
    n = len(text)

    def skip_ws(p: int) -> int:
        while p < n and text[p].isspace():
            p += 1
        return p

    def parse_set(p: int) -> tuple[HFSet, int]:
        p = skip_ws(p)
        if p >= n or text[p] != "{":
            raise ParseError(f"expected '{{' at position {p}")
        p = skip_ws(p + 1)
        members: list[HFSet] = []
        if p < n and text[p] == "}":
            return hfset(members), p + 1
        while True:
            member, p = parse_set(p)
            members.append(member)
            p = skip_ws(p)
            if p >= n:
                raise ParseError("unterminated set")
            if text[p] == ",":
                p = skip_ws(p + 1)
                continue
            if text[p] == "}":
                return hfset(members), p + 1
            raise ParseError(f"expected ',' or '}}' at position {p}")

    value, pos = parse_set(0)
    pos = skip_ws(pos)
    if pos != n:
        raise ParseError(f"trailing input at position {pos}")
    return value
