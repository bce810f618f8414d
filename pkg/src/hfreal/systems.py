"""Set systems, pointed membership graphs, and bisimulation quotients.

A `SetSystem` is the equational presentation of a tuple of hypersets:
unknown i equals the set of the unknowns listed in rhs[i]. Bisimilarity
is computed by signature-based partition refinement; a system is normal
when all unknowns are pairwise non-bisimilar, which is exactly when the
coarsest auto-bisimulation is discrete.

Text interfaces live here too: one-equation-per-line system text
(`name = { a, b }`) and edge-list graph text (`v -> w` plus `point v`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ParseError, UnreachableNodesError
from .hf import HFSet, hfset

__all__ = [
    "SetSystem",
    "PointedGraph",
    "Partition",
    "coarsest_bisimulation",
    "is_normal",
    "normalize",
    "graph_to_system",
    "is_well_founded",
    "hfset_to_system",
    "well_founded_value",
    "parse_system",
    "parse_graph",
    "format_system",
]


@dataclass(frozen=True)
class SetSystem:
    """n set equations; rhs[i] lists the member unknowns of unknown i.

    Duplicate indices on a right-hand side are removed at construction
    ({x, x} and {x} are the same set), and every index must name an
    unknown of the system.
    """

    rhs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.rhs)
        cleaned = []
        for i, row in enumerate(self.rhs):
            seen: set[int] = set()
            out = []
            for k in row:
                if not 0 <= k < n:
                    raise ValueError(f"equation {i} references unknown {k}, "
                                     f"but the system has {n} unknowns")
                if k not in seen:
                    seen.add(k)
                    out.append(k)
            cleaned.append(tuple(out))
        object.__setattr__(self, "rhs", tuple(cleaned))

    @property
    def n(self) -> int:
        return len(self.rhs)

    def cardinality(self, i: int) -> int:
        return len(self.rhs[i])


@dataclass(frozen=True)
class PointedGraph:
    """Directed membership graph: edge (v, w) means w is a member of v."""

    n: int
    edges: tuple[tuple[int, int], ...]
    point: int

    def __post_init__(self):
        if not 0 <= self.point < self.n:
            raise ValueError(f"point {self.point} out of range for {self.n} nodes")
        for v, w in self.edges:
            if not (0 <= v < self.n and 0 <= w < self.n):
                raise ValueError(f"edge ({v}, {w}) out of range for {self.n} nodes")
        object.__setattr__(self, "edges", tuple(self.edges))

    def successors(self) -> list[list[int]]:
        succ: list[list[int]] = [[] for _ in range(self.n)]
        seen: list[set[int]] = [set() for _ in range(self.n)]
        for v, w in self.edges:
            if w not in seen[v]:
                seen[v].add(w)
                succ[v].append(w)
        return succ


@dataclass(frozen=True)
class Partition:
    """Assignment of each index to a dense block id in [0, n_blocks).

    Blocks are numbered by their least member, so equal partitions get
    equal numberings regardless of how they were computed.
    """

    assignment: tuple[int, ...]
    n_blocks: int = field(default=0)

    def __post_init__(self):
        if self.assignment:
            expected = max(self.assignment) + 1
        else:
            expected = 0
        object.__setattr__(self, "n_blocks", expected)

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_blocks)]
        for i, b in enumerate(self.assignment):
            out[b].append(i)
        return out

    def is_discrete(self) -> bool:
        return self.n_blocks == len(self.assignment)


def _successor_lists(source: SetSystem | PointedGraph) -> list[list[int]]:
    if isinstance(source, SetSystem):
        return [list(row) for row in source.rhs]
    return source.successors()


def _renumber(raw: Sequence) -> tuple[int, ...]:
    ids: dict = {}
    out = []
    for sig in raw:
        if sig not in ids:
            ids[sig] = len(ids)
        out.append(ids[sig])
    return tuple(out)


def coarsest_bisimulation(source: SetSystem | PointedGraph) -> Partition:
    """Coarsest partition under which bisimilar indices share a block.

    Standard signature refinement from the all-in-one-block partition:
    an index's signature is its current block plus the *set* of blocks
    its successors occupy (successor lists denote sets, so multiplicity
    must not split blocks). Scanning indices in order gives the
    least-member block numbering; at most n rounds are needed.
    """
    succ = _successor_lists(source)
    n = len(succ)
    if n == 0:
        return Partition(())
    assignment = tuple(0 for _ in range(n))
    while True:
        sigs = [
            (assignment[i], frozenset(assignment[w] for w in succ[i]))
            for i in range(n)
        ]
        refined = _renumber(sigs)
        if refined == assignment:
            return Partition(assignment)
        assignment = refined


def is_normal(s: SetSystem) -> bool:
    """True when all unknowns denote pairwise distinct hypersets."""
    return coarsest_bisimulation(s).is_discrete()


def normalize(s: SetSystem) -> tuple[SetSystem, tuple[int, ...]]:
    """Quotient by the coarsest bisimulation.

    Returns the normal quotient system and the index mapping old -> new.
    Applying normalize to its own output is the identity mapping.
    """
    part = coarsest_bisimulation(s)
    mapping = part.assignment
    new_rhs: list[tuple[int, ...]] = [() for _ in range(part.n_blocks)]
    for block, members in enumerate(part.blocks()):
        rep = members[0]
        new_rhs[block] = tuple(mapping[k] for k in s.rhs[rep])
    return SetSystem(tuple(new_rhs)), mapping


def graph_to_system(g: PointedGraph) -> tuple[SetSystem, int]:
    """Read a pointed graph as a set system, one equation per node.

    Every node must be reachable from the point; offenders are reported
    in an UnreachableNodesError.
    """
    succ = g.successors()
    reachable = {g.point}
    frontier = [g.point]
    while frontier:
        v = frontier.pop()
        for w in succ[v]:
            if w not in reachable:
                reachable.add(w)
                frontier.append(w)
    if len(reachable) != g.n:
        raise UnreachableNodesError(sorted(set(range(g.n)) - reachable))
    return SetSystem(tuple(tuple(row) for row in succ)), g.point


def is_well_founded(s: SetSystem) -> bool:
    """True iff the membership digraph is acyclic."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = [WHITE] * s.n
    for root in range(s.n):
        if color[root] != WHITE:
            continue
        stack: list[tuple[int, int]] = [(root, 0)]
        color[root] = GRAY
        while stack:
            v, k = stack[-1]
            if k < len(s.rhs[v]):
                stack[-1] = (v, k + 1)
                w = s.rhs[v][k]
                if color[w] == GRAY:
                    return False
                if color[w] == WHITE:
                    color[w] = GRAY
                    stack.append((w, 0))
            else:
                color[v] = BLACK
                stack.pop()
    return True


def hfset_to_system(h: HFSet) -> tuple[SetSystem, int]:
    """Equational presentation of a well-founded set.

    Unknowns are the members of the transitive closure of {h}, in
    point-first breadth-first discovery order (children visited in
    canonical order); the result is normal and well-founded by
    construction.
    """
    index: dict[int, int] = {}
    order: list[HFSet] = []

    def visit(node: HFSet) -> int:
        got = index.get(id(node))
        if got is not None:
            return got
        idx = len(order)
        index[id(node)] = idx
        order.append(node)
        return idx

    visit(h)
    pos = 0
    while pos < len(order):
        node = order[pos]
        pos += 1
        for child in node.children:
            visit(child)
    rhs = tuple(tuple(index[id(c)] for c in node.children) for node in order)
    return SetSystem(rhs), 0


def well_founded_value(s: SetSystem, index: int) -> HFSet:
    """The set denoted by an unknown whose reachable part is acyclic."""
    values: dict[int, HFSet] = {}
    ON_STACK = object()

    def eval_at(i: int) -> HFSet:
        got = values.get(i)
        if got is ON_STACK:
            raise ValueError(f"unknown {i} lies on a membership cycle")
        if got is not None:
            return got
        values[i] = ON_STACK
        value = hfset(eval_at(k) for k in s.rhs[i])
        values[i] = value
        return value

    return eval_at(index)


_EQ_RE = re.compile(
    r"^\s*(?P<name>[A-Za-z_]\w*)\s*=\s*\{(?P<body>[^{}]*)\}\s*$")
_EDGE_RE = re.compile(
    r"^\s*(?P<src>[A-Za-z_]\w*)\s*->\s*(?P<dst>[A-Za-z_]\w*)\s*$")
_POINT_RE = re.compile(r"^\s*point\s+(?P<name>[A-Za-z_]\w*)\s*$")


def _strip_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def parse_system(text: str) -> tuple[SetSystem, tuple[str, ...], int]:
    """Parse `name = { a, b }` lines; returns (system, names, point).

    The point is the unknown of the first equation. Every name on a
    right-hand side must have its own equation.
    """
    lines = _strip_lines(text)
    if not lines:
        raise ParseError("empty system")
    names: list[str] = []
    bodies: list[str] = []
    index: dict[str, int] = {}
    for lineno, line in lines:
        m = _EQ_RE.match(line)
        if not m:
            raise ParseError(f"line {lineno}: expected `name = {{ ... }}`")
        name = m.group("name")
        if name in index:
            raise ParseError(f"line {lineno}: duplicate equation for {name!r}")
        index[name] = len(names)
        names.append(name)
        bodies.append(m.group("body"))
    rhs = []
    for i, body in enumerate(bodies):
        row = []
        body = body.strip()
        if body:
            for part in body.split(","):
                ref = part.strip()
                if not ref:
                    raise ParseError(f"equation for {names[i]!r}: empty member")
                if ref not in index:
                    raise ParseError(
                        f"equation for {names[i]!r}: unknown name {ref!r}")
                row.append(index[ref])
        rhs.append(tuple(row))
    return SetSystem(tuple(rhs)), tuple(names), 0


def parse_graph(text: str) -> tuple[PointedGraph, tuple[str, ...]]:
    """Parse `v -> w` edges plus a mandatory `point v` line."""
    lines = _strip_lines(text)
    if not lines:
        raise ParseError("empty graph")
    names: list[str] = []
    index: dict[str, int] = {}

    def node(name: str) -> int:
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    edges: list[tuple[int, int]] = []
    point_name = None
    for lineno, line in lines:
        m = _POINT_RE.match(line)
        if m:
            if point_name is not None:
                raise ParseError(f"line {lineno}: duplicate point declaration")
            point_name = m.group("name")
            node(point_name)
            continue
        m = _EDGE_RE.match(line)
        if not m:
            raise ParseError(f"line {lineno}: expected `v -> w` or `point v`")
        edges.append((node(m.group("src")), node(m.group("dst"))))
    if point_name is None:
        raise ParseError("graph text must declare `point <node>`")
    return PointedGraph(len(names), tuple(edges), index[point_name]), tuple(names)


def format_system(s: SetSystem, names: Sequence[str] | None = None) -> str:
    """Render a system in the parseable one-equation-per-line grammar."""
    if names is None:
        names = [f"s{i}" for i in range(s.n)]
    lines = []
    for i, row in enumerate(s.rhs):
        body = ", ".join(names[k] for k in row)
        lines.append(f"{names[i]} = {{{body}}}" if body else f"{names[i]} = {{}}")
    return "\n".join(lines)
