"""Certified evaluation of real-valued codes over set systems.

The code of a system assigns each unknown the real x_i solving
x_i = sum over its members k of 2**-x_k. The map on the right-hand
side, F, is antitone in every coordinate, which yields the alternating
scheme this solver implements with directed rounding:

    L0 = 0,   U(k+1) = F(L(k)) rounded up,   L(k+1) = F(U(k)) rounded down.

Whenever L <= alpha <= U componentwise, antitonicity gives
F(U) <= alpha <= F(L), so the invariant survives each step and the
rounded bounds always bracket the true solution; monotone rounding
makes L nondecreasing and U nonincreasing as well. The exact iterates
converge to the unique solution, so the bracket narrows to the rounding
floor of the working precision, which is escalated until the requested
width is met.

Well-founded systems short-circuit through exact structural recursion
(their set approximants stabilize after finitely many steps), as does
`ra_code` on concrete sets.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Literal, Sequence

from .dyadic import (
    DOWN,
    UP,
    Dyadic,
    Enclosure,
    as_fraction,
    pow2_neg,
    pow2_neg_enclosure,
    sum_enclosures,
)
from .errors import IterationLimitError, PrecisionExhausted
from .hf import HFSet
from .systems import SetSystem, is_normal, is_well_founded, normalize

__all__ = [
    "SolveStatus",
    "CodeSolution",
    "code_map",
    "code_approx",
    "delta_seq",
    "solve",
    "ra_code",
    "omega",
    "DEFAULT_MAX_PRECISION",
    "ITERATION_CAP",
]

log = logging.getLogger(__name__)

DEFAULT_MAX_PRECISION = 4096
START_PRECISION = 64
STALL_WINDOW = 8
ITERATION_CAP = 10**6

_ZERO = Dyadic(0, 0)


class SolveStatus(str, Enum):
    EXACT_STABILIZED = "exact-stabilized"
    CONVERGED = "converged"


@dataclass(frozen=True)
class CodeSolution:
    """Solved code system: one certified enclosure per input unknown.

    When the input was not normal it is quotiented first; `mapping`
    then records input index -> quotient index and `enclosures` is
    already mapped back onto the input indexing. `trace` (only kept on
    request) lists the (L, U) bound vectors of the quotient system at
    every iteration, initial state included.
    """

    enclosures: tuple[Enclosure, ...]
    iterations: int
    status: SolveStatus
    precision_bits: int
    epsilon: Fraction
    was_normalized: bool = False
    mapping: tuple[int, ...] | None = None
    trace: tuple[tuple[tuple[Dyadic, ...], tuple[Dyadic, ...]], ...] | None = None

    @property
    def max_width(self) -> Dyadic:
        widths = [e.width for e in self.enclosures]
        return max(widths, default=_ZERO)


def _eps_fraction(eps) -> Fraction:
    eps_frac = as_fraction(eps)
    if eps_frac <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    return eps_frac


def _eps_bits(eps_frac: Fraction) -> int:
    return max(1, eps_frac.denominator.bit_length() - eps_frac.numerator.bit_length() + 1)


def code_map(s: SetSystem, values: Sequence[Enclosure], precision: int) -> tuple[Enclosure, ...]:
    """Interval image of the code map F: row i becomes the enclosure of
    sum_k 2**-t_k over t_k in values[rhs[i][k]]."""
    kernels = [pow2_neg_enclosure(v, precision) for v in values]
    return tuple(
        sum_enclosures((kernels[k] for k in row), precision) for row in s.rhs
    )


def code_approx(s: SetSystem, j: int, precision: int) -> tuple[Enclosure, ...]:
    """Enclosures of the exact step-j code-approximation values.

    Step 0 is exactly zero everywhere; step j+1 applies the interval
    code map to step j, so each returned enclosure certifiably contains
    the exact real attached to the step-j multiset approximant.
    """
    if j < 0:
        raise ValueError("step must be nonnegative")
    cur = tuple(Enclosure.point(_ZERO) for _ in range(s.n))
    for _ in range(j):
        cur = code_map(s, cur, precision)
    return cur


def delta_seq(s: SetSystem, j: int, precision: int) -> tuple[Enclosure, ...]:
    """Enclosures of the step-j code increments (step j+1 minus step j)."""
    if j < 0:
        raise ValueError("step must be nonnegative")
    at_j = code_approx(s, j, precision)
    at_j1 = code_map(s, at_j, precision)
    return tuple(a1 - a0 for a0, a1 in zip(at_j, at_j1))


def _apply_bound(
    rhs: tuple[tuple[int, ...], ...],
    x: list[Dyadic],
    direction: Literal["down", "up"],
    precision: int,
) -> list[Dyadic]:
    """One directed application of F to a bound vector: kernels and the
    final sum are rounded in `direction`; the sums themselves are exact."""
    kernels = [pow2_neg(v, direction, precision) for v in x]
    out = []
    for row in rhs:
        acc = _ZERO
        for k in row:
            acc = acc + kernels[k]
        out.append(acc.round_to(precision, direction))
    return out


def _topo_order(rhs: tuple[tuple[int, ...], ...]) -> list[int]:
    n = len(rhs)
    state = [0] * n  # 0 unvisited, 1 active, 2 done
    order: list[int] = []
    for root in range(n):
        if state[root]:
            continue
        stack = [(root, 0)]
        state[root] = 1
        while stack:
            v, k = stack[-1]
            if k < len(rhs[v]):
                stack[-1] = (v, k + 1)
                w = rhs[v][k]
                if state[w] == 1:
                    raise ValueError("membership cycle in supposedly acyclic system")
                if state[w] == 0:
                    state[w] = 1
                    stack.append((w, 0))
            else:
                state[v] = 2
                order.append(v)
                stack.pop()
    return order


def _eval_acyclic(s: SetSystem, precision: int) -> tuple[Enclosure, ...]:
    values: list[Enclosure | None] = [None] * s.n
    for i in _topo_order(s.rhs):
        kernels = [pow2_neg_enclosure(values[k], precision) for k in s.rhs[i]]
        values[i] = sum_enclosures(kernels, precision)
    return tuple(values)


def _solve_recursive(
    s: SetSystem, eps_frac: Fraction, max_precision: int
) -> tuple[tuple[Enclosure, ...], int, int]:
    precision = max(START_PRECISION, _eps_bits(eps_frac) + 16)
    precision = min(precision, max_precision)
    rounds = 0
    while True:
        rounds += 1
        enc = _eval_acyclic(s, precision)
        widths = [e.width.as_fraction() for e in enc]
        if not widths or max(widths) <= eps_frac:
            return enc, precision, rounds
        if precision >= max_precision:
            raise PrecisionExhausted(
                f"width {max(widths)} > {eps_frac} at max precision {max_precision}",
                best=(enc, precision, rounds),
            )
        precision = min(precision * 2, max_precision)


def _solve_iterative(
    s: SetSystem,
    eps_frac: Fraction,
    max_precision: int,
    record_trace: bool,
) -> tuple[tuple[Enclosure, ...], int, int, list]:
    rhs = s.rhs
    n = s.n
    precision = min(START_PRECISION, max_precision)
    L: list[Dyadic] = [_ZERO] * n
    U: list[Dyadic] = _apply_bound(rhs, L, UP, precision)
    trace = [(tuple(L), tuple(U))] if record_trace else []
    width_log: list[Dyadic] = []
    iterations = 0

    def max_width() -> Dyadic:
        return max((u - l for l, u in zip(L, U)), default=_ZERO)

    while True:
        w = max_width()
        if w.as_fraction() <= eps_frac:
            enc = tuple(Enclosure(l, u) for l, u in zip(L, U))
            if iterations and width_log:
                # convergence rate is observed, never assumed
                log.debug("converged in %d iterations at %d bits; "
                          "last widths %s -> %s",
                          iterations, precision,
                          float(width_log[0]), float(w))
            return enc, precision, iterations, trace
        if iterations >= ITERATION_CAP:
            raise IterationLimitError(
                f"no convergence to {eps_frac} within {ITERATION_CAP} iterations")

        width_log.append(w)
        if len(width_log) > STALL_WINDOW:
            old = width_log[-STALL_WINDOW - 1]
            stalled = old < Dyadic(w.mantissa, w.exponent + 1)  # old < 2w
            if stalled:
                if precision < max_precision:
                    precision = min(precision * 2, max_precision)
                    width_log.clear()
                    log.debug("escalating to %d bits at iteration %d (width %s)",
                              precision, iterations, w)
                elif not (w < old):
                    enc = tuple(Enclosure(l, u) for l, u in zip(L, U))
                    raise PrecisionExhausted(
                        f"width {w.as_fraction()} > {eps_frac} stalled at "
                        f"max precision {max_precision}",
                        best=(enc, precision, iterations, trace),
                    )

        cand_L = _apply_bound(rhs, U, DOWN, precision)
        cand_U = _apply_bound(rhs, L, UP, precision)
        L = [max(old, new) for old, new in zip(L, cand_L)]
        U = [min(old, new) for old, new in zip(U, cand_U)]
        iterations += 1
        if record_trace:
            trace.append((tuple(L), tuple(U)))


def solve(
    s: SetSystem,
    eps,
    max_precision: int = DEFAULT_MAX_PRECISION,
    *,
    method: Literal["auto", "iterate", "recursive"] = "auto",
    record_trace: bool = False,
) -> CodeSolution:
    """Certified solution of the code system of `s`.

    `eps` (anything `Fraction` accepts, or a Dyadic) bounds the final
    enclosure widths. Non-normal systems are quotiented first and the
    result is mapped back onto the input indexing, with
    `was_normalized` set. Well-founded systems are evaluated by exact
    structural recursion unless `method="iterate"` forces the
    alternating scheme; both give enclosures of the same unique
    solution.

    Raises PrecisionExhausted (best result attached) when
    `max_precision` cannot reach the requested width, and
    IterationLimitError past the iteration safety cap.
    """
    eps_frac = _eps_fraction(eps)
    if max_precision < START_PRECISION:
        raise ValueError(f"max_precision {max_precision} < {START_PRECISION}")

    was_normalized = False
    mapping: tuple[int, ...] | None = None
    core = s
    if not is_normal(s):
        core, mapping = normalize(s)
        was_normalized = True

    def finish(enclosures, precision, iterations, status, trace):
        if mapping is not None:
            enclosures = tuple(enclosures[mapping[i]] for i in range(s.n))
        return CodeSolution(
            enclosures=enclosures,
            iterations=iterations,
            status=status,
            precision_bits=precision,
            epsilon=eps_frac,
            was_normalized=was_normalized,
            mapping=mapping,
            trace=tuple(trace) if record_trace else None,
        )

    if method not in ("auto", "iterate", "recursive"):
        raise ValueError(f"unknown method {method!r}")
    use_recursive = method == "recursive" or (
        method == "auto" and is_well_founded(core))
    if method == "recursive" and not is_well_founded(core):
        raise ValueError("recursive method requires a well-founded system")

    if use_recursive:
        try:
            enc, precision, rounds = _solve_recursive(core, eps_frac, max_precision)
        except PrecisionExhausted as exc:
            enc, precision, rounds = exc.best
            raise PrecisionExhausted(
                str(exc),
                best=finish(enc, precision, rounds,
                            SolveStatus.EXACT_STABILIZED, []),
            ) from None
        return finish(enc, precision, rounds, SolveStatus.EXACT_STABILIZED, [])

    try:
        enc, precision, iterations, trace = _solve_iterative(
            core, eps_frac, max_precision, record_trace)
    except PrecisionExhausted as exc:
        enc, precision, iterations, trace = exc.best
        raise PrecisionExhausted(
            str(exc),
            best=finish(enc, precision, iterations,
                        SolveStatus.CONVERGED, trace),
        ) from None
    return finish(enc, precision, iterations, SolveStatus.CONVERGED, trace)


def _eval_set(h: HFSet, precision: int, memo: dict) -> Enclosure:
    got = memo.get(id(h))
    if got is not None:
        return got[0]
    kernels = []
    for child in h.children:
        centry = memo.get(id(child))
        if centry is None:
            _eval_set(child, precision, memo)
            centry = memo[id(child)]
        kernel = centry[1]
        if kernel is None:
            kernel = pow2_neg_enclosure(centry[0], precision)
            memo[id(child)] = (centry[0], kernel)
        kernels.append(kernel)
    enc = sum_enclosures(kernels, precision)
    memo[id(h)] = (enc, None)
    return enc


def ra_code(h: HFSet, eps, max_precision: int = DEFAULT_MAX_PRECISION) -> Enclosure:
    """Certified code of a well-founded set, by structural recursion.

    Shared subterms are evaluated once per precision level; precision
    doubles until the enclosure is narrower than `eps`.
    """
    eps_frac = _eps_fraction(eps)
    precision = min(max(START_PRECISION, _eps_bits(eps_frac) + 16), max_precision)
    best: Enclosure | None = None
    while True:
        enc = _eval_set(h, precision, {})
        if enc.width.as_fraction() <= eps_frac:
            return enc
        best = enc if best is None or enc.width < best.width else best
        if precision >= max_precision:
            raise PrecisionExhausted(
                f"width {enc.width.as_fraction()} > {eps_frac} "
                f"at max precision {max_precision}",
                best=best,
            )
        precision = min(precision * 2, max_precision)


_OMEGA_SYSTEM = SetSystem(((0,),))


def omega(eps, max_precision: int = DEFAULT_MAX_PRECISION) -> Enclosure:
    """Enclosure of the unique solution of x = 2**-x (the code of the
    hyperset that is its own sole member)."""
    return solve(_OMEGA_SYSTEM, eps, max_precision).enclosures[0]
