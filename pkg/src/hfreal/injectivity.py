"""Experiments around injectivity of the real-valued code.

Everything here works with certified enclosures, so a reported
separation is a proof that two codes differ, while an overlap is only
ever "unresolved at this precision" -- an enclosure can certify
inequality but never equality, and whether overlapping pairs hide true
collisions is exactly the open question these experiments probe.

Codes of the first N sets are cheap to enclose directly: the members of
the i-th set are the sets whose indices are the set bits of i, all
below log2(N), so one pass over 0..N-1 reuses a dozen kernel values.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .dyadic import Dyadic, Enclosure, pow2_neg_enclosure, sum_enclosures
from .errors import BudgetError
from .hf import HFSet, ack_decode, hfset
from .solver import DEFAULT_MAX_PRECISION, START_PRECISION, _eps_bits, _eps_fraction, ra_code

__all__ = [
    "ScanEntry",
    "ScanReport",
    "AdjacencyReport",
    "DeltaGapResult",
    "codes_up_to",
    "scan",
    "check_adjacent",
    "delta_gap",
    "unbounded_witness",
]

_ZERO = Dyadic(0, 0)
_MINUS_ONE = Dyadic(-1, 0)


def codes_up_to(n: int, precision: int) -> list[Enclosure]:
    """Enclosures of the codes of the first n sets (index order)."""
    if n <= 0:
        return []
    codes: list[Enclosure] = [Enclosure.point(_ZERO)]
    kernels: list[Enclosure] = []
    for i in range(1, n):
        while len(kernels) < i.bit_length():
            kernels.append(pow2_neg_enclosure(codes[len(kernels)], precision))
        terms = []
        rest = i
        while rest:
            lsb = rest & -rest
            terms.append(kernels[lsb.bit_length() - 1])
            rest ^= lsb
        codes.append(sum_enclosures(terms, precision))
    return codes


def _codes_chunk(args: tuple[int, int, int]) -> list[tuple[int, int, int, int]]:
    start, stop, precision = args
    codes = codes_up_to(stop, precision)
    return [
        (e.lo.mantissa, e.lo.exponent, e.hi.mantissa, e.hi.exponent)
        for e in codes[start:stop]
    ]


def _codes_parallel(n: int, precision: int, jobs: int) -> list[Enclosure]:
    chunk = max(64, -(-n // jobs))
    spans = [(a, min(a + chunk, n), precision) for a in range(0, n, chunk)]
    out: list[Enclosure] = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for rows in pool.map(_codes_chunk, spans):
            out.extend(
                Enclosure(Dyadic(ml, el), Dyadic(mh, eh)) for ml, el, mh, eh in rows
            )
    return out


@dataclass(frozen=True)
class ScanEntry:
    index: int
    enclosure: Enclosure
    flagged: bool
    unresolved: bool


@dataclass(frozen=True)
class ScanReport:
    count: int
    epsilon: Fraction
    max_precision: int
    final_precision: int
    entries: tuple[ScanEntry, ...]
    unresolved_pairs: tuple[tuple[int, int], ...]
    min_certified_gap: Dyadic | None

    def unresolved_count(self) -> int:
        return len(self.unresolved_pairs)


def _overlap_pairs(codes: list[Enclosure]) -> list[tuple[int, int]]:
    """All index pairs with overlapping enclosures, by endpoint sweep.

    Sorting by lower endpoint and keeping an active set bounded by the
    current lower endpoint finds every overlap, not just neighbors of a
    midpoint ordering.
    """
    order = sorted(range(len(codes)), key=lambda i: (codes[i].lo, codes[i].hi, i))
    active: list[int] = []
    pairs: list[tuple[int, int]] = []
    for i in order:
        lo = codes[i].lo
        active = [j for j in active if not (codes[j].hi < lo)]
        for j in active:
            pairs.append((min(i, j), max(i, j)))
        active.append(i)
    pairs.sort()
    return pairs


def scan(
    n: int,
    eps,
    max_precision: int = DEFAULT_MAX_PRECISION,
    jobs: int = 1,
) -> ScanReport:
    """Certified collision scan over the first n codes.

    Every code is enclosed to width <= eps, overlapping pairs are found
    by a full endpoint sweep, and each flagged pair is refined with
    doubling precision. Pairs still overlapping at max_precision are
    reported as unresolved -- data, not a verdict. The minimal certified
    gap is taken over adjacent distinct codes in sorted order.
    """
    if n < 2:
        raise ValueError("scan needs at least two indices")
    eps_frac = _eps_fraction(eps)
    precision = min(max(START_PRECISION, _eps_bits(eps_frac) + 16), max_precision)
    while True:
        codes = (
            _codes_parallel(n, precision, jobs)
            if jobs > 1
            else codes_up_to(n, precision)
        )
        widest = max(e.width.as_fraction() for e in codes)
        if widest <= eps_frac or precision >= max_precision:
            break
        precision = min(precision * 2, max_precision)

    flagged_pairs = _overlap_pairs(codes)
    flagged_idx = {i for pair in flagged_pairs for i in pair}

    refined = dict(enumerate(codes))
    unresolved: list[tuple[int, int]] = []
    for a, b in flagged_pairs:
        p = precision
        ea, eb = refined[a], refined[b]
        while ea.overlaps(eb) and p < max_precision:
            p = min(p * 2, max_precision)
            base = codes_up_to(max(a, b) + 1, p)
            ea, eb = base[a], base[b]
        refined[a], refined[b] = ea, eb
        if ea.overlaps(eb):
            unresolved.append((a, b))

    final_codes = [refined[i] for i in range(n)]
    order = sorted(range(n), key=lambda i: (final_codes[i].lo, final_codes[i].hi, i))
    min_gap: Dyadic | None = None
    for prev, cur in zip(order, order[1:]):
        gap = final_codes[prev].separation(final_codes[cur])
        if gap > _ZERO and (min_gap is None or gap < min_gap):
            min_gap = gap

    unresolved_set = {p for p in unresolved}
    unresolved_idx = {i for pair in unresolved_set for i in pair}
    entries = tuple(
        ScanEntry(
            index=i,
            enclosure=final_codes[i],
            flagged=i in flagged_idx,
            unresolved=i in unresolved_idx,
        )
        for i in range(n)
    )
    return ScanReport(
        count=n,
        epsilon=eps_frac,
        max_precision=max_precision,
        final_precision=precision,
        entries=entries,
        unresolved_pairs=tuple(sorted(unresolved_set)),
        min_certified_gap=min_gap,
    )


@dataclass(frozen=True)
class AdjacencyReport:
    """Certificates that code(h_i) differs from code(h_{i+1}) and
    code(h_{i+2}), for every i below the scanned range."""

    count: int
    ok: bool
    gaps_next: tuple[Dyadic, ...]
    gaps_skip: tuple[Dyadic, ...]
    inconclusive: tuple[tuple[int, int], ...]  # (i, offset 1 or 2)


def check_adjacent(
    n: int,
    eps,
    max_precision: int = DEFAULT_MAX_PRECISION,
) -> AdjacencyReport:
    """Certify the two neighbor inequalities for all i < n."""
    if n < 3:
        raise ValueError("check_adjacent needs n >= 3")
    eps_frac = _eps_fraction(eps)
    precision = min(max(START_PRECISION, _eps_bits(eps_frac) + 16), max_precision)
    while True:
        codes = codes_up_to(n + 2, precision)
        widest = max(e.width.as_fraction() for e in codes)
        if widest <= eps_frac or precision >= max_precision:
            break
        precision = min(precision * 2, max_precision)

    def certify(i: int, off: int) -> Dyadic:
        nonlocal codes, precision
        gap = codes[i].separation(codes[i + off])
        while gap == _ZERO and precision < max_precision:
            precision = min(precision * 2, max_precision)
            codes = codes_up_to(n + 2, precision)
            gap = codes[i].separation(codes[i + off])
        return gap

    gaps_next = []
    gaps_skip = []
    inconclusive = []
    for i in range(n):
        g1 = certify(i, 1)
        g2 = certify(i, 2)
        gaps_next.append(g1)
        gaps_skip.append(g2)
        if g1 == _ZERO:
            inconclusive.append((i, 1))
        if g2 == _ZERO:
            inconclusive.append((i, 2))
    return AdjacencyReport(
        count=n,
        ok=not inconclusive,
        gaps_next=tuple(gaps_next),
        gaps_skip=tuple(gaps_skip),
        inconclusive=tuple(inconclusive),
    )


@dataclass(frozen=True)
class DeltaGapResult:
    """Enclosure of code(h_{2^j}) - code(h_{2^j - 1}), plus the -1 check."""

    j: int
    enclosure: Enclosure
    excludes_minus_one: bool


DELTA_GAP_BUDGET = 20


def delta_gap(
    j: int,
    eps,
    max_precision: int = DEFAULT_MAX_PRECISION,
    budget: int = DELTA_GAP_BUDGET,
) -> DeltaGapResult:
    """Certified enclosure of the code jump at index 2^j."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j > budget:
        raise BudgetError(f"j={j} exceeds size budget {budget}")
    eps_frac = _eps_fraction(eps)
    half = eps_frac / 2
    singleton = hfset([ack_decode(j)])
    run = hfset(ack_decode(l) for l in range(j))
    enc = ra_code(singleton, half, max_precision) - ra_code(run, half, max_precision)
    excludes = not enc.contains(Fraction(-1))
    return DeltaGapResult(j=j, enclosure=enc, excludes_minus_one=excludes)


WITNESS_BUDGET = 8


def unbounded_witness(
    target: int,
    eps=Fraction(1, 1 << 24),
    max_precision: int = DEFAULT_MAX_PRECISION,
    budget: int = WITNESS_BUDGET,
) -> tuple[HFSet, Enclosure]:
    """A set whose code certifiably exceeds `target`.

    Construction: collect the singletons of the first 4*target + 1 sets;
    the odd-indexed members each contribute more than 1/2, giving a
    certified lower bound above the target.
    """
    if target < 1:
        raise ValueError("target must be at least 1")
    if target > budget:
        raise BudgetError(f"target {target} exceeds budget {budget}")
    k = 4 * target
    witness = hfset(hfset([ack_decode(kp)]) for kp in range(k + 1))
    enc = ra_code(witness, eps, max_precision)
    if not enc.lo > Dyadic.from_int(target):
        raise AssertionError(
            f"witness enclosure {enc} fails to certify code > {target}")
    return witness, enc
