import random

import pytest
from hypothesis import given, strategies as st

from hfreal import (
    EMPTY,
    BitBudgetError,
    ParseError,
    ack_compare,
    ack_decode,
    ack_encode,
    hfset,
    iterated_singleton,
    low,
    parse_braces,
    rank,
    successor_set,
)
from oracles import hfset_to_frozenset, naive_decode, naive_encode

H1 = hfset([EMPTY])
H3 = hfset([H1, EMPTY])


def test_encode_enumeration_start():
    assert ack_encode(EMPTY) == 0
    assert ack_encode(H1) == 1
    assert ack_encode(H3) == 3
    assert ack_encode(iterated_singleton(3)) == 4


def test_decode_examples():
    assert ack_decode(0) is EMPTY
    assert ack_decode(2**4 - 1).children == tuple(ack_decode(j) for j in range(4))
    assert ack_decode(5) is hfset([EMPTY, ack_decode(2)])


def test_interning_gives_identity_equality():
    assert hfset([EMPTY, EMPTY]) is H1
    assert parse_braces("{{},{{}}}") is parse_braces("{ {{}} , {} }")
    assert ack_decode(37) is ack_decode(37)


def test_compare_examples():
    assert ack_compare(EMPTY, H1) == -1
    assert ack_compare(H3, ack_decode(4)) == -1
    assert ack_compare(ack_decode(6), ack_decode(5)) == 1
    assert ack_compare(H3, H3) == 0


@given(st.integers(min_value=0, max_value=4095),
       st.integers(min_value=0, max_value=4095))
def test_compare_agrees_with_integer_order(i, j):
    got = ack_compare(ack_decode(i), ack_decode(j))
    assert got == (i > j) - (i < j)


@given(st.integers(min_value=0, max_value=4095))
def test_round_trip_against_naive_codec(i):
    h = ack_decode(i)
    assert ack_encode(h) == i
    assert naive_encode(hfset_to_frozenset(h)) == i
    assert hfset_to_frozenset(h) == naive_decode(i)


@given(st.integers(min_value=0, max_value=4095),
       st.integers(min_value=0, max_value=19))
def test_membership_matches_bits(i, j):
    assert (ack_decode(j) in ack_decode(i)) == bool(i >> j & 1)


@given(st.integers(min_value=0, max_value=4095))
def test_parity_law(i):
    assert (EMPTY in ack_decode(i)) == bool(i & 1)


def test_low_examples():
    assert low(0) == 0
    assert low(1) == 1
    assert low(3) == 2
    assert low(0b10111) == 3


@given(st.integers(min_value=0, max_value=4095))
def test_low_properties(i):
    t = low(i)
    h = ack_decode(i)
    assert (t == 0) == (i % 2 == 0)
    assert ack_decode(t) not in h
    for j in range(t):
        assert ack_decode(j) in h


def test_successor_examples():
    assert successor_set(EMPTY) is H1
    assert successor_set(H3) is ack_decode(4)
    assert successor_set(ack_decode(5)) is ack_decode(6)


def test_successor_chain():
    node = EMPTY
    for i in range(512):
        node = successor_set(node)
        assert node is ack_decode(i + 1)


def test_rank_examples():
    assert rank(EMPTY) == 0
    assert rank(iterated_singleton(3)) == 3
    assert rank(H3) == 2


def test_iterated_singleton():
    assert iterated_singleton(0) is EMPTY
    assert iterated_singleton(1) is H1
    assert iterated_singleton(3).to_braces() == "{{{{}}}}"
    with pytest.raises(ValueError):
        iterated_singleton(-1)


def test_braces_round_trip_is_canonical():
    rng = random.Random(7)
    for _ in range(300):
        i = rng.randrange(1 << 16)
        h = ack_decode(i)
        assert parse_braces(h.to_braces()) is h


def test_parse_errors():
    for bad in ("", "{", "{}}", "{,}", "{{}", "x", "{} {}", "{{},}"):
        with pytest.raises(ParseError):
            parse_braces(bad)


def test_encode_bit_budget():
    # rank-7 singleton tower would need 2**65536 bits
    with pytest.raises(BitBudgetError):
        ack_encode(iterated_singleton(7))
    # and a tight budget rejects even small codes
    with pytest.raises(BitBudgetError):
        ack_encode(H3, bit_budget=1)
    assert ack_encode(iterated_singleton(6)).bit_length() == 65537


def test_decode_bit_budget():
    with pytest.raises(BitBudgetError):
        ack_decode(1 << 40, bit_budget=32)
    with pytest.raises(ValueError):
        ack_decode(-3)


def test_children_sorted_ascending():
    h = ack_decode(0b101101)
    codes = [ack_encode(c) for c in h.children]
    assert codes == sorted(codes) == [0, 2, 3, 5]
