from itertools import product

import pytest
from hypothesis import given, strategies as st

from oracles import TRUTH_TABLE
from qkdlab import pairswap
from qkdlab.errors import OddLength
from qkdlab.quantum import format_bits, parse_bits

even_bits = st.integers(1, 8).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=2 * n, max_size=2 * n))


@pytest.mark.parametrize("pair", list(TRUTH_TABLE))
def test_truth_table(pair):
    assert tuple(pairswap.pair_transform(pair)) == TRUTH_TABLE[pair]


def test_worked_example():
    assert format_bits(pairswap.apply(parse_bits("1100011010010011"))) == "1100100101100011"
    assert format_bits(pairswap.inverse(parse_bits("1100100101100011"))) == "1100011010010011"


def test_small_cases():
    assert pairswap.apply([]) == []
    assert pairswap.apply(parse_bits("0110")) == parse_bits("1001")
    assert pairswap.inverse(pairswap.apply(parse_bits("0110"))) == parse_bits("0110")
    assert pairswap.inverse([0, 0]) == [0, 0]


@pytest.mark.parametrize("n", [1, 3, 15])
def test_odd_length_rejected(n):
    with pytest.raises(OddLength):
        pairswap.apply([0] * n)
    with pytest.raises(OddLength):
        pairswap.inverse([0] * n)


@pytest.mark.parametrize("s", [list(b) for n in (2, 4) for b in product((0, 1), repeat=n)])
def test_involution_exhaustive(s):
    assert pairswap.apply(pairswap.apply(s)) == s


@given(even_bits)
def test_involution_random(s):
    assert pairswap.apply(pairswap.apply(s)) == s
    assert pairswap.inverse(pairswap.apply(s)) == s


@given(even_bits)
def test_pairwise_bit_conservation(s):
    out = pairswap.apply(s)
    for i in range(0, len(s), 2):
        assert sorted(out[i:i + 2]) == sorted(s[i:i + 2])
    assert sum(out) == sum(s)


@pytest.mark.parametrize("s", [list(b) for b in product((0, 1), repeat=4)])
def test_fixed_points_are_equal_pairs(s):
    equal_pairs = s[0] == s[1] and s[2] == s[3]
    assert (pairswap.apply(s) == s) == equal_pairs


@given(even_bits, st.data())
def test_locality(s, data):
    i = data.draw(st.integers(0, len(s) // 2 - 1))
    new_pair = data.draw(st.tuples(st.integers(0, 1), st.integers(0, 1)))
    t = list(s)
    t[2 * i: 2 * i + 2] = new_pair
    a, b = pairswap.apply(s), pairswap.apply(t)
    for j in range(len(s) // 2):
        if j != i:
            assert a[2 * j: 2 * j + 2] == b[2 * j: 2 * j + 2]
