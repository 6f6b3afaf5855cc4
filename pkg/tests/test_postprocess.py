import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from oracles import gf2_matvec, toeplitz_matrix
from qkdlab.bb84 import Bb84Config, run_bb84
from qkdlab.errors import LengthMismatch
from qkdlab.postprocess import (
    ToeplitzSeed,
    bits_to_hex,
    estimate_qber,
    hex_to_bits,
    privacy_amplify,
    verify_keys,
)
from qkdlab.quantum import RngStream


class TestQber:
    def test_identical(self):
        est, a, b = estimate_qber([1, 0, 1, 1], [1, 0, 1, 1], 0.5, RngStream(0, "A", "QBER"))
        assert est.rate == 0.0 and est.sampled == 2
        assert a == b and len(a) == 2

    def test_complementary(self):
        est, a, b = estimate_qber([1, 0, 1], [0, 1, 0], 1.0, RngStream(0, "A", "QBER"))
        assert est.rate == 1.0 and a == [] and b == []

    def test_empty(self):
        est, _, _ = estimate_qber([], [], 0.5, RngStream(0, "A", "QBER"))
        assert est.sampled == 0 and est.rate == 0.0

    def test_removes_exactly_the_sample(self):
        key_a = list(range(100))  # distinct values so positions can be traced
        key_b = [v + 1000 for v in key_a]
        est, a, b = estimate_qber(key_a, key_b, 0.3, RngStream(2, "A", "QBER"))
        assert est.sampled == 30 == len(est.sacrificed_positions)
        assert set(a) == set(range(100)) - set(est.sacrificed_positions)
        assert b == [v + 1000 for v in a]

    def test_intercept_resend(self):
        r = run_bb84(Bb84Config(12_000, seed=3, eve=1.0))
        assert len(r.alice_key) >= 5000
        est, _, _ = estimate_qber(r.alice_key, r.bob_key, 0.2, RngStream(3, "A", "QBER"))
        assert 0.22 <= est.rate <= 0.28

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            estimate_qber([0], [0, 1], 0.5, RngStream(0, "A", "QBER"))
        with pytest.raises(ValueError):
            estimate_qber([0], [0], 0.0, RngStream(0, "A", "QBER"))


class TestToeplitz:
    def test_hand_example(self):
        seed = ToeplitzSeed((0, 1, 1, 0), 3, 2)
        assert seed.matrix() == [[1, 1, 0], [0, 1, 1]]
        assert privacy_amplify([1, 0, 1], seed) == [1, 1]

    def test_zero_key(self):
        seed = ToeplitzSeed.random(40, 10, RngStream(0, "A", "PA"))
        assert privacy_amplify([0] * 40, seed) == [0] * 10

    @given(st.data())
    def test_matches_matrix_product(self, data):
        n = data.draw(st.integers(1, 24))
        m = data.draw(st.integers(0, n))
        bits = data.draw(st.lists(st.integers(0, 1), min_size=max(n + m - 1, 0), max_size=max(n + m - 1, 0)))
        key = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
        expected = gf2_matvec(toeplitz_matrix(bits, n, m), key)
        out = privacy_amplify(key, ToeplitzSeed(bits, n, m))
        assert out == expected and len(out) == m

    def test_linearity(self):
        rng = random.Random(7)
        seed = ToeplitzSeed.random(64, 16, RngStream(7, "A", "PA"))
        for _ in range(1000):
            k1 = [rng.getrandbits(1) for _ in range(64)]
            k2 = [rng.getrandbits(1) for _ in range(64)]
            xor = [a ^ b for a, b in zip(k1, k2)]
            lhs = privacy_amplify(xor, seed)
            rhs = [a ^ b for a, b in zip(privacy_amplify(k1, seed), privacy_amplify(k2, seed))]
            assert lhs == rhs

    def test_universality_exhaustive(self):
        n, m = 4, 2
        seeds = [ToeplitzSeed(bits, n, m) for bits in product((0, 1), repeat=n + m - 1)]
        keys = [list(k) for k in product((0, 1), repeat=n)]
        hashes = {id(s): [tuple(privacy_amplify(k, s)) for k in keys] for s in seeds}
        worst = 0.0
        for i, j in product(range(len(keys)), repeat=2):
            if i == j:
                continue
            collisions = sum(hashes[id(s)][i] == hashes[id(s)][j] for s in seeds)
            worst = max(worst, collisions / len(seeds))
        assert worst <= 2 ** -m

    def test_seed_validation(self):
        with pytest.raises(LengthMismatch):
            ToeplitzSeed((0, 1), 3, 2)
        with pytest.raises(ValueError):
            ToeplitzSeed((0,) * 6, 3, 4)
        with pytest.raises(LengthMismatch):
            privacy_amplify([0, 1], ToeplitzSeed((0, 1, 1, 0), 3, 2))


class TestVerify:
    def test_equal_keys(self):
        key = [1, 0, 1, 1, 0, 0, 1, 0]
        assert verify_keys(key, key, ToeplitzSeed.random(8, 4, RngStream(0, "A", "PA")))

    def test_one_bit_difference_detected(self):
        key_a = [random.Random(3).getrandbits(1) for _ in range(128)]
        key_b = list(key_a)
        key_b[57] ^= 1
        detected = sum(
            not verify_keys(key_a, key_b, ToeplitzSeed.random(128, 32, RngStream(t, "A", "verify")))
            for t in range(1000)
        )
        assert detected >= 999

    def test_empty_hash(self):
        assert verify_keys([0, 1], [1, 0], ToeplitzSeed((0,), 2, 0))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            verify_keys([0], [0, 1], ToeplitzSeed((0, 1, 1, 0), 3, 2))


class TestHex:
    @pytest.mark.parametrize("bits", [[], [1], [1, 0, 1], [1, 1, 1, 1, 0, 0, 0, 0, 1]])
    def test_round_trip(self, bits):
        assert hex_to_bits(bits_to_hex(bits), len(bits)) == bits

    def test_msb_first(self):
        assert bits_to_hex([1, 0, 1, 0, 0, 1, 1]) == "a6"
        assert hex_to_bits("0xa6", 7) == [1, 0, 1, 0, 0, 1, 1]

    def test_too_short(self):
        with pytest.raises(LengthMismatch):
            hex_to_bits("f", 5)
