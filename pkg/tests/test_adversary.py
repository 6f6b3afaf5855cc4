from itertools import product

import pytest

from qkdlab.adversary import EveState, Protocol, eve_knowledge, intercept_resend
from qkdlab.bb84 import Bb84Config, run_bb84
from qkdlab.double_bb84 import DoubleConfig, run_double
from qkdlab.errors import LengthMismatch, PositionOutOfRange
from qkdlab.quantum import Basis, RngStream, ScriptedStream, encode, measure

PLUS, CROSS = Basis.RECTILINEAR, Basis.DIAGONAL


class TestInterceptResend:
    @pytest.mark.parametrize("bit,basis", list(product((0, 1), Basis)))
    def test_matching_basis(self, bit, basis):
        eve = EveState()
        photon = encode(bit, basis)
        out = intercept_resend(photon, eve, ScriptedStream([int(basis is CROSS)]))
        assert out.polarization is encode(bit, basis).polarization
        assert photon.consumed
        assert eve.bases == [basis] and eve.bits == [bit]

    def test_wrong_basis_disturbs_half(self):
        eve = EveState()
        eve_rng = RngStream(21, "E", "S1")
        bob_rng = RngStream(21, "B", "S1")
        agree = trials = 0
        for i in range(40_000):
            # keep drawing until Eve picks the wrong basis for a rectilinear photon
            photon = encode(i % 2, PLUS)
            out = intercept_resend(photon, eve, eve_rng)
            if eve.bases[-1] is PLUS:
                continue
            trials += 1
            agree += measure(out, PLUS, bob_rng) == i % 2
            if trials == 10_000:
                break
        assert trials == 10_000
        assert abs(agree / trials - 0.5) <= 0.015

    def test_zero_probability_passes_through(self):
        eve = EveState(intercept_prob=0.0)
        photon = encode(1, CROSS)
        assert intercept_resend(photon, eve, ScriptedStream([])) is photon
        assert eve.bases == [None] and eve.bits == [None]
        assert eve.intercepted == 0

    def test_lockstep(self):
        eve = EveState(intercept_prob=0.5)
        rng = RngStream(1, "E", "S1")
        for i in range(200):
            intercept_resend(encode(i % 2, PLUS), eve, rng)
        assert len(eve.bases) == len(eve.bits) == 200
        assert all((b is None) == (x is None) for b, x in zip(eve.bases, eve.bits))
        assert 0 < eve.intercepted < 200

    def test_bad_probability(self):
        with pytest.raises(ValueError):
            EveState(intercept_prob=-0.1)


class TestEveKnowledge:
    def test_bb84_half_known(self):
        r = run_bb84(Bb84Config(2880, seed=12, eve=1.0))
        assert 0.47 <= r.eve_report.known_fraction <= 0.53

    def test_double_quarter_known(self):
        # one session has sigma ~0.023 here, so the window is checked on a 10-session mean
        fractions = []
        for seed in range(10):
            s1 = run_double(DoubleConfig(2880, seed=seed, eve=1.0)).eve_report.stages["S1"]
            fractions.append(s1["known_bits"] / s1["key_length"])
        assert 0.22 <= sum(fractions) / len(fractions) <= 0.28

    def test_no_interception_no_knowledge(self):
        r = run_bb84(Bb84Config(500, seed=2, eve=0.0))
        assert r.eve_report.known_bits == 0 and r.eve_report.known_fraction == 0.0

    def test_empty_key(self):
        r = run_bb84(Bb84Config(10, seed=2, eve=1.0))
        report = eve_knowledge(r.transcript, _eve_of(r), [], [], Protocol.BB84)
        assert report.key_length == 0 and report.known_fraction == 0.0

    def test_position_out_of_range(self):
        r = run_bb84(Bb84Config(10, seed=2, eve=1.0))
        with pytest.raises(PositionOutOfRange):
            eve_knowledge(r.transcript, _eve_of(r), [10], [0], Protocol.BB84)

    def test_length_mismatch(self):
        r = run_bb84(Bb84Config(10, seed=2, eve=1.0))
        with pytest.raises(LengthMismatch):
            eve_knowledge(r.transcript, _eve_of(r), [0, 1], [0], Protocol.BB84)

    def test_counts_against_brute_force(self):
        # recount by hand from the transcript: known iff Eve's basis equals Alice's
        r = run_double(DoubleConfig(400, seed=8, eve=1.0))
        alice = r.stage1.alice_bases
        eve_bases = {e.index: e.eve.basis for e in r.transcript.stage_events("S1")}
        pairs = [p // 2 for p in r.kept_positions[::2]]
        known_pairs = sum(
            eve_bases[2 * i] is alice[2 * i] and eve_bases[2 * i + 1] is alice[2 * i + 1]
            for i in pairs
        )
        assert r.eve_report.known_bits == 2 * known_pairs

    @pytest.mark.parametrize("seed", range(3))
    def test_monotone_in_intercept_probability(self, seed):
        fractions = []
        for p in (0.0, 0.5, 1.0):
            r = run_bb84(Bb84Config(6000, seed=seed, eve=p))
            fractions.append(r.eve_report.known_fraction)
        # expected 0, 0.25, 0.5; sigma < 0.01 at ~3000 sifted bits
        assert fractions[0] == 0.0
        assert fractions[1] + 0.03 < fractions[2]
        assert fractions[0] + 0.03 < fractions[1]


def _eve_of(result):
    eve = EveState()
    for e in result.transcript.stage_events("S1"):
        eve.bases.append(None if e.eve is None else e.eve.basis)
        eve.bits.append(None if e.eve is None else e.eve.bit)
    return eve
