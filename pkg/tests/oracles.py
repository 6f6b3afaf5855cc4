"""
Brute-force reference models used by the tests.

Nothing here imports simulator internals beyond plain data types, so a bug
in the package cannot leak into the expected values.
"""

from fractions import Fraction
from itertools import product

# Circuit truth table, written out row by row.
TRUTH_TABLE = {(0, 0): (0, 0), (0, 1): (1, 0), (1, 0): (0, 1), (1, 1): (1, 1)}
UNSWAP = {out: inp for inp, out in TRUTH_TABLE.items()}

BASES = ("+", "X")


def pair_branches():
    """
    Enumerate every single-pair session.

    Yields dicts describing one branch: Alice's bits and bases, Bob's stage-1
    and stage-2 bases, the cross-basis coin outcomes consumed by Bob in stage 1
    and by Alice in stage 2, the branch probability, and the expected outcome.
    """
    for bits, a_bases, b1_bases, b2_bases in product(
        product((0, 1), repeat=2), product(BASES, repeat=2),
        product(BASES, repeat=2), product(BASES, repeat=2),
    ):
        wire = TRUTH_TABLE[bits]
        cross1 = [i for i in range(2) if a_bases[i] != b1_bases[i]]
        for coins1 in product((0, 1), repeat=len(cross1)):
            bob = list(wire)
            for i, c in zip(cross1, coins1):
                bob[i] = c
            bob = tuple(bob)
            kept = not cross1
            base = dict(
                bits=bits, alice_bases=a_bases, bob1_bases=b1_bases, bob2_bases=b2_bases,
                coins1=coins1, wire=wire, bob_measured=bob, kept=kept,
            )
            if kept:
                # the return leg never runs; stage-2 bases are irrelevant
                yield dict(
                    base, coins2=(), alice_measured=None, candidate=False, confirmed=False,
                    key_a=bits, key_b=UNSWAP[bob], added_a=(), added_b=(),
                    prob=Fraction(1, 4 ** 4) / 2 ** len(cross1),
                )
                continue
            cross2 = [i for i in range(2) if b2_bases[i] != a_bases[i]]
            for coins2 in product((0, 1), repeat=len(cross2)):
                alice = list(bob)
                for i, c in zip(cross2, coins2):
                    alice[i] = c
                alice = tuple(alice)
                candidate = not cross2
                confirmed = candidate and alice == wire
                yield dict(
                    base, coins2=coins2, alice_measured=alice, candidate=candidate,
                    confirmed=confirmed, key_a=(), key_b=(),
                    added_a=bits if confirmed else (),
                    added_b=UNSWAP[bob] if confirmed else (),
                    prob=Fraction(1, 4 ** 4) / 2 ** (len(cross1) + len(cross2)),
                )


def stage2_add_rate() -> Fraction:
    """Exact probability that one pair is added by the return leg (honest channel)."""
    return sum((b["prob"] for b in pair_branches() if b["confirmed"]), Fraction(0))


def pair_keep_rate() -> Fraction:
    return sum((b["prob"] for b in pair_branches() if b["kept"]), Fraction(0))


def intercept_resend_error_rate() -> Fraction:
    """
    Probability that Bob's sifted bit differs from Alice's under full
    intercept-resend. Enumerates Alice's bit and basis, Eve's basis and both
    possible coin flips; Bob's basis equals Alice's because only sifted
    positions count.
    """
    errors = Fraction(0)
    for bit, alice_b, eve_b, eve_coin, bob_coin in product((0, 1), BASES, BASES, (0, 1), (0, 1)):
        p = Fraction(1, 2 ** 5)
        eve_bit = bit if eve_b == alice_b else eve_coin
        # resent state is (eve_bit, eve_b); Bob reads in alice_b
        bob_bit = eve_bit if eve_b == alice_b else bob_coin
        if bob_bit != bit:
            errors += p
    return errors


def toeplitz_matrix(seed_bits, in_len, out_len):
    return [[seed_bits[j + in_len - 1 - k] for k in range(in_len)] for j in range(out_len)]


def gf2_matvec(matrix, vec):
    return [sum(m * v for m, v in zip(row, vec)) % 2 for row in matrix]
