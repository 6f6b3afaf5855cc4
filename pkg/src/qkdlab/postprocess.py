"""
Key post-processing: QBER estimation by public sacrifice, key verification,
and privacy amplification with Toeplitz hashing over GF(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import LengthMismatch
from .quantum import BitString, RngStream, is_bit


@dataclass
class QberEstimate:
    sampled: int
    disagreements: int
    sacrificed_positions: list[int] = field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.disagreements / self.sampled if self.sampled else 0.0


@dataclass(frozen=True)
class ToeplitzSeed:
    """
    Seed of an ``out_len x in_len`` Toeplitz matrix.

    Entry ``(j, k)`` of the matrix is ``bits[j + in_len - 1 - k]``, so row ``j``
    reads the seed from index ``j + in_len - 1`` down to ``j``.
    """

    bits: tuple
    in_len: int
    out_len: int

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(self.bits))
        if self.out_len < 0 or self.in_len < 0:
            raise ValueError("lengths must be non-negative")
        if self.out_len > self.in_len:
            raise ValueError("out_len must not exceed in_len")
        want = max(self.in_len + self.out_len - 1, 0)
        if len(self.bits) != want:
            raise LengthMismatch(f"seed needs {want} bits, got {len(self.bits)}")
        if not all(is_bit(b) for b in self.bits):
            raise ValueError("seed bits must be 0 or 1")

    @classmethod
    def random(cls, in_len: int, out_len: int, rng: RngStream) -> "ToeplitzSeed":
        n = max(in_len + out_len - 1, 0)
        return cls(tuple(rng.bit() for _ in range(n)), in_len, out_len)

    def matrix(self) -> list[list[int]]:
        n = self.in_len
        return [[self.bits[j + n - 1 - k] for k in range(n)] for j in range(self.out_len)]


def estimate_qber(
    key_a: Sequence[int], key_b: Sequence[int], sample_fraction: float, rng: RngStream
) -> tuple[QberEstimate, BitString, BitString]:
    """Publicly compare a random ``ceil(fraction * len)`` subset and drop it from both keys."""
    if len(key_a) != len(key_b):
        raise LengthMismatch(f"keys differ in length: {len(key_a)} vs {len(key_b)}")
    if not 0.0 < sample_fraction <= 1.0:
        raise ValueError("sample_fraction must lie in (0, 1]")
    n = len(key_a)
    k = min(n, math.ceil(sample_fraction * n))
    picked = sorted(rng.sample(range(n), k))
    disagreements = sum(key_a[i] != key_b[i] for i in picked)
    drop = set(picked)
    trimmed_a = [b for i, b in enumerate(key_a) if i not in drop]
    trimmed_b = [b for i, b in enumerate(key_b) if i not in drop]
    return QberEstimate(k, disagreements, picked), trimmed_a, trimmed_b


def _to_int(bits: Sequence[int]) -> int:
    # bit i of the result is bits[i]
    value = 0
    for i, b in enumerate(bits):
        if b:
            value |= 1 << i
    return value


def privacy_amplify(key: Sequence[int], seed: ToeplitzSeed) -> BitString:
    if len(key) != seed.in_len:
        raise LengthMismatch(f"key has {len(key)} bits, seed expects {seed.in_len}")
    n = seed.in_len
    # Row j dotted with key equals sum_m seed[j + m] * key[n - 1 - m].
    key_rev = _to_int(key[::-1])
    s = _to_int(seed.bits)
    mask = (1 << n) - 1
    return [bin((s >> j) & mask & key_rev).count("1") & 1 for j in range(seed.out_len)]


def verify_keys(key_a: Sequence[int], key_b: Sequence[int], seed: ToeplitzSeed) -> bool:
    if len(key_a) != len(key_b):
        raise LengthMismatch("keys differ in length")
    return privacy_amplify(key_a, seed) == privacy_amplify(key_b, seed)


def bits_to_hex(bits: Sequence[int]) -> str:
    """MSB-first hex; the tail is zero-padded to a whole nibble, so carry the length separately."""
    if not bits:
        return ""
    padded = list(bits) + [0] * (-len(bits) % 4)
    return "".join(
        "%x" % (padded[i] << 3 | padded[i + 1] << 2 | padded[i + 2] << 1 | padded[i + 3])
        for i in range(0, len(padded), 4)
    )


def hex_to_bits(text: str, n_bits: int) -> BitString:
    text = text.strip().lower().removeprefix("0x")
    bits: BitString = []
    for ch in text:
        v = int(ch, 16)
        bits.extend((v >> s) & 1 for s in (3, 2, 1, 0))
    if n_bits > len(bits):
        raise LengthMismatch(f"{len(text)} hex digits cannot hold {n_bits} bits")
    return bits[:n_bits]
