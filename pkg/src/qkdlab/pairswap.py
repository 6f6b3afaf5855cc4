"""
The pair-swap logic circuit.

Consecutive non-overlapping bit pairs are left alone when equal and swapped
when unequal. The map is its own inverse.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

from .errors import OddLength
from .quantum import Bit, BitString


class BitPair(NamedTuple):
    a: Bit
    b: Bit


def pair_transform(p: BitPair | tuple[Bit, Bit]) -> BitPair:
    a, b = p
    return BitPair(a, b) if a == b else BitPair(b, a)


def pairs(s: Sequence[Bit]) -> list[BitPair]:
    if len(s) % 2:
        raise OddLength(f"expected an even number of bits, got {len(s)}")
    return [BitPair(s[i], s[i + 1]) for i in range(0, len(s), 2)]


def apply(s: Sequence[Bit]) -> BitString:
    out: BitString = []
    for p in pairs(s):
        out.extend(pair_transform(p))
    return out


def inverse(s: Sequence[Bit]) -> BitString:
    """Undo :func:`apply`. The circuit is an involution so this is the same map."""
    return apply(s)
