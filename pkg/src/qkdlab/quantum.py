"""
Single-photon polarization encoding and basis-dependent measurement.

Measurement in the preparation basis returns the encoded bit; measurement
in the conjugate basis returns a fair coin drawn from the caller's stream.
A photon collapses on measurement and cannot be read twice.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import MeasuringConsumedPhoton

Bit = int
BitString = list[int]


class Basis(Enum):
    RECTILINEAR = "+"
    DIAGONAL = "X"

    @property
    def symbol(self) -> str:
        return self.value

    @classmethod
    def from_symbol(cls, symbol: str) -> "Basis":
        try:
            return _SYMBOLS[symbol.upper()]
        except (KeyError, AttributeError):
            raise ValueError(f"unknown basis symbol {symbol!r}") from None

    def __repr__(self) -> str:
        return f"Basis({self.value})"


_SYMBOLS = {"+": Basis.RECTILINEAR, "X": Basis.DIAGONAL}

BasisString = list[Basis]


class Polarization(Enum):
    H0 = (Basis.RECTILINEAR, 0)
    V90 = (Basis.RECTILINEAR, 1)
    D45 = (Basis.DIAGONAL, 1)
    D135 = (Basis.DIAGONAL, 0)

    @property
    def basis(self) -> Basis:
        return self.value[0]

    @property
    def bit(self) -> Bit:
        return self.value[1]

    @property
    def angle(self) -> int:
        return int(self.name.lstrip("HVD"))


_ENCODING = {p.value: p for p in Polarization}


@dataclass
class Photon:
    """A single polarized carrier. ``consumed`` flips on first measurement."""

    polarization: Polarization
    consumed: bool = False


class RngStream:
    """
    Deterministic bit stream keyed by ``(seed, party, stage)``.

    The triple is hashed into the seed of a private ``random.Random`` so that
    streams with different labels are independent and adding a party to a
    run never shifts another party's draws.
    """

    def __init__(self, seed: int, party: str, stage: str):
        self.seed = seed
        self.party = party
        self.stage = stage
        digest = hashlib.sha256(f"{seed}|{party}|{stage}".encode()).digest()
        self._rng = random.Random(int.from_bytes(digest[:16], "big"))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, party={self.party!r}, stage={self.stage!r})"

    def bit(self) -> Bit:
        return self._rng.getrandbits(1)

    def random(self) -> float:
        return self._rng.random()

    def sample(self, population: Sequence[int], k: int) -> list[int]:
        return self._rng.sample(list(population), k)


class ScriptedStream(RngStream):
    """
    Stream that replays a fixed list of bits, for injecting known outcomes.

    Raises ``IndexError`` when a draw is requested past the end of the script,
    which makes an unexpected extra draw visible in tests.
    """

    def __init__(self, bits: Iterable[int], label: str = "scripted"):
        self.seed = None
        self.party = label
        self.stage = label
        self._bits = list(bits)
        self._pos = 0

    def __repr__(self) -> str:
        return f"ScriptedStream({self._bits!r}, at={self._pos})"

    @property
    def remaining(self) -> int:
        return len(self._bits) - self._pos

    def bit(self) -> Bit:
        if self._pos >= len(self._bits):
            raise IndexError("scripted stream exhausted")
        b = self._bits[self._pos]
        self._pos += 1
        return b

    def random(self) -> float:
        raise TypeError("scripted streams only provide bits")

    def sample(self, population, k):
        raise TypeError("scripted streams only provide bits")


def encode(bit: Bit, basis: Basis) -> Photon:
    return Photon(_ENCODING[(basis, bit)])


def measure(photon: Photon, basis: Basis, rng: RngStream) -> Bit:
    """Collapse ``photon`` in ``basis``; one draw from ``rng`` iff the bases differ."""
    if photon.consumed:
        raise MeasuringConsumedPhoton(f"photon {photon.polarization.name} already measured")
    photon.consumed = True
    if photon.polarization.basis is basis:
        return photon.polarization.bit
    return rng.bit()


def random_bits(n: int, rng: RngStream) -> BitString:
    if n < 0:
        raise ValueError("n must be non-negative")
    return [rng.bit() for _ in range(n)]


def random_bases(n: int, rng: RngStream) -> BasisString:
    if n < 0:
        raise ValueError("n must be non-negative")
    return [Basis.DIAGONAL if rng.bit() else Basis.RECTILINEAR for _ in range(n)]


def parse_bits(text: str) -> BitString:
    """``"1100 0110"`` -> ``[1, 1, 0, 0, 0, 1, 1, 0]``; whitespace is ignored."""
    out = []
    for ch in text:
        if ch.isspace():
            continue
        if ch not in "01":
            raise ValueError(f"not a bit: {ch!r}")
        out.append(int(ch))
    return out


def format_bits(bits: Iterable[int]) -> str:
    return "".join(str(b) for b in bits)


def parse_bases(text: str) -> BasisString:
    return [Basis.from_symbol(ch) for ch in text if not ch.isspace()]


def format_bases(bases: Iterable[Basis]) -> str:
    return "".join(b.symbol for b in bases)


def is_bit(value) -> bool:
    return type(value) is int and value in (0, 1)
