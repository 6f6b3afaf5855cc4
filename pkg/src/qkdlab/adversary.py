"""
Intercept-resend eavesdropper and accounting of what she learns.

Eve measures each tapped photon in a uniformly random basis and re-emits her
result in that basis. A key position counts as known to her only when her
basis matched Alice's there, since only then is her bit certainly right.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .channels import EveAction, MessageKind, Transcript
from .errors import LengthMismatch, PositionOutOfRange
from .quantum import Basis, Photon, RngStream, encode, measure


class Protocol(str, Enum):
    BB84 = "bb84"
    DOUBLE = "double"


@dataclass
class EveState:
    """One entry per photon offered to the tap; ``None`` marks a skipped photon."""

    intercept_prob: float = 1.0
    bases: list[Optional[Basis]] = field(default_factory=list)
    bits: list[Optional[int]] = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.intercept_prob <= 1.0:
            raise ValueError("intercept_prob must lie in [0, 1]")

    @property
    def intercepted(self) -> int:
        return sum(b is not None for b in self.bases)


def intercept_resend(photon: Photon, eve: EveState, rng: RngStream) -> Photon:
    # Draws: one uniform for the intercept decision (only when 0 < p < 1),
    # one bit for the basis, and one bit if her basis differs from the photon's.
    p = eve.intercept_prob
    if p <= 0.0 or (p < 1.0 and rng.random() >= p):
        eve.bases.append(None)
        eve.bits.append(None)
        return photon
    basis = Basis.DIAGONAL if rng.bit() else Basis.RECTILINEAR
    bit = measure(photon, basis, rng)
    eve.bases.append(basis)
    eve.bits.append(bit)
    return encode(bit, basis)


class Eavesdropper:
    """Callable channel tap wrapping an :class:`EveState` and its private stream."""

    def __init__(self, state: EveState, rng: RngStream):
        self.state = state
        self.rng = rng

    def __call__(self, photon: Photon) -> tuple[Photon, Optional[EveAction]]:
        out = intercept_resend(photon, self.state, self.rng)
        basis, bit = self.state.bases[-1], self.state.bits[-1]
        return out, (None if basis is None else EveAction(basis, bit))


@dataclass
class EveKnowledgeReport:
    key_length: int
    known_bits: int
    stages: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def known_fraction(self) -> float:
        return self.known_bits / self.key_length if self.key_length else 0.0

    def to_dict(self) -> dict:
        return {
            "key_length": self.key_length,
            "known_bits": self.known_bits,
            "known_fraction": self.known_fraction,
            "stages": self.stages,
        }


def _alice_bases(transcript: Transcript) -> list[Basis]:
    msgs = transcript.messages(MessageKind.BASIS_ANNOUNCE, sender="A", stage="S1")
    if not msgs:
        raise ValueError("transcript has no stage-1 basis announcement from Alice")
    return list(msgs[0].payload)


def eve_knowledge(
    transcript: Transcript,
    eve: EveState,
    final_positions: Sequence[int],
    final_key: Sequence[int],
    protocol: Protocol | str,
    position_stages: Optional[Iterable[str]] = None,
) -> EveKnowledgeReport:
    """
    Count the final-key positions Eve knows with certainty.

    Eve's basis choices are read back from the transcript's quantum events, so
    interceptions in any stage count. ``eve`` must be the stage-1 state and is
    used to cross-check the transcript. For ``DOUBLE`` a position is known only
    when Eve knows both positions of its pair, because she needs the whole
    pair to undo the public swap circuit. ``position_stages`` labels each final
    position with the stage that produced it, for the per-stage breakdown.
    """
    protocol = Protocol(protocol)
    if len(final_positions) != len(final_key):
        raise LengthMismatch("final_positions and final_key differ in length")
    alice = _alice_bases(transcript)
    raw_length = len(alice)
    for pos in final_positions:
        if not 0 <= pos < raw_length:
            raise PositionOutOfRange(f"position {pos} outside raw length {raw_length}")

    s1_events = transcript.stage_events("S1")
    tapped = sum(e.eve is not None for e in s1_events)
    if tapped != eve.intercepted:
        raise ValueError("Eve state does not match the stage-1 transcript")

    known_at = [False] * raw_length
    for e in transcript.quantum_events:
        if e.eve is not None and e.eve.basis is alice[e.index]:
            known_at[e.index] = True

    if protocol is Protocol.DOUBLE:
        known = [known_at[p] and known_at[p ^ 1] for p in final_positions]
    else:
        known = [known_at[p] for p in final_positions]

    labels = list(position_stages) if position_stages is not None else ["S1"] * len(known)
    if len(labels) != len(known):
        raise LengthMismatch("position_stages must label every final position")
    stages: dict[str, dict[str, int]] = {}
    for label, k in zip(labels, known):
        row = stages.setdefault(label, {"key_length": 0, "known_bits": 0})
        row["key_length"] += 1
        row["known_bits"] += int(k)
    return EveKnowledgeReport(len(final_key), sum(known), stages)
