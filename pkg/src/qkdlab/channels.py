"""
Quantum and classical channels sharing one append-only transcript.

Transcript wire format is JSON lines, one record per event, in the order the
events happened::

    {"t":"meta","seed":7,"protocol":"bb84","labels":{...}}
    {"t":"q","i":0,"sent":"V90","eve":{"basis":"X","bit":1},"delivered":"D45","stage":"S1"}
    {"t":"c","from":"B","kind":"BASIS_ANNOUNCE","payload":["+","X"],"stage":"S1"}

``eve`` is ``null`` when no tap is installed or the tap let the photon pass.
Bits are emitted as integers, bases as ``"+"``/``"X"``, indices as integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Optional, Union

from .errors import MalformedMessage
from .quantum import Basis, Photon, Polarization, RngStream, encode, is_bit


class MessageKind(str, Enum):
    BASIS_ANNOUNCE = "BASIS_ANNOUNCE"
    PAIR_KEEP_LIST = "PAIR_KEEP_LIST"
    STAGE2_BASIS_ANNOUNCE = "STAGE2_BASIS_ANNOUNCE"
    STAGE2_KEEP_CONFIRM = "STAGE2_KEEP_CONFIRM"
    QBER_SAMPLE_INDICES = "QBER_SAMPLE_INDICES"
    QBER_SAMPLE_BITS = "QBER_SAMPLE_BITS"
    PA_SEED = "PA_SEED"
    KEY_HASH = "KEY_HASH"


BASIS_KINDS = {MessageKind.BASIS_ANNOUNCE, MessageKind.STAGE2_BASIS_ANNOUNCE}
INDEX_KINDS = {
    MessageKind.PAIR_KEEP_LIST,
    MessageKind.STAGE2_KEEP_CONFIRM,
    MessageKind.QBER_SAMPLE_INDICES,
}
BIT_KINDS = {MessageKind.QBER_SAMPLE_BITS, MessageKind.PA_SEED, MessageKind.KEY_HASH}

PARTIES = ("A", "B")


@dataclass(frozen=True)
class EveAction:
    basis: Basis
    bit: int


@dataclass(frozen=True)
class QuantumEvent:
    index: int
    sent: Polarization
    eve: Optional[EveAction]
    delivered: Polarization
    stage: str = "S1"

    def to_json(self) -> dict:
        eve = None if self.eve is None else {"basis": self.eve.basis.symbol, "bit": self.eve.bit}
        return {
            "t": "q",
            "i": self.index,
            "sent": self.sent.name,
            "eve": eve,
            "delivered": self.delivered.name,
            "stage": self.stage,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QuantumEvent":
        eve = obj["eve"]
        if eve is not None:
            eve = EveAction(Basis.from_symbol(eve["basis"]), int(eve["bit"]))
        return cls(
            index=int(obj["i"]),
            sent=Polarization[obj["sent"]],
            eve=eve,
            delivered=Polarization[obj["delivered"]],
            stage=obj.get("stage", "S1"),
        )


@dataclass(frozen=True)
class ClassicalMessage:
    sender: str
    kind: MessageKind
    payload: tuple
    stage: str = "S1"

    def __post_init__(self):
        object.__setattr__(self, "kind", MessageKind(self.kind))
        object.__setattr__(self, "payload", tuple(self.payload))

    def to_json(self) -> dict:
        if self.kind in BASIS_KINDS:
            payload = [b.symbol for b in self.payload]
        else:
            payload = list(self.payload)
        return {
            "t": "c",
            "from": self.sender,
            "kind": self.kind.value,
            "payload": payload,
            "stage": self.stage,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ClassicalMessage":
        kind = MessageKind(obj["kind"])
        payload = obj["payload"]
        if kind in BASIS_KINDS:
            payload = [Basis.from_symbol(s) for s in payload]
        msg = cls(obj["from"], kind, payload, obj.get("stage", "S1"))
        validate_message(msg)
        return msg


def validate_message(msg: ClassicalMessage) -> None:
    if msg.sender not in PARTIES:
        raise MalformedMessage(f"unknown sender {msg.sender!r}")
    if msg.kind in BASIS_KINDS:
        ok = all(isinstance(x, Basis) for x in msg.payload)
    elif msg.kind in INDEX_KINDS:
        ok = all(type(x) is int and x >= 0 for x in msg.payload)
        ok = ok and len(set(msg.payload)) == len(msg.payload)
    else:
        ok = all(is_bit(x) for x in msg.payload)
    if not ok:
        raise MalformedMessage(f"{msg.kind.value} payload has the wrong shape: {msg.payload!r}")


Entry = Union[QuantumEvent, ClassicalMessage]


@dataclass
class Transcript:
    """Every quantum event and classical message of a session, in order."""

    seed_metadata: dict = field(default_factory=dict)
    entries: list[Entry] = field(default_factory=list)

    @property
    def quantum_events(self) -> list[QuantumEvent]:
        return [e for e in self.entries if isinstance(e, QuantumEvent)]

    @property
    def classical_messages(self) -> list[ClassicalMessage]:
        return [e for e in self.entries if isinstance(e, ClassicalMessage)]

    def messages(self, kind: MessageKind, sender: Optional[str] = None,
                 stage: Optional[str] = None) -> list[ClassicalMessage]:
        return [
            m for m in self.classical_messages
            if m.kind is kind
            and (sender is None or m.sender == sender)
            and (stage is None or m.stage == stage)
        ]

    def stage_events(self, stage: str) -> list[QuantumEvent]:
        return [e for e in self.quantum_events if e.stage == stage]

    def to_jsonl(self) -> str:
        lines = [json.dumps({"t": "meta", **self.seed_metadata}, separators=(",", ":"))]
        for e in self.entries:
            lines.append(json.dumps(e.to_json(), separators=(",", ":")))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        t = cls()
        for n, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                kind = obj["t"]
                if kind == "meta":
                    t.seed_metadata = {k: v for k, v in obj.items() if k != "t"}
                elif kind == "q":
                    t.entries.append(QuantumEvent.from_json(obj))
                elif kind == "c":
                    t.entries.append(ClassicalMessage.from_json(obj))
                else:
                    raise ValueError(f"unknown record type {kind!r}")
            except (KeyError, ValueError, TypeError) as exc:
                raise MalformedMessage(f"line {n}: {exc}") from exc
        return t


# A tap sees each photon before delivery and returns the photon to forward
# plus what it did (None for pass-through).
Tap = Callable[[Photon], "tuple[Photon, Optional[EveAction]]"]


@dataclass
class QuantumChannel:
    transcript: Transcript
    tap: Optional[Tap] = None
    noise_flip_prob: float = 0.0
    stage: str = "S1"

    def __post_init__(self):
        if not 0.0 <= self.noise_flip_prob <= 1.0:
            raise ValueError("noise_flip_prob must lie in [0, 1]")

    @property
    def events(self) -> list[QuantumEvent]:
        return self.transcript.stage_events(self.stage)

    def send(self, photon: Photon, index: int, rng: Optional[RngStream] = None) -> Photon:
        """Carry one photon across; ``rng`` drives the noise flip and is required when noisy."""
        sent = photon.polarization
        action = None
        if self.tap is not None:
            photon, action = self.tap(photon)
        if self.noise_flip_prob > 0.0:
            if rng is None:
                raise ValueError("a noisy channel needs an rng stream")
            if rng.random() < self.noise_flip_prob:
                p = photon.polarization
                photon.consumed = True
                photon = encode(1 - p.bit, p.basis)
        self.transcript.entries.append(
            QuantumEvent(index, sent, action, photon.polarization, self.stage)
        )
        return photon


def q_send(ch: QuantumChannel, photon: Photon, rng: Optional[RngStream] = None,
           index: Optional[int] = None) -> Photon:
    if index is None:
        index = len(ch.events)
    return ch.send(photon, index, rng)


@dataclass
class ClassicalChannel:
    """Authenticated broadcast: messages arrive intact, in order, and everyone can read them."""

    transcript: Transcript

    @property
    def messages(self) -> list[ClassicalMessage]:
        return self.transcript.classical_messages

    def send(self, sender: str, kind: MessageKind, payload: Iterable[Any],
             stage: str = "S1") -> ClassicalMessage:
        msg = ClassicalMessage(sender, kind, tuple(payload), stage)
        c_send(self, msg)
        return msg


def c_send(ch: ClassicalChannel, msg: ClassicalMessage) -> None:
    validate_message(msg)
    if msg.kind in BASIS_KINDS:
        expected = len(ch.transcript.stage_events(msg.stage))
        if len(msg.payload) != expected:
            raise MalformedMessage(
                f"{msg.kind.value} carries {len(msg.payload)} bases but stage "
                f"{msg.stage} transmitted {expected} photons"
            )
    ch.transcript.entries.append(msg)
