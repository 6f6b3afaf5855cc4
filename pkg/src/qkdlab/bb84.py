"""Standard BB84: prepare, transmit, measure, announce bases, sift."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from .adversary import Eavesdropper, EveState, Protocol, eve_knowledge
from .channels import ClassicalChannel, MessageKind, QuantumChannel, Transcript
from .errors import LengthMismatch
from .quantum import (
    Basis,
    BasisString,
    BitString,
    RngStream,
    encode,
    measure,
    random_bases,
    random_bits,
)
from .session import SessionResult, finish


@dataclass(frozen=True)
class Bb84Config:
    n_bits: int
    seed: int = 0
    eve: Optional[float] = None
    noise_flip_prob: float = 0.0
    sample_fraction: Optional[float] = None
    pa_out_len: Optional[int] = None

    def __post_init__(self):
        if self.n_bits < 1:
            raise ValueError("n_bits must be at least 1")
        if self.eve is not None and not 0.0 <= self.eve <= 1.0:
            raise ValueError("eve intercept probability must lie in [0, 1]")
        if not 0.0 <= self.noise_flip_prob <= 1.0:
            raise ValueError("noise_flip_prob must lie in [0, 1]")
        if self.sample_fraction is not None and not 0.0 < self.sample_fraction <= 1.0:
            raise ValueError("sample_fraction must lie in (0, 1]")
        if self.pa_out_len is not None and self.pa_out_len < 0:
            raise ValueError("pa_out_len must be non-negative")


def sift_positions(bases_a: Sequence[Basis], bases_b: Sequence[Basis]) -> list[int]:
    if len(bases_a) != len(bases_b):
        raise LengthMismatch(f"basis strings differ in length: {len(bases_a)} vs {len(bases_b)}")
    return [i for i, (a, b) in enumerate(zip(bases_a, bases_b)) if a is b]


def transmit(
    bits: Sequence[int],
    send_bases: Sequence[Basis],
    recv_bases: Sequence[Basis],
    channel: QuantumChannel,
    measure_rng: RngStream,
    noise_rng: Optional[RngStream],
    positions: Optional[Sequence[int]] = None,
) -> BitString:
    """Encode, push through ``channel`` and measure each bit; returns the receiver's results."""
    if positions is None:
        positions = range(len(bits))
    out = []
    for bit, sb, rb, pos in zip(bits, send_bases, recv_bases, positions):
        delivered = channel.send(encode(bit, sb), pos, noise_rng)
        out.append(measure(delivered, rb, measure_rng))
    return out


def run_bb84(
    config: Bb84Config,
    *,
    alice_bits: Optional[BitString] = None,
    alice_bases: Optional[BasisString] = None,
    bob_bases: Optional[BasisString] = None,
) -> SessionResult:
    """
    Run one BB84 session. Any of Alice's bits, her bases or Bob's bases may be
    injected instead of drawn; everything else comes from streams derived
    from ``config.seed``.
    """
    n, seed = config.n_bits, config.seed
    transcript = Transcript({"protocol": Protocol.BB84.value, **asdict(config)})

    if alice_bits is None:
        alice_bits = random_bits(n, RngStream(seed, "A", "S1/bits"))
    if alice_bases is None:
        alice_bases = random_bases(n, RngStream(seed, "A", "S1/bases"))
    if bob_bases is None:
        bob_bases = random_bases(n, RngStream(seed, "B", "S1/bases"))
    if not len(alice_bits) == len(alice_bases) == len(bob_bases) == n:
        raise LengthMismatch("injected sequences must all have n_bits entries")

    eve = None
    tap = None
    if config.eve is not None:
        eve = EveState(intercept_prob=config.eve)
        tap = Eavesdropper(eve, RngStream(seed, "E", "S1"))
    quantum = QuantumChannel(transcript, tap=tap, noise_flip_prob=config.noise_flip_prob)
    classical = ClassicalChannel(transcript)

    bob_measured = transmit(
        alice_bits, alice_bases, bob_bases, quantum,
        RngStream(seed, "B", "S1/measure"), RngStream(seed, "N", "S1"),
    )

    classical.send("B", MessageKind.BASIS_ANNOUNCE, bob_bases)
    classical.send("A", MessageKind.BASIS_ANNOUNCE, alice_bases)
    kept = sift_positions(alice_bases, bob_bases)
    classical.send("A", MessageKind.PAIR_KEEP_LIST, kept)

    alice_key = [alice_bits[i] for i in kept]
    result = SessionResult(
        alice_key=alice_key,
        bob_key=[bob_measured[i] for i in kept],
        kept_positions=kept,
        raw_length=n,
        transcript=transcript,
        stage1_key_bits=len(kept),
    )
    if eve is not None:
        result.eve_report = eve_knowledge(transcript, eve, kept, alice_key, Protocol.BB84)
    return finish(result, classical, seed, config.sample_fraction, config.pa_out_len)
