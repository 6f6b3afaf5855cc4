"""
Two-stage BB84 over pair-swapped bits.

Stage 1 sends Alice's bits through the pair-swap circuit and then over a
BB84 link; a pair survives sifting only if the bases agree at both of its
positions. Stage 2 lets Bob resend his stage-1 readings for the discarded
pairs back to Alice, who measures them in her original bases and confirms,
by pair index only, the pairs whose readings match her wire bits exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional, Sequence

from . import pairswap
from .adversary import Eavesdropper, EveState, Protocol, eve_knowledge
from .bb84 import transmit
from .channels import ClassicalChannel, MessageKind, QuantumChannel, Transcript
from .errors import InvariantViolation, LengthMismatch, OddLength
from .quantum import Basis, BasisString, BitString, RngStream, random_bases, random_bits
from .session import SessionResult, finish


class FinalSelection(str, Enum):
    ALL = "all"
    LAST_OF_PAIR = "last_of_pair"


@dataclass(frozen=True)
class DoubleConfig:
    n_bits: int
    seed: int = 0
    eve: Optional[float] = None
    noise_flip_prob: float = 0.0
    final_selection: FinalSelection = FinalSelection.ALL
    eve_stage2: bool = False
    sample_fraction: Optional[float] = None
    pa_out_len: Optional[int] = None

    def __post_init__(self):
        if self.n_bits < 2 or self.n_bits % 2:
            raise ValueError("n_bits must be even and at least 2")
        object.__setattr__(self, "final_selection", FinalSelection(self.final_selection))
        if self.eve is not None and not 0.0 <= self.eve <= 1.0:
            raise ValueError("eve intercept probability must lie in [0, 1]")
        if not 0.0 <= self.noise_flip_prob <= 1.0:
            raise ValueError("noise_flip_prob must lie in [0, 1]")
        if self.sample_fraction is not None and not 0.0 < self.sample_fraction <= 1.0:
            raise ValueError("sample_fraction must lie in (0, 1]")
        if self.pa_out_len is not None and self.pa_out_len < 0:
            raise ValueError("pa_out_len must be non-negative")


@dataclass
class Stage1Result:
    alice_bits: BitString
    wire_bits: BitString
    alice_bases: BasisString
    bob_bases: BasisString
    bob_measured: BitString
    kept_pairs: list[int]
    discarded_pairs: list[int]
    partial_key_a: BitString
    partial_key_b: BitString
    transcript: Transcript
    eve: Optional[EveState] = None

    @property
    def kept_positions(self) -> list[int]:
        return pair_positions(self.kept_pairs)


@dataclass
class Stage2Result:
    positions: list[int]
    bob_stage2_bases: BasisString
    alice_measured: BitString
    candidate_pairs: list[int]
    confirmed_pairs: list[int]
    added_key_a: BitString
    added_key_b: BitString
    eve: Optional[EveState] = None

    @property
    def confirmed_positions(self) -> list[int]:
        return pair_positions(self.confirmed_pairs)


def pair_positions(pair_indices: Sequence[int]) -> list[int]:
    out = []
    for i in pair_indices:
        out.extend((2 * i, 2 * i + 1))
    return out


def sift_pairs(bases_a: Sequence[Basis], bases_b: Sequence[Basis]) -> tuple[list[int], list[int]]:
    if len(bases_a) != len(bases_b):
        raise LengthMismatch(f"basis strings differ in length: {len(bases_a)} vs {len(bases_b)}")
    if len(bases_a) % 2:
        raise OddLength("pair sifting needs an even number of positions")
    kept, discarded = [], []
    for i in range(len(bases_a) // 2):
        agree = bases_a[2 * i] is bases_b[2 * i] and bases_a[2 * i + 1] is bases_b[2 * i + 1]
        (kept if agree else discarded).append(i)
    return kept, discarded


def _pick(bits: Sequence[int], pairs: Sequence[int]) -> BitString:
    return [bits[p] for p in pair_positions(pairs)]


def run_stage1(
    config: DoubleConfig,
    *,
    alice_bits: Optional[BitString] = None,
    alice_bases: Optional[BasisString] = None,
    bob_bases: Optional[BasisString] = None,
    bob_rng: Optional[RngStream] = None,
    transcript: Optional[Transcript] = None,
) -> Stage1Result:
    """
    Stage 1, Alice to Bob. Injected sequences replace the corresponding
    random draws; ``bob_rng`` supplies Bob's cross-basis outcomes.
    """
    n, seed = config.n_bits, config.seed
    if transcript is None:
        transcript = Transcript({"protocol": Protocol.DOUBLE.value, **asdict(config)})
    if alice_bits is None:
        alice_bits = random_bits(n, RngStream(seed, "A", "S1/bits"))
    if alice_bases is None:
        alice_bases = random_bases(n, RngStream(seed, "A", "S1/bases"))
    if bob_bases is None:
        bob_bases = random_bases(n, RngStream(seed, "B", "S1/bases"))
    if bob_rng is None:
        bob_rng = RngStream(seed, "B", "S1/measure")
    if not len(alice_bits) == len(alice_bases) == len(bob_bases) == n:
        raise LengthMismatch("injected sequences must all have n_bits entries")

    wire_bits = pairswap.apply(alice_bits)

    eve = None
    tap = None
    if config.eve is not None:
        eve = EveState(intercept_prob=config.eve)
        tap = Eavesdropper(eve, RngStream(seed, "E", "S1"))
    quantum = QuantumChannel(transcript, tap=tap, noise_flip_prob=config.noise_flip_prob, stage="S1")
    classical = ClassicalChannel(transcript)

    bob_measured = transmit(
        wire_bits, alice_bases, bob_bases, quantum, bob_rng, RngStream(seed, "N", "S1")
    )

    classical.send("B", MessageKind.BASIS_ANNOUNCE, bob_bases, stage="S1")
    classical.send("A", MessageKind.BASIS_ANNOUNCE, alice_bases, stage="S1")
    kept, discarded = sift_pairs(alice_bases, bob_bases)
    classical.send("A", MessageKind.PAIR_KEEP_LIST, kept, stage="S1")

    return Stage1Result(
        alice_bits=list(alice_bits),
        wire_bits=wire_bits,
        alice_bases=list(alice_bases),
        bob_bases=list(bob_bases),
        bob_measured=bob_measured,
        kept_pairs=kept,
        discarded_pairs=discarded,
        partial_key_a=_pick(alice_bits, kept),
        partial_key_b=pairswap.inverse(_pick(bob_measured, kept)),
        transcript=transcript,
        eve=eve,
    )


def run_stage2(
    s1: Stage1Result,
    config: DoubleConfig,
    *,
    bob_bases: Optional[BasisString] = None,
    alice_rng: Optional[RngStream] = None,
) -> Stage2Result:
    """
    Stage 2, Bob to Alice, over the discarded pairs only.

    Bob re-encodes his stage-1 readings (wire level, not un-swapped) in fresh
    bases. A pair is a candidate when Bob's bases match Alice's stage-1 bases
    at both positions, and is confirmed when Alice's readings equal her wire
    bits at both positions. Confirmed pairs therefore agree on both sides.
    """
    seed = config.seed
    positions = pair_positions(s1.discarded_pairs)
    if bob_bases is None:
        bob_bases = random_bases(len(positions), RngStream(seed, "B", "S2/bases"))
    if alice_rng is None:
        alice_rng = RngStream(seed, "A", "S2/measure")
    if len(bob_bases) != len(positions):
        raise LengthMismatch(f"stage 2 needs {len(positions)} bases, got {len(bob_bases)}")

    eve = None
    tap = None
    if config.eve is not None and config.eve_stage2:
        eve = EveState(intercept_prob=config.eve)
        tap = Eavesdropper(eve, RngStream(seed, "E", "S2"))
    quantum = QuantumChannel(s1.transcript, tap=tap, noise_flip_prob=config.noise_flip_prob, stage="S2")
    classical = ClassicalChannel(s1.transcript)

    alice_view = [s1.alice_bases[p] for p in positions]
    alice_measured = transmit(
        [s1.bob_measured[p] for p in positions], bob_bases, alice_view,
        quantum, alice_rng, RngStream(seed, "N", "S2"), positions,
    )
    classical.send("B", MessageKind.STAGE2_BASIS_ANNOUNCE, bob_bases, stage="S2")

    candidates, confirmed = [], []
    for k, pair in enumerate(s1.discarded_pairs):
        a, b = 2 * k, 2 * k + 1
        if bob_bases[a] is alice_view[a] and bob_bases[b] is alice_view[b]:
            candidates.append(pair)
            if (alice_measured[a], alice_measured[b]) == (s1.wire_bits[2 * pair], s1.wire_bits[2 * pair + 1]):
                confirmed.append(pair)
    classical.send("A", MessageKind.STAGE2_KEEP_CONFIRM, confirmed, stage="S2")

    return Stage2Result(
        positions=positions,
        bob_stage2_bases=list(bob_bases),
        alice_measured=alice_measured,
        candidate_pairs=candidates,
        confirmed_pairs=confirmed,
        added_key_a=_pick(s1.alice_bits, confirmed),
        added_key_b=pairswap.inverse(_pick(s1.bob_measured, confirmed)),
        eve=eve,
    )


def select_last_of_pair(key: Sequence[int]) -> BitString:
    if len(key) % 2:
        raise OddLength("key is not pair-aligned")
    return list(key[1::2])


@dataclass
class DoubleSessionResult(SessionResult):
    stage1: Optional[Stage1Result] = None
    stage2: Optional[Stage2Result] = None
    position_stages: list[str] = field(default_factory=list)


def run_double(config: DoubleConfig, **inject) -> DoubleSessionResult:
    """
    Full two-stage session. Keyword arguments ``alice_bits``, ``alice_bases``,
    ``bob_bases``, ``bob_rng`` go to stage 1; ``stage2_bob_bases`` and
    ``alice_rng`` go to stage 2.
    """
    s2_kwargs = {
        "bob_bases": inject.pop("stage2_bob_bases", None),
        "alice_rng": inject.pop("alice_rng", None),
    }
    s1 = run_stage1(config, **inject)
    s2 = run_stage2(s1, config, **s2_kwargs)

    if not set(s2.confirmed_pairs) <= set(s1.discarded_pairs):
        raise InvariantViolation("stage 2 confirmed a pair that stage 1 kept")
    # Only a clean return channel guarantees agreement: noise or a stage-2 tap
    # can turn one of Bob's wrong readings into the right one in transit.
    clean_return = config.noise_flip_prob == 0.0 and s2.eve is None
    if clean_return and s2.added_key_a != s2.added_key_b:
        raise InvariantViolation("confirmed stage-2 pairs disagree")

    positions = s1.kept_positions + s2.confirmed_positions
    key_a = s1.partial_key_a + s2.added_key_a
    key_b = s1.partial_key_b + s2.added_key_b
    stages = ["S1"] * len(s1.partial_key_a) + ["S2"] * len(s2.added_key_a)
    if config.final_selection is FinalSelection.LAST_OF_PAIR:
        positions = positions[1::2]
        key_a, key_b, stages = key_a[1::2], key_b[1::2], stages[1::2]

    result = DoubleSessionResult(
        alice_key=key_a,
        bob_key=key_b,
        kept_positions=positions,
        raw_length=config.n_bits,
        transcript=s1.transcript,
        stage1_key_bits=stages.count("S1"),
        stage2_key_bits=stages.count("S2"),
        stage1=s1,
        stage2=s2,
        position_stages=stages,
    )
    if s1.eve is not None:
        result.eve_report = eve_knowledge(
            s1.transcript, s1.eve, positions, key_a, Protocol.DOUBLE, stages
        )
    classical = ClassicalChannel(s1.transcript)
    return finish(result, classical, config.seed, config.sample_fraction, config.pa_out_len)
