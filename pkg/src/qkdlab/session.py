"""Session result type and the post-sifting steps both protocols share."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .adversary import EveKnowledgeReport
from .channels import ClassicalChannel, MessageKind, Transcript
from .errors import KeyTooShort
from .postprocess import (
    QberEstimate,
    ToeplitzSeed,
    estimate_qber,
    privacy_amplify,
    verify_keys,
)
from .quantum import BitString, RngStream

VERIFY_HASH_BITS = 32


@dataclass
class SessionResult:
    """
    Outcome of one protocol run.

    ``alice_key``/``bob_key`` are the sifted keys aligned with ``kept_positions``
    (0-based raw indices). ``secret_a``/``secret_b`` are what remains after QBER
    sacrifice and privacy amplification; without those steps they equal the
    sifted keys.
    """

    alice_key: BitString
    bob_key: BitString
    kept_positions: list[int]
    raw_length: int
    transcript: Transcript
    qber_estimate: Optional[QberEstimate] = None
    eve_report: Optional[EveKnowledgeReport] = None
    secret_a: BitString = field(default_factory=list)
    secret_b: BitString = field(default_factory=list)
    keys_verified: Optional[bool] = None
    stage1_key_bits: int = 0
    stage2_key_bits: int = 0

    @property
    def qber(self) -> Optional[float]:
        return None if self.qber_estimate is None else self.qber_estimate.rate

    @property
    def error_rate(self) -> float:
        """Disagreement over the whole sifted key; simulation-side, never public."""
        if not self.alice_key:
            return 0.0
        return sum(a != b for a, b in zip(self.alice_key, self.bob_key)) / len(self.alice_key)


def finish(
    result: SessionResult,
    classical: ClassicalChannel,
    seed: int,
    sample_fraction: Optional[float],
    pa_out_len: Optional[int],
) -> SessionResult:
    """Run QBER sacrifice, hash verification and privacy amplification as configured."""
    key_a, key_b = list(result.alice_key), list(result.bob_key)
    if sample_fraction:
        est, key_a, key_b = estimate_qber(key_a, key_b, sample_fraction, RngStream(seed, "A", "QBER"))
        picked = est.sacrificed_positions
        classical.send("A", MessageKind.QBER_SAMPLE_INDICES, picked, stage="PP")
        classical.send("A", MessageKind.QBER_SAMPLE_BITS, [result.alice_key[i] for i in picked], stage="PP")
        classical.send("B", MessageKind.QBER_SAMPLE_BITS, [result.bob_key[i] for i in picked], stage="PP")
        result.qber_estimate = est
    if pa_out_len is not None:
        if pa_out_len > len(key_a):
            raise KeyTooShort(f"cannot compress {len(key_a)} bits to {pa_out_len}")
        rng = RngStream(seed, "A", "PA")
        check = ToeplitzSeed.random(len(key_a), min(VERIFY_HASH_BITS, len(key_a)), rng)
        classical.send("A", MessageKind.PA_SEED, check.bits, stage="PP")
        classical.send("A", MessageKind.KEY_HASH, privacy_amplify(key_a, check), stage="PP")
        result.keys_verified = verify_keys(key_a, key_b, check)
        pa = ToeplitzSeed.random(len(key_a), pa_out_len, rng)
        classical.send("A", MessageKind.PA_SEED, pa.bits, stage="PP")
        key_a, key_b = privacy_amplify(key_a, pa), privacy_amplify(key_b, pa)
    result.secret_a, result.secret_b = key_a, key_b
    return result
