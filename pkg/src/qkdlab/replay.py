"""
Golden replay of the 16-bit worked example.

Stage 1 is checked row by row and any difference is a failure. Stage 2 is
replayed with the reference return-leg bases and reported pair by pair next
to the reference verdicts; those rows are informational because the
reference table cannot be reproduced by a deterministic measurement model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .double_bb84 import DoubleConfig, DoubleSessionResult, run_double
from .quantum import ScriptedStream, format_bases, format_bits, parse_bases, parse_bits

ALICE_BITS = "1100011010010011"
ALICE_BASES = "X++X++XXXX+++XX+"
BOB_BASES = "+++XX+XXXXX++X++"
# Bob's cross-basis outcomes at positions 1, 5, 11, 15 (1-based), read off the reference measurement row.
BOB_CROSS_OUTCOMES = (1, 1, 1, 1)

EXPECTED_WIRE = "1100100101100011"
EXPECTED_KEPT_PAIRS = (1, 3, 4, 6)  # 0-based pair indices: positions 3-4, 7-8, 9-10, 13-14
EXPECTED_STAGE1_KEY = "00101000"

# Reference return leg, one entry per discarded pair (0-based pair index).
STAGE2_BOB_BASES = {0: "X+", 2: "++", 5: "++", 7: "X+"}
STAGE2_REFERENCE_ALICE = {0: "11", 2: "10", 5: "10", 7: "11"}
STAGE2_REFERENCE_KEPT = {0, 7}


@dataclass
class ReplayReport:
    result: DoubleSessionResult
    rows: list[tuple[str, str]] = field(default_factory=list)
    mismatches: list[str] = field(default_factory=list)
    stage2_rows: list[tuple[str, ...]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _masked(bits, positions, n):
    keep = set(positions)
    return "".join(str(bits[i]) if i in keep else "-" for i in range(n))


def replay() -> ReplayReport:
    n = len(ALICE_BITS)
    bob_s2 = "".join(STAGE2_BOB_BASES[k] for k in sorted(STAGE2_BOB_BASES))
    result = run_double(
        DoubleConfig(n, seed=0),
        alice_bits=parse_bits(ALICE_BITS),
        alice_bases=parse_bases(ALICE_BASES),
        bob_bases=parse_bases(BOB_BASES),
        bob_rng=ScriptedStream(BOB_CROSS_OUTCOMES, "replay-bob"),
        stage2_bob_bases=parse_bases(bob_s2),
    )
    s1, s2 = result.stage1, result.stage2
    report = ReplayReport(result)

    kept_pos = s1.kept_positions
    key_b = {p: b for p, b in zip(kept_pos, s1.partial_key_b)}
    report.rows = [
        ("Alice bits", format_bits(s1.alice_bits)),
        ("Wire bits", format_bits(s1.wire_bits)),
        ("Alice bases", format_bases(s1.alice_bases)),
        ("Bob bases", format_bases(s1.bob_bases)),
        ("Bob measured", format_bits(s1.bob_measured)),
        ("Kept positions", _masked(s1.bob_measured, kept_pos, n)),
        ("Bob unswapped", "".join(str(key_b[i]) if i in key_b else "-" for i in range(n))),
        ("Stage-1 key", _masked(s1.alice_bits, kept_pos, n)),
    ]

    checks = [
        ("wire bits", format_bits(s1.wire_bits), EXPECTED_WIRE),
        ("kept pairs", tuple(s1.kept_pairs), EXPECTED_KEPT_PAIRS),
        ("stage-1 key (Alice)", format_bits(s1.partial_key_a), EXPECTED_STAGE1_KEY),
        ("stage-1 key (Bob)", format_bits(s1.partial_key_b), EXPECTED_STAGE1_KEY),
    ]
    for name, got, want in checks:
        if got != want:
            report.mismatches.append(f"{name}: got {got}, expected {want}")

    for k, pair in enumerate(s1.discarded_pairs):
        measured = format_bits(s2.alice_measured[2 * k: 2 * k + 2])
        report.stage2_rows.append((
            f"{2 * pair + 1}-{2 * pair + 2}",
            format_bases(s2.bob_stage2_bases[2 * k: 2 * k + 2]),
            STAGE2_REFERENCE_ALICE.get(pair, "--"),
            measured,
            "kept" if pair in STAGE2_REFERENCE_KEPT else "dropped",
            "confirmed" if pair in s2.confirmed_pairs
            else ("candidate" if pair in s2.candidate_pairs else "not candidate"),
        ))
    return report
