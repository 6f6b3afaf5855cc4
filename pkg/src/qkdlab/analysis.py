"""
Monte-Carlo comparison of BB84 and the two-stage protocol under
intercept-resend attack.

For the two-stage protocol the compared key is the stage-1 key; stage-2
contributions are tracked separately. Security percentage is
``100 * (1 - eve_known / key)``.
"""

from __future__ import annotations

import hashlib
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

from .adversary import Protocol
from .bb84 import Bb84Config, run_bb84
from .double_bb84 import DoubleConfig, run_double


@dataclass(frozen=True)
class TrialStats:
    raw_bits: int
    key_bits: int
    eve_known_bits: int
    qber: float
    stage1_key_bits: int = 0
    stage2_key_bits: int = 0
    stage2_eve_known_bits: int = 0

    @property
    def sift_fraction(self) -> float:
        return self.key_bits / self.raw_bits

    @property
    def eve_known_fraction(self) -> float:
        return self.eve_known_bits / self.key_bits if self.key_bits else 0.0

    @property
    def security(self) -> float:
        return 100.0 * (1.0 - self.eve_known_fraction)


@dataclass(frozen=True)
class Summary:
    mean: float
    std: float
    ci95: tuple[float, float]

    @classmethod
    def of(cls, values: list[float]) -> "Summary":
        mean = math.fsum(values) / len(values)
        std = statistics.stdev(values) if len(values) > 1 else 0.0
        half = 1.96 * std / math.sqrt(len(values))
        return cls(mean, std, (mean - half, mean + half))


@dataclass
class TrialAggregate:
    protocol: Protocol
    n_bits: int
    eve: Optional[float]
    seed: int
    trials: list[TrialStats]

    def summary(self, attr: str) -> Summary:
        return Summary.of([float(getattr(t, attr)) for t in self.trials])

    @property
    def unit(self) -> int:
        """Bits per counted key unit: 1 for BB84, 2 (a pair) for the two-stage protocol."""
        return 2 if self.protocol is Protocol.DOUBLE else 1

    def to_dict(self) -> dict:
        out = {
            "protocol": self.protocol.value,
            "n_bits": self.n_bits,
            "trials": len(self.trials),
            "eve": self.eve,
            "seed": self.seed,
            "unit_bits": self.unit,
        }
        for name in _SUMMARY_FIELDS[:-2]:
            out[name] = asdict(self.summary(name))
        out["key_units"] = asdict(Summary.of([t.key_bits / self.unit for t in self.trials]))
        out["eve_known_units"] = asdict(Summary.of([t.eve_known_bits / self.unit for t in self.trials]))
        return out


_SUMMARY = {
    "type": "object",
    "required": ["mean", "std", "ci95"],
    "properties": {
        "mean": {"type": "number"},
        "std": {"type": "number"},
        "ci95": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    },
}
_SUMMARY_FIELDS = [
    "key_bits", "eve_known_bits", "qber", "sift_fraction", "eve_known_fraction",
    "security", "stage2_key_bits", "stage2_eve_known_bits", "key_units", "eve_known_units",
]
_PROTOCOL = {
    "type": "object",
    "required": ["protocol", "n_bits", "trials", "eve", "seed", "unit_bits", *_SUMMARY_FIELDS],
    "properties": {
        "protocol": {"enum": ["bb84", "double"]},
        "n_bits": {"type": "integer"},
        "trials": {"type": "integer", "minimum": 1},
        "eve": {"type": ["number", "null"]},
        "seed": {"type": "integer"},
        "unit_bits": {"enum": [1, 2]},
        **{name: _SUMMARY for name in _SUMMARY_FIELDS},
    },
}
# JSON schema of ``ComparisonReport.to_dict()`` (the ``compare --output json`` document).
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["n_bits", "trials", "seed", "protocols"],
    "properties": {
        "n_bits": {"type": "integer", "minimum": 2},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "protocols": {
            "type": "object",
            "required": ["bb84", "double"],
            "properties": {"bb84": _PROTOCOL, "double": _PROTOCOL},
        },
    },
}


def derive_seed(master: int, protocol: Protocol | str, trial: int) -> int:
    digest = hashlib.sha256(f"{master}/{Protocol(protocol).value}/{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def run_one(protocol: Protocol | str, n_bits: int, eve: Optional[float], seed: int) -> TrialStats:
    protocol = Protocol(protocol)
    if protocol is Protocol.BB84:
        r = run_bb84(Bb84Config(n_bits, seed=seed, eve=eve))
        known = r.eve_report.known_bits if r.eve_report else 0
        return TrialStats(n_bits, len(r.alice_key), known, r.error_rate, stage1_key_bits=len(r.alice_key))
    r = run_double(DoubleConfig(n_bits, seed=seed, eve=eve))
    s1 = r.stage1
    k1 = len(s1.partial_key_a)
    qber = sum(a != b for a, b in zip(s1.partial_key_a, s1.partial_key_b)) / k1 if k1 else 0.0
    stages = r.eve_report.stages if r.eve_report else {}
    return TrialStats(
        raw_bits=n_bits,
        key_bits=k1,
        eve_known_bits=stages.get("S1", {}).get("known_bits", 0),
        qber=qber,
        stage1_key_bits=k1,
        stage2_key_bits=r.stage2_key_bits,
        stage2_eve_known_bits=stages.get("S2", {}).get("known_bits", 0),
    )


def _run_indexed(args):
    return run_one(*args)


def run_trials(
    protocol: Protocol | str,
    n_bits: int,
    trials: int,
    eve: Optional[float],
    seed: int,
    workers: int = 1,
) -> TrialAggregate:
    protocol = Protocol(protocol)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    jobs = [(protocol, n_bits, eve, derive_seed(seed, protocol, i)) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(_run_indexed, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        stats = [run_one(*job) for job in jobs]
    return TrialAggregate(protocol, n_bits, eve, seed, stats)


@dataclass
class ComparisonReport:
    n_bits: int
    trials: int
    seed: int
    bb84: TrialAggregate
    double: TrialAggregate

    def to_dict(self) -> dict:
        return {
            "n_bits": self.n_bits,
            "trials": self.trials,
            "seed": self.seed,
            "protocols": {"bb84": self.bb84.to_dict(), "double": self.double.to_dict()},
        }

    def rows(self) -> list[tuple[str, str, str]]:
        b, d = self.bb84, self.double
        bk, dk = b.summary("key_bits").mean, d.summary("key_bits").mean
        be, de = b.summary("eve_known_bits").mean, d.summary("eve_known_bits").mean
        return [
            ("Raw bits", f"{self.n_bits}", f"{self.n_bits}"),
            ("Units", f"{self.n_bits} bits", f"{self.n_bits // 2} pairs"),
            ("Key units", f"{bk:.1f} bits", f"{dk / 2:.1f} pairs ({dk:.1f} bits)"),
            ("Eve-known", f"{be:.1f} bits", f"{de / 2:.1f} pairs ({de:.1f} bits)"),
            ("Security", f"{b.summary('security').mean:.2f}%", f"{d.summary('security').mean:.2f}%"),
            ("QBER", f"{b.summary('qber').mean:.4f}", f"{d.summary('qber').mean:.4f}"),
            ("Stage-2 added", "-", f"{d.summary('stage2_key_bits').mean:.1f} bits"),
        ]


def compare_protocols(n_bits: int, trials: int, seed: int, workers: int = 1) -> ComparisonReport:
    if n_bits % 2:
        raise ValueError("n_bits must be even to compare pair-based sifting")
    bb84 = run_trials(Protocol.BB84, n_bits, trials, 1.0, seed, workers)
    double = run_trials(Protocol.DOUBLE, n_bits, trials, 1.0, seed, workers)
    return ComparisonReport(n_bits, trials, seed, bb84, double)
