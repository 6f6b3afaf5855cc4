"""
Command-line entry point.

Exit codes: 0 success, 2 bad flags or input, 3 internal invariant violation,
4 replay mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .analysis import compare_protocols
from .bb84 import Bb84Config, run_bb84
from .channels import Transcript
from .double_bb84 import DoubleConfig, FinalSelection, run_double
from .errors import InvariantViolation, MalformedMessage
from .postprocess import bits_to_hex
from .quantum import format_bits
from .replay import replay

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTERNAL = 3
EXIT_MISMATCH = 4

SEED_ENV = "QKDLAB_SEED"
SHOW_BITS_UP_TO = 128


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkdlab", description="BB84 and two-stage BB84 simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_bits_default=None):
        p.add_argument("--n-bits", type=int, default=n_bits_default, required=n_bits_default is None)
        p.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
        p.add_argument("--output", choices=["table", "json"], default="table")

    run = sub.add_parser("run", help="run one session")
    common(run)
    run.add_argument("--protocol", choices=["bb84", "double"], default="bb84")
    run.add_argument("--eve", type=float, default=None, metavar="PROB", help="intercept probability")
    run.add_argument("--eve-stage2", action="store_true", help="let Eve also tap the return leg")
    run.add_argument("--noise", type=float, default=0.0, metavar="PROB")
    run.add_argument("--sample", type=float, default=None, metavar="FRACTION",
                     help="fraction of the sifted key sacrificed for QBER estimation")
    run.add_argument("--pa-out-len", type=int, default=None, metavar="BITS")
    run.add_argument("--final-selection", choices=[s.value for s in FinalSelection], default="all")
    run.add_argument("--transcript", metavar="PATH", help="write the JSON-lines transcript here")

    cmp_ = sub.add_parser("compare", help="Monte-Carlo comparison under full intercept-resend")
    common(cmp_, n_bits_default=2880)
    cmp_.add_argument("--trials", type=int, default=100)
    cmp_.add_argument("--workers", type=int, default=1)

    rep = sub.add_parser("replay", help="replay the 16-bit worked example")
    rep.add_argument("--output", choices=["table", "json"], default="table")

    tr = sub.add_parser("transcript", help="validate and pretty-print a transcript file")
    tr.add_argument("path")
    tr.add_argument("--output", choices=["table", "json"], default="table")
    return parser


def _key_view(bits) -> dict:
    out = {"length": len(bits), "hex": bits_to_hex(bits)}
    if len(bits) <= SHOW_BITS_UP_TO:
        out["bits"] = format_bits(bits)
    return out


def cmd_run(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.n_bits < 1:
        raise UsageError("--n-bits must be at least 1")
    try:
        if args.protocol == "bb84":
            cfg = Bb84Config(args.n_bits, seed=seed, eve=args.eve, noise_flip_prob=args.noise,
                             sample_fraction=args.sample, pa_out_len=args.pa_out_len)
            result = run_bb84(cfg)
        else:
            cfg = DoubleConfig(args.n_bits, seed=seed, eve=args.eve, noise_flip_prob=args.noise,
                               final_selection=args.final_selection, eve_stage2=args.eve_stage2,
                               sample_fraction=args.sample, pa_out_len=args.pa_out_len)
            result = run_double(cfg)
    except ValueError as exc:  # includes KeyTooShort
        raise UsageError(str(exc)) from exc

    if args.transcript:
        with open(args.transcript, "w") as fh:
            fh.write(result.transcript.to_jsonl())

    report = {
        "protocol": args.protocol,
        "n_bits": args.n_bits,
        "seed": seed,
        "sifted_bits": len(result.alice_key),
        "stage1_key_bits": result.stage1_key_bits,
        "stage2_key_bits": result.stage2_key_bits,
        "alice_key": _key_view(result.alice_key),
        "bob_key": _key_view(result.bob_key),
        "keys_equal": result.alice_key == result.bob_key,
        "qber": None if result.qber_estimate is None else {
            "sampled": result.qber_estimate.sampled,
            "disagreements": result.qber_estimate.disagreements,
            "rate": result.qber_estimate.rate,
        },
        "eve": None if result.eve_report is None else result.eve_report.to_dict(),
        "secret_a": _key_view(result.secret_a),
        "secret_b": _key_view(result.secret_b),
        "keys_verified": result.keys_verified,
    }
    if args.output == "json":
        print(json.dumps(report, indent=2))
        return EXIT_OK

    print(f"protocol        {report['protocol']}  n_bits={args.n_bits}  seed={seed}")
    print(f"sifted key      {report['sifted_bits']} bits "
          f"(stage 1: {result.stage1_key_bits}, stage 2: {result.stage2_key_bits})")
    for label, key in (("alice key", report["alice_key"]), ("bob key", report["bob_key"])):
        print(f"{label:<15} {key.get('bits', key['hex']) or '(empty)'}")
    print(f"keys equal      {report['keys_equal']}")
    if report["qber"] is not None:
        q = report["qber"]
        print(f"qber            {q['rate']:.4f}  ({q['disagreements']}/{q['sampled']} sampled)")
    if report["eve"] is not None:
        e = report["eve"]
        print(f"eve knows       {e['known_bits']}/{e['key_length']} bits  "
              f"fraction={e['known_fraction']:.4f}")
        for stage, row in sorted(e["stages"].items()):
            print(f"  {stage:<13} {row['known_bits']}/{row['key_length']}")
    if report["keys_verified"] is not None:
        print(f"hash verified   {report['keys_verified']}")
    if args.sample or args.pa_out_len is not None:
        print(f"final secret    {len(result.secret_a)} bits  {bits_to_hex(result.secret_a)}")
    return EXIT_OK


def cmd_compare(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.n_bits < 2 or args.n_bits % 2:
        raise UsageError("--n-bits must be even and at least 2")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    report = compare_protocols(args.n_bits, args.trials, seed, workers=args.workers)
    if args.output == "json":
        print(json.dumps(report.to_dict(), indent=2))
        return EXIT_OK
    print(f"n_bits={args.n_bits} trials={args.trials} seed={seed} eve=1.0")
    print(f"{'Criteria':<16}{'BB84':>24}{'Two-stage':>32}")
    for name, a, b in report.rows():
        print(f"{name:<16}{a:>24}{b:>32}")
    return EXIT_OK


def cmd_replay(args) -> int:
    rep = replay()
    if args.output == "json":
        print(json.dumps({
            "ok": rep.ok,
            "rows": dict(rep.rows),
            "mismatches": rep.mismatches,
            "stage2": [
                dict(zip(("pair", "bob_bases", "reference_alice", "simulated_alice",
                          "reference", "simulated"), row))
                for row in rep.stage2_rows
            ],
        }, indent=2))
    else:
        print("Stage 1 (Alice to Bob)")
        for name, row in rep.rows:
            print(f"  {name:<24} {' '.join(row)}")
        print("Stage 2 (Bob to Alice), informational")
        print(f"  {'pair':<7}{'bob':<5}{'reference A':<13}{'simulated A':<13}{'reference':<11}simulated")
        for pair, bases, pub, sim, pv, sv in rep.stage2_rows:
            print(f"  {pair:<7}{bases:<5}{pub:<13}{sim:<13}{pv:<11}{sv}")
        final = rep.result.alice_key
        print(f"  final key ({len(final)} bits): {format_bits(final)}")
        for m in rep.mismatches:
            print(f"MISMATCH {m}")
        print("replay OK" if rep.ok else "replay FAILED")
    return EXIT_OK if rep.ok else EXIT_MISMATCH


def cmd_transcript(args) -> int:
    try:
        with open(args.path) as fh:
            transcript = Transcript.from_jsonl(fh.read())
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    except MalformedMessage as exc:
        raise UsageError(f"invalid transcript: {exc}") from exc
    if args.output == "json":
        print(json.dumps({
            "meta": transcript.seed_metadata,
            "quantum_events": len(transcript.quantum_events),
            "classical_messages": len(transcript.classical_messages),
        }, indent=2))
        return EXIT_OK
    print(f"meta: {json.dumps(transcript.seed_metadata)}")
    for e in transcript.entries:
        rec = e.to_json()
        if rec["t"] == "q":
            eve = "-" if rec["eve"] is None else f"{rec['eve']['basis']}{rec['eve']['bit']}"
            print(f"q {rec['stage']} #{rec['i']:<5} {rec['sent']:>4} -> eve {eve:<2} -> {rec['delivered']}")
        else:
            payload = rec["payload"]
            shown = "".join(map(str, payload)) if len(payload) <= 64 else f"<{len(payload)} items>"
            print(f"c {rec['stage']} {rec['from']} {rec['kind']:<22} {shown}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "replay": cmd_replay, "transcript": cmd_transcript}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qkdlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"qkdlab: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
