"""Seedable simulator for BB84 and a two-stage, pair-swapped BB84 variant."""

from .adversary import Eavesdropper, EveKnowledgeReport, EveState, Protocol, eve_knowledge, intercept_resend
from .analysis import ComparisonReport, TrialStats, compare_protocols, run_trials
from .bb84 import Bb84Config, run_bb84, sift_positions
from .double_bb84 import DoubleConfig, FinalSelection, run_double, run_stage1, run_stage2, sift_pairs
from .quantum import Basis, Photon, Polarization, RngStream, ScriptedStream, encode, measure
from .session import SessionResult

__all__ = [
    "Basis", "Bb84Config", "ComparisonReport", "DoubleConfig", "Eavesdropper",
    "EveKnowledgeReport", "EveState", "FinalSelection", "Photon", "Polarization",
    "Protocol", "RngStream", "ScriptedStream", "SessionResult", "TrialStats",
    "compare_protocols", "encode", "eve_knowledge", "intercept_resend", "measure",
    "run_bb84", "run_double", "run_stage1", "run_stage2", "run_trials",
    "sift_pairs", "sift_positions",
]
