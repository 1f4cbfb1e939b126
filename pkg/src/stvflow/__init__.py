"""Scottish-rules STV counting with ballot-exhaustion analysis."""

from .ballots import (
    Candidate,
    EmptyProfileError,
    ParseError,
    PreferenceProfile,
    ProfileMetadata,
    RankedBallot,
    load_profile,
    normalize_marks,
    parse_profile,
    write_profile,
)
from .completion import (
    COMPLETION_MODELS,
    CompletionOutcome,
    NoLosers,
    QuotaFailure,
    SeatsMismatch,
    complete_l1,
    complete_l1_l2,
    complete_proportional,
    diff_winners,
    largest_remainder,
    quota_failure_analysis,
    rank_losers,
    run_completion,
)
from .engine import (
    ConfigError,
    ElectionConfig,
    EventKind,
    RoundEvent,
    SeatAward,
    StoppingRule,
    TabulationRecord,
    Termination,
    TieEvent,
    break_tie,
    check_termination,
    compute_quota,
    rank_tied,
    surplus_transfer_value,
    tabulate,
)
from .exhaustion import (
    DEFAULT_THRESHOLDS,
    ExhaustionReport,
    MissingMetadata,
    ballot_length_stats,
    build_report,
    classify_ballots,
    effective_exhaustion,
    rejected_rate,
)
from .export import record_from_dict, record_to_dict, to_json_bytes, votes_by_round_rows
from .fixedpoint import PAPER_PRECISION, Precision, fmt
from .tracing import BallotTrace, Contribution, TraceRow, UnknownCandidate, trace_ballot

__version__ = "0.1.0"

__all__ = [
    "COMPLETION_MODELS",
    "DEFAULT_THRESHOLDS",
    "PAPER_PRECISION",
    "BallotTrace",
    "Candidate",
    "CompletionOutcome",
    "ConfigError",
    "Contribution",
    "ElectionConfig",
    "EmptyProfileError",
    "EventKind",
    "ExhaustionReport",
    "MissingMetadata",
    "NoLosers",
    "ParseError",
    "Precision",
    "PreferenceProfile",
    "ProfileMetadata",
    "QuotaFailure",
    "RankedBallot",
    "RoundEvent",
    "SeatAward",
    "SeatsMismatch",
    "StoppingRule",
    "TabulationRecord",
    "Termination",
    "TieEvent",
    "TraceRow",
    "UnknownCandidate",
    "ballot_length_stats",
    "break_tie",
    "build_report",
    "check_termination",
    "classify_ballots",
    "complete_l1",
    "complete_l1_l2",
    "complete_proportional",
    "compute_quota",
    "diff_winners",
    "effective_exhaustion",
    "fmt",
    "largest_remainder",
    "load_profile",
    "normalize_marks",
    "parse_profile",
    "quota_failure_analysis",
    "rank_losers",
    "rank_tied",
    "record_from_dict",
    "record_to_dict",
    "rejected_rate",
    "run_completion",
    "surplus_transfer_value",
    "tabulate",
    "to_json_bytes",
    "trace_ballot",
    "votes_by_round_rows",
    "write_profile",
]
