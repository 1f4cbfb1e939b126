"""Ballot exhaustion: who ran out of preferences, when, and how much weight.

A ballot group is exhausted when it leaves the count entirely: the event
that moved it found no continuing candidate left on it. Two stricter
subclasses follow the same containment chain:

* non-first-choice exhausted: exhausted, and the first-ranked candidate is
  not a winner;
* unrepresented: exhausted, and none of the top min(seats, length) ranked
  candidates is a winner.

Weight exhaustion is the share of total ballot weight that never reaches a
final standing total: cumulative exhausted weight plus the quantization
residue shed at surplus transfers. Effective exhaustion counts ballots that
are still in the count but whose weight has been multiplied down to (or
below) a threshold, such as the followers of a candidate elected with a
zero surplus.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .ballots import PreferenceProfile
from .engine import EventKind, TabulationRecord

__all__ = [
    "ExhaustionClass",
    "RoundExhaustion",
    "SeatExhaustion",
    "ExhaustionReport",
    "MissingMetadata",
    "LengthStats",
    "DEFAULT_THRESHOLDS",
    "classify_ballots",
    "build_report",
    "effective_exhaustion",
    "ballot_length_stats",
    "rejected_rate",
]

DEFAULT_THRESHOLDS = (Decimal("0"), Decimal("0.0001"), Decimal("0.001"))


class MissingMetadata(ValueError):
    """The profile lacks the metadata a statistic needs."""


@dataclass(frozen=True)
class ExhaustionClass:
    exhausted: bool
    non_first_choice: bool
    unrepresented: bool
    contributed: bool


@dataclass(frozen=True)
class RoundExhaustion:
    """Exhaustion in one transfer round, with its transfer-pool denominators.

    The pool counts the ballots held by the candidate whose surplus or
    elimination produced this round's totals; pool weight is the weight that
    actually moved (for a surplus, the post-reweight weight, i.e. the
    surplus minus quantization residue).
    """

    round: int
    exhausted_ballots: int
    exhausted_weight: Decimal
    pool_ballots: int
    pool_weight: Decimal


@dataclass(frozen=True)
class SeatExhaustion:
    """Exhausted ballots grouped by seat round.

    Seat k's bucket covers ballots whose exhaustion round lies after the
    round seat k-1 was earned and at or before seat k's round; the trailing
    entry (seat None) collects ballots exhausted after the last seat.
    ``previously_contributed`` counts those that had already been part of
    some winner's quota.
    """

    seat: int | None
    round: int | None
    exhausted_ballots: int
    previously_contributed: int


@dataclass(frozen=True)
class ExhaustionReport:
    total_ballots: int
    exhausted: int
    non_first_choice: int
    unrepresented: int
    exhaustion_rate: float
    non_first_choice_rate: float
    unrepresented_rate: float
    weight_exhaustion_rate: float
    effective_exhaustion: tuple[tuple[Decimal, int], ...]
    per_round: tuple[RoundExhaustion, ...]
    per_seat: tuple[SeatExhaustion, ...]


def classify_ballots(record: TabulationRecord) -> dict[tuple[int, ...], ExhaustionClass]:
    """Classify every merged ballot group of a finished count."""
    winners = record.winner_ids
    seats = record.seats
    classes: dict[tuple[int, ...], ExhaustionClass] = {}
    for traj in record.trajectories:
        exhausted = traj.final_holder is None
        top = traj.ranking[: min(seats, len(traj.ranking))]
        classes[traj.ranking] = ExhaustionClass(
            exhausted=exhausted,
            non_first_choice=exhausted and traj.ranking[0] not in winners,
            unrepresented=exhausted and winners.isdisjoint(top),
            contributed=bool(traj.contributed_to),
        )
    return classes


def effective_exhaustion(record: TabulationRecord, threshold: Decimal) -> int:
    """Ballots still in the count whose weight fell to the threshold or below."""
    return sum(
        traj.multiplicity
        for traj in record.trajectories
        if traj.final_holder is not None and traj.final_weight <= threshold
    )


def build_report(
    record: TabulationRecord,
    thresholds: tuple[Decimal, ...] = DEFAULT_THRESHOLDS,
) -> ExhaustionReport:
    """Assemble the full exhaustion report for one finished count."""
    classes = classify_ballots(record)
    total = record.total_ballots
    exhausted = non_first_choice = unrepresented = 0
    for traj in record.trajectories:
        cls = classes[traj.ranking]
        if cls.exhausted:
            exhausted += traj.multiplicity
            if cls.non_first_choice:
                non_first_choice += traj.multiplicity
            if cls.unrepresented:
                unrepresented += traj.multiplicity

    def pct(count: int) -> float:
        return 100.0 * count / total if total else 0.0

    weight_rate = (
        100.0 * float((record.exhausted_weight + record.residue) / Decimal(total))
        if total
        else 0.0
    )

    per_round = tuple(
        RoundExhaustion(
            round=event.round,
            exhausted_ballots=event.exhausted_ballots,
            exhausted_weight=event.exhausted_weight,
            pool_ballots=event.pool_ballots,
            pool_weight=event.pool_weight,
        )
        for event in record.events
        if event.kind is not EventKind.INITIAL_COUNT
    )

    # Seat buckets: (previous seat round, this seat round], then the tail.
    seat_rounds = [(award.seat, award.round) for award in record.winners]
    buckets: list[tuple[int | None, int | None, int, int]] = []
    previous = 0
    for seat, rnd in seat_rounds:
        count = contributed = 0
        for traj in record.trajectories:
            e = traj.exhausted_round
            if e is not None and previous < e <= rnd:
                count += traj.multiplicity
                if traj.contributed_to:
                    contributed += traj.multiplicity
        buckets.append((seat, rnd, count, contributed))
        previous = rnd
    tail_count = tail_contributed = 0
    for traj in record.trajectories:
        e = traj.exhausted_round
        if e is not None and e > previous:
            tail_count += traj.multiplicity
            if traj.contributed_to:
                tail_contributed += traj.multiplicity
    buckets.append((None, None, tail_count, tail_contributed))

    return ExhaustionReport(
        total_ballots=total,
        exhausted=exhausted,
        non_first_choice=non_first_choice,
        unrepresented=unrepresented,
        exhaustion_rate=pct(exhausted),
        non_first_choice_rate=pct(non_first_choice),
        unrepresented_rate=pct(unrepresented),
        weight_exhaustion_rate=weight_rate,
        effective_exhaustion=tuple(
            (threshold, effective_exhaustion(record, threshold)) for threshold in thresholds
        ),
        per_round=per_round,
        per_seat=tuple(SeatExhaustion(*bucket) for bucket in buckets),
    )


@dataclass(frozen=True)
class LengthStats:
    """How much of each ballot people fill in."""

    distribution: dict[int, float]
    short_rate: float
    complete_rate: float


def ballot_length_stats(profile: PreferenceProfile) -> LengthStats:
    """Length distribution plus the short (< seats) and complete shares.

    A ballot of length n or n - 1 is complete: ranking all but one
    candidate pins down the full ordering.
    """
    total = profile.total_voters
    counts = {length: 0 for length in range(1, profile.n + 1)}
    for ballot in profile.ballots:
        counts[len(ballot.ranking)] += ballot.multiplicity

    def pct(count: int) -> float:
        return 100.0 * count / total if total else 0.0

    short = sum(m for length, m in counts.items() if length < profile.seats)
    complete = sum(m for length, m in counts.items() if length >= profile.n - 1)
    return LengthStats(
        distribution={length: pct(m) for length, m in counts.items()},
        short_rate=pct(short),
        complete_rate=pct(complete),
    )


def rejected_rate(profile: PreferenceProfile) -> float:
    """Rejected ballots as a percentage of all ballots cast."""
    rejected = profile.metadata.rejected_count
    if rejected is None:
        raise MissingMetadata(
            f"profile {profile.metadata.source_id!r} has no rejected-ballot count"
        )
    cast = rejected + profile.total_voters
    return 100.0 * rejected / cast if cast else 0.0
