"""Replay a single ballot, real or hypothetical, against a frozen count.

The trace answers "where did this ballot sit, at what weight, and what did
it help elect" for every round, without touching the record: the ballot is
walked through the recorded events exactly as the count would have moved
it. A contribution appears on the round during which the holder's surplus
was distributed (the last round the ballot still sat with them), and a
final-round contribution marks support for a winner at termination.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Sequence

from .engine import EventKind, TabulationRecord
from .fixedpoint import ONE

__all__ = ["UnknownCandidate", "Contribution", "TraceRow", "BallotTrace", "trace_ballot"]

_NEVER = 10**9


class UnknownCandidate(KeyError):
    """A traced ranking names a candidate the election does not have."""


@dataclass(frozen=True)
class Contribution:
    """Weight a ballot handed to a candidate's election.

    ``retained_fraction`` is 1 - transfer_value when the surplus was
    distributed, and None when the count ended first or the candidate was
    awarded at termination.
    """

    kind: str  # "elected" or "final_support"
    candidate: int
    amount: Decimal
    retained_fraction: Decimal | None = None


@dataclass(frozen=True)
class TraceRow:
    round: int
    holder: int | None
    remaining: tuple[int, ...]
    weight: Decimal
    contribution: Contribution | None = None


@dataclass(frozen=True)
class BallotTrace:
    ranking: tuple[int, ...]
    rows: tuple[TraceRow, ...]

    @property
    def exhausted_round(self) -> int | None:
        for row in self.rows:
            if row.holder is None:
                return row.round
        return None

    @property
    def final_weight(self) -> Decimal:
        return self.rows[-1].weight


def _next_continuing(
    ids: tuple[int, ...],
    position: int,
    event_round: int,
    elected_round: dict[int, int],
    departed_round: dict[int, int],
) -> int | None:
    """First candidate after ``position`` eligible to receive this transfer.

    Eligible means still in the count when the event fires (not the subject
    of any earlier event) and not declared elected in an earlier round.
    """
    for cid in ids[position + 1 :]:
        if departed_round.get(cid, _NEVER) < event_round:
            continue
        if elected_round.get(cid, _NEVER) < event_round:
            continue
        return cid
    return None


def trace_ballot(record: TabulationRecord, ranking: Sequence[int]) -> BallotTrace:
    """Trace one ballot through a finished count.

    Args:
        record: the frozen count to replay against.
        ranking: candidate ids, most preferred first. Any ranking over the
            election's candidates is allowed, cast or not.

    Returns:
        One row per round 1..final: the remaining ranking as a count sheet
        would show it (the holder first, candidates gone from the count
        dropped, candidates elected but undistributed still listed), the
        current weight, and any contribution.

    Raises:
        UnknownCandidate: a candidate id outside the election.
        ValueError: an empty or repeating ranking.
    """
    n = len(record.candidates)
    ids = tuple(ranking)
    if not ids:
        raise ValueError("ranking must name at least one candidate")
    for cid in ids:
        if not 1 <= cid <= n:
            raise UnknownCandidate(cid)
    if len(set(ids)) != len(ids):
        raise ValueError("ranking must not repeat a candidate")

    elected_round = {
        award.candidate: award.round for award in record.winners if award.by_quota
    }
    departed_round = {
        event.candidate: event.round
        for event in record.events
        if event.kind is not EventKind.INITIAL_COUNT
    }
    precision = record.config.precision
    final = record.final_round
    winners = record.winner_ids

    holder: int | None = ids[0]
    position = 0
    weight: Decimal = ONE
    rows: list[TraceRow] = []

    for rnd in range(1, final + 1):
        next_event = record.events[rnd] if rnd < final else None
        if holder is None:
            remaining: tuple[int, ...] = ()
        else:
            remaining = tuple(
                cid for cid in ids[position:] if departed_round.get(cid, _NEVER) > rnd
            )
        contribution = None
        if (
            next_event is not None
            and next_event.kind is EventKind.ELECTION
            and next_event.candidate == holder
        ):
            contribution = Contribution(
                "elected", holder, weight, ONE - next_event.transfer_value
            )
        elif next_event is None and holder is not None and holder in winners:
            if holder in elected_round:
                # Elected at quota but the count ended before distribution.
                contribution = Contribution("elected", holder, weight, None)
            else:
                contribution = Contribution("final_support", holder, weight, None)
        rows.append(TraceRow(rnd, holder, remaining, weight, contribution))

        if next_event is not None and holder is not None and next_event.candidate == holder:
            if next_event.kind is EventKind.ELECTION:
                weight = precision.quantize(weight * next_event.transfer_value)
            holder = _next_continuing(
                ids, position, next_event.round, elected_round, departed_round
            )
            if holder is not None:
                position = ids.index(holder)

    return BallotTrace(ranking=ids, rows=tuple(rows))
