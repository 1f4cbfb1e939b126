"""Counterfactual ballot completion: what if voters had ranked further?

Three models extend truncated ballots and the election is re-run to see
whether the winner set moves:

* strongest-loser: append the strongest loser to every ballot that does not
  already rank them;
* two-losers: append whichever of the two strongest losers is missing; when
  both are missing, each ballot instance appends them in an order drawn
  from a seeded coin flip;
* proportional: walk lengths 1 .. n-1, splitting each short ballot among
  the continuations observed in the original profile (a ballot ranked
  A alone splits among A > B, A > C, ... in proportion to how often voters
  who ranked A first continued with each), using largest-remainder shares
  so multiplicities stay integral. Extended ballots re-enter the next pass;
  a prefix nobody ever continued stays as it is.

Every output ballot extends its input ballot as a prefix, and the total
number of ballots never changes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .ballots import PreferenceProfile, RankedBallot, _merge_ballots
from .engine import ElectionConfig, EventKind, StoppingRule, TabulationRecord, rank_tied, tabulate

__all__ = [
    "NoLosers",
    "SeatsMismatch",
    "CompletionOutcome",
    "QuotaFailure",
    "COMPLETION_MODELS",
    "rank_losers",
    "complete_l1",
    "complete_l1_l2",
    "complete_proportional",
    "largest_remainder",
    "diff_winners",
    "run_completion",
    "quota_failure_analysis",
]

COMPLETION_MODELS = ("l1", "l1l2", "prop")


class NoLosers(ValueError):
    """Every candidate won, so there is no loser to append."""


class SeatsMismatch(ValueError):
    """Two counts that cannot be compared seat for seat."""


@dataclass(frozen=True)
class CompletionOutcome:
    """How a counterfactual count differs from the baseline."""

    model: str | None
    seed: int | None
    baseline_winners: tuple[int, ...]
    winners: tuple[int, ...]
    gained: tuple[int, ...]
    lost: tuple[int, ...]
    seats_changed: int
    party_swap_only: bool


@dataclass(frozen=True)
class QuotaFailure:
    seats: int
    winners_below_quota: int


def rank_losers(record: TabulationRecord) -> tuple[int, ...]:
    """Losers ordered strongest first by their final recorded totals.

    An eliminated candidate's recorded total is their total at elimination;
    a candidate still standing at termination uses their final total. Ties
    fall back to the backward scan and seeded draw the engine uses.

    Raises:
        NoLosers: when every candidate won a seat.
    """
    winners = record.winner_ids
    recorded: dict[int, object] = {}
    for event in record.events:
        if event.kind is EventKind.ELIMINATION:
            recorded[event.candidate] = event.total_at_event
    for cid, total in record.events[-1].totals_after.items():
        if cid not in winners:
            recorded[cid] = total
    losers = [cand.id for cand in record.candidates if cand.id not in winners]
    if not losers:
        raise NoLosers("every candidate was awarded a seat")
    history = [event.totals_after for event in record.events]
    by_total: dict[object, list[int]] = {}
    for cid in losers:
        by_total.setdefault(recorded[cid], []).append(cid)
    ordered: list[int] = []
    for total in sorted(by_total, reverse=True):  # type: ignore[arg-type]
        group = by_total[total]
        ordered.extend(rank_tied(group, history, record.config.seed) if len(group) > 1 else group)
    return tuple(ordered)


def _append_missing(ballot: RankedBallot, extra: Sequence[int]) -> RankedBallot:
    missing = tuple(cid for cid in extra if cid not in ballot.ranking)
    if not missing:
        return ballot
    return RankedBallot(ballot.ranking + missing, ballot.multiplicity)


def complete_l1(profile: PreferenceProfile, record: TabulationRecord) -> PreferenceProfile:
    """Append the strongest loser to every ballot not already ranking them."""
    strongest = rank_losers(record)[0]
    completed = [_append_missing(ballot, (strongest,)) for ballot in profile.ballots]
    return replace(profile, ballots=_merge_ballots(completed))


def complete_l1_l2(
    profile: PreferenceProfile, record: TabulationRecord, seed: int = 0
) -> PreferenceProfile:
    """Append the two strongest losers; unranked pairs get a coin-flip order.

    Each ballot instance that ranks neither loser draws its own order from
    a generator seeded once for the whole profile, so the result is
    deterministic for a given seed and profile.
    """
    losers = rank_losers(record)
    if len(losers) == 1:
        # Two-seat race with three candidates and the like: nothing to flip.
        return complete_l1(profile, record)
    first, second = losers[0], losers[1]
    rng = random.Random(f"l1l2:{seed}")
    completed: list[RankedBallot] = []
    for ballot in profile.ballots:
        has_first = first in ballot.ranking
        has_second = second in ballot.ranking
        if has_first and has_second:
            completed.append(ballot)
        elif has_first:
            completed.append(_append_missing(ballot, (second,)))
        elif has_second:
            completed.append(_append_missing(ballot, (first,)))
        else:
            heads = sum(rng.random() < 0.5 for _ in range(ballot.multiplicity))
            if heads:
                completed.append(RankedBallot(ballot.ranking + (first, second), heads))
            if ballot.multiplicity - heads:
                completed.append(
                    RankedBallot(ballot.ranking + (second, first), ballot.multiplicity - heads)
                )
    return replace(profile, ballots=_merge_ballots(completed))


def largest_remainder(count: int, weights: Mapping[int, int]) -> dict[int, int]:
    """Split ``count`` items proportionally to integer weights.

    Exact quotas are floored, then leftover items go to the largest
    remainders; equal remainders favour the smaller key, so the split is
    deterministic. The shares always sum to ``count``.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    total = sum(weights.values())
    if total <= 0:
        raise ValueError("weights must sum to a positive total")
    shares: dict[int, int] = {}
    remainders: list[tuple[Fraction, int]] = []
    assigned = 0
    for key in sorted(weights):
        exact = Fraction(count * weights[key], total)
        base = int(exact)
        shares[key] = base
        assigned += base
        remainders.append((exact - base, key))
    remainders.sort(key=lambda item: (-item[0], item[1]))
    for _, key in remainders[: count - assigned]:
        shares[key] += 1
    return shares


def complete_proportional(profile: PreferenceProfile) -> PreferenceProfile:
    """Extend short ballots along the continuations voters actually used."""
    continuations: dict[tuple[int, ...], dict[int, int]] = {}
    for ballot in profile.ballots:
        ranking = ballot.ranking
        for length in range(1, len(ranking)):
            nxt = continuations.setdefault(ranking[:length], {})
            nxt[ranking[length]] = nxt.get(ranking[length], 0) + ballot.multiplicity

    settled: list[RankedBallot] = []
    working = list(profile.ballots)
    for length in range(1, profile.n):
        current = [b for b in working if len(b.ranking) == length]
        working = [b for b in working if len(b.ranking) != length]
        for ballot in current:
            observed = continuations.get(ballot.ranking)
            if not observed:
                settled.append(ballot)
                continue
            for cid, share in largest_remainder(ballot.multiplicity, observed).items():
                if share:
                    working.append(RankedBallot(ballot.ranking + (cid,), share))
    settled.extend(working)
    return replace(profile, ballots=_merge_ballots(settled))


def _party_key(record: TabulationRecord, cid: int) -> tuple[str, int]:
    party = record.candidate_by_id(cid).party
    if party is None or party.strip().lower() == "independent":
        # Independents are singleton parties: two of them never match.
        return ("", cid)
    return (party, 0)


def diff_winners(baseline: TabulationRecord, other: TabulationRecord) -> CompletionOutcome:
    """Compare two counts of the same election seat for seat.

    Raises:
        SeatsMismatch: different candidate sets or seat counts.
    """
    if baseline.candidates != other.candidates:
        raise SeatsMismatch("counts cover different candidate sets")
    if baseline.seats != other.seats:
        raise SeatsMismatch(
            f"counts award different seat totals: {baseline.seats} vs {other.seats}"
        )
    old = baseline.winner_ids
    new = other.winner_ids
    gained = tuple(sorted(new - old))
    lost = tuple(sorted(old - new))
    seats_changed = len(gained)
    swap = False
    if seats_changed:
        gained_parties = sorted(_party_key(other, cid) for cid in gained)
        lost_parties = sorted(_party_key(baseline, cid) for cid in lost)
        swap = gained_parties == lost_parties
    return CompletionOutcome(
        model=None,
        seed=None,
        baseline_winners=tuple(award.candidate for award in baseline.winners),
        winners=tuple(award.candidate for award in other.winners),
        gained=gained,
        lost=lost,
        seats_changed=seats_changed,
        party_swap_only=swap,
    )


def run_completion(
    profile: PreferenceProfile,
    config: ElectionConfig,
    model: str,
    seed: int = 0,
) -> tuple[PreferenceProfile, CompletionOutcome]:
    """Complete a profile under one model, re-count, and diff the winners."""
    baseline = tabulate(profile, config)
    if model == "l1":
        completed = complete_l1(profile, baseline)
    elif model == "l1l2":
        completed = complete_l1_l2(profile, baseline, seed)
    elif model == "prop":
        completed = complete_proportional(profile)
    else:
        raise ValueError(f"unknown completion model {model!r}; expected one of {COMPLETION_MODELS}")
    outcome = diff_winners(baseline, tabulate(completed, config))
    return completed, replace(outcome, model=model, seed=seed if model == "l1l2" else None)


def quota_failure_analysis(
    profile: PreferenceProfile, config: ElectionConfig | None = None
) -> dict[StoppingRule, QuotaFailure]:
    """Count winners awarded below quota under each stopping rule."""
    if config is None:
        config = ElectionConfig()
    results: dict[StoppingRule, QuotaFailure] = {}
    for rule in StoppingRule:
        record = tabulate(profile, replace(config, stopping_rule=rule))
        below = sum(1 for award in record.winners if award.total < record.quota)
        results[rule] = QuotaFailure(seats=len(record.winners), winners_below_quota=below)
    return results
