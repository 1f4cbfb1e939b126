"""Single transferable vote counting with weighted inclusive surplus transfers.

The count follows the Scottish local-government procedure. The quota is
floor(ballots / (seats + 1)) + 1, computed in exact integer arithmetic. The
initial count is round 1; every later round applies exactly one event to the
standing totals: either the largest pending surplus is distributed, or (when
no candidate holds a pending surplus) the active candidate with the fewest
votes is eliminated. A candidate whose total meets the quota is declared
elected immediately and stops receiving transfers, but their surplus waits
its turn in the queue, so two candidates crossing quota in the same round
distribute in consecutive rounds, largest total first.

A surplus distribution multiplies the weight of every ballot the elected
candidate holds by (total - quota) / total, quantized per the configured
precision, and passes each ballot to its next continuing candidate. An
eliminated candidate's ballots move at their current weight. Ballots with no
continuing candidate left become exhausted. The weight lost to quantization
at each surplus is tracked explicitly so that active weight, retained
quotas, exhausted weight, and residue always sum to the ballot count.

Three stopping rules are supported, checked after every round:

* ``early``: stop once, sorting active candidates by descending total, the
  candidates below position k (k = seats still open) sum to strictly less
  than the total at position k. The top k are awarded.
* ``one-extra``: apply the same test only when exactly k + 1 candidates
  remain active.
* ``exact``: run until the active candidates exactly fill the open seats.

All rules stop as soon as every seat is filled at quota, and all award the
remaining active candidates when exactly k remain. The mathematical tests
are deferred while any surplus is pending, since an undistributed surplus
could still reorder the tail.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from typing import Mapping, Sequence

from .ballots import Candidate, PreferenceProfile, ProfileMetadata
from .fixedpoint import ONE, ZERO, Precision

__all__ = [
    "StoppingRule",
    "ElectionConfig",
    "ConfigError",
    "EventKind",
    "RoundEvent",
    "SeatAward",
    "Termination",
    "TieEvent",
    "BallotTrajectory",
    "TabulationRecord",
    "compute_quota",
    "surplus_transfer_value",
    "check_termination",
    "rank_tied",
    "break_tie",
    "tabulate",
]


class ConfigError(ValueError):
    """An election configuration that cannot be run."""


class StoppingRule(Enum):
    EARLY_MATHEMATICAL = "early"
    UNTIL_ONE_EXTRA = "one-extra"
    UNTIL_EXACT = "exact"

    @classmethod
    def parse(cls, text: str) -> "StoppingRule":
        for rule in cls:
            if rule.value == text:
                return rule
        raise ConfigError(f"unknown stopping rule {text!r}; expected one of "
                          f"{[r.value for r in cls]}")


@dataclass(frozen=True)
class ElectionConfig:
    """Everything that can vary about how a profile is counted.

    Attributes:
        seats: override for the profile's seat count (None = use profile).
        precision: decimal places and rounding mode for weights and totals.
        stopping_rule: when the count ends and who gets awarded.
        seed: feeds the deterministic draw used for otherwise unbroken ties.
        quota_override: fixed quota instead of the computed one.
    """

    seats: int | None = None
    precision: Precision = field(default_factory=Precision)
    stopping_rule: StoppingRule = StoppingRule.EARLY_MATHEMATICAL
    seed: int = 0
    quota_override: int | None = None


class EventKind(Enum):
    INITIAL_COUNT = "initial_count"
    ELECTION = "election"
    ELIMINATION = "elimination"


@dataclass(frozen=True)
class RoundEvent:
    """One column of the votes-by-round table.

    ``totals_after`` holds the standing total of every candidate that still
    holds ballots after this round's event: active candidates plus those
    elected but awaiting surplus distribution. Round 1 is the initial count;
    for later rounds ``kind`` describes the event that produced the totals.
    """

    round: int
    kind: EventKind
    totals_after: dict[int, Decimal]
    candidate: int | None = None
    total_at_event: Decimal | None = None
    surplus: Decimal | None = None
    transfer_value: Decimal | None = None
    elected_in_round: int | None = None
    exhausted_ballots: int = 0
    exhausted_weight: Decimal = ZERO
    residue: Decimal = ZERO
    pool_ballots: int = 0
    pool_weight: Decimal = ZERO


@dataclass(frozen=True)
class SeatAward:
    """One seat: who earned it, in which round, and at what recorded total.

    ``total`` is the total at election for quota winners and the final
    standing total for candidates awarded by the stopping rule.
    """

    candidate: int
    seat: int
    round: int
    by_quota: bool
    total: Decimal


@dataclass(frozen=True)
class Termination:
    reason: str
    final_round: int
    rule: StoppingRule


@dataclass(frozen=True)
class TieEvent:
    round: int
    context: str
    candidates: tuple[int, ...]


@dataclass(frozen=True)
class BallotTrajectory:
    """Where one merged ballot group sat, round by round.

    ``steps`` records (round, holder, weight) at round 1 and at every round
    where the group moved; the holder is None once the group is exhausted.
    ``contributed_to`` lists candidates whose quota this group's weight was
    part of when they were declared elected.
    """

    ranking: tuple[int, ...]
    multiplicity: int
    steps: tuple[tuple[int, int | None, Decimal], ...]
    contributed_to: tuple[int, ...] = ()

    @property
    def final_holder(self) -> int | None:
        return self.steps[-1][1]

    @property
    def final_weight(self) -> Decimal:
        return self.steps[-1][2]

    @property
    def exhausted_round(self) -> int | None:
        for rnd, holder, _ in self.steps:
            if holder is None:
                return rnd
        return None

    def state_at(self, rnd: int) -> tuple[int | None, Decimal]:
        """Holder and weight during the given displayed round."""
        holder, weight = self.steps[0][1], self.steps[0][2]
        for step_round, step_holder, step_weight in self.steps:
            if step_round > rnd:
                break
            holder, weight = step_holder, step_weight
        return holder, weight


@dataclass(frozen=True)
class TabulationRecord:
    """The full frozen outcome of one count."""

    candidates: tuple[Candidate, ...]
    seats: int
    quota: int
    total_ballots: int
    config: ElectionConfig
    metadata: ProfileMetadata
    events: tuple[RoundEvent, ...]
    winners: tuple[SeatAward, ...]
    termination: Termination
    trajectories: tuple[BallotTrajectory, ...]
    exhausted_ballots: int
    exhausted_weight: Decimal
    residue: Decimal
    tie_rounds: tuple[TieEvent, ...] = ()

    @property
    def final_round(self) -> int:
        return self.termination.final_round

    @property
    def winner_ids(self) -> frozenset[int]:
        return frozenset(award.candidate for award in self.winners)

    def candidate_by_id(self, cid: int) -> Candidate:
        return self.candidates[cid - 1]

    def final_standing_totals(self) -> dict[int, Decimal]:
        """Final weight credited to each non-eliminated candidate.

        Quota winners whose surplus was distributed stand at exactly the
        quota; winners elected but never distributed keep their full pile;
        active candidates keep their last totals. Together with exhausted
        weight and quantization residue these sum to the ballot count.
        """
        standing = dict(self.events[-1].totals_after)
        for event in self.events:
            if event.kind is EventKind.ELECTION:
                standing[event.candidate] = Decimal(self.quota)
        return standing


def compute_quota(total_ballots: int, seats: int) -> int:
    """Droop quota: floor(ballots / (seats + 1)) + 1, exact in integers."""
    if total_ballots < 0:
        raise ValueError(f"ballot count must be >= 0, got {total_ballots}")
    if seats < 1:
        raise ValueError(f"seats must be >= 1, got {seats}")
    return total_ballots // (seats + 1) + 1


def surplus_transfer_value(total: Decimal | int, quota: int, precision: Precision) -> Decimal:
    """Fraction of each ballot's weight passed on: (total - quota) / total."""
    total = Decimal(total)
    if total <= 0:
        raise ValueError(f"total at election must be positive, got {total}")
    if total < quota:
        raise ValueError(f"total {total} is below the quota {quota}")
    return precision.quantize((total - Decimal(quota)) / total)


def rank_tied(
    candidates: Sequence[int],
    history: Sequence[Mapping[int, Decimal]],
    seed: int,
) -> list[int]:
    """Order candidates best-first by totals, scanning backward on ties.

    The primary key is the current-round total, then each earlier round in
    turn. Candidates identical across every round are ordered by a
    deterministic seeded draw, so the same seed always gives the same order.
    """
    def totals_key(cid: int) -> tuple[Decimal, ...]:
        return tuple(snapshot.get(cid, ZERO) for snapshot in reversed(history))

    groups: dict[tuple[Decimal, ...], list[int]] = {}
    for cid in candidates:
        groups.setdefault(totals_key(cid), []).append(cid)
    ordered: list[int] = []
    for key in sorted(groups, reverse=True):
        group = sorted(groups[key])
        if len(group) > 1:
            rng = random.Random(f"{seed}:{','.join(map(str, group))}")
            rng.shuffle(group)
        ordered.extend(group)
    return ordered


def break_tie(
    candidates: Sequence[int],
    history: Sequence[Mapping[int, Decimal]],
    seed: int,
) -> int:
    """The tied candidate ranked highest (an elimination removes the lowest)."""
    return rank_tied(candidates, history, seed)[0]


def check_termination(
    totals: Mapping[int, Decimal],
    seats_remaining: int,
    rule: StoppingRule,
) -> tuple[int, ...] | None:
    """Decide whether a state ends the count, and who gets the open seats.

    Args:
        totals: standing totals of the active candidates only.
        seats_remaining: seats not yet filled.
        rule: stopping rule in force.

    Returns:
        The awarded candidates in descending-total order, or None to
        continue. The mathematical test awards only on a strict inequality,
        so a tie across the seat boundary never stops the count.
    """
    active = sorted(totals, key=lambda cid: (-totals[cid], cid))
    k = seats_remaining
    if len(active) <= k:
        return tuple(active)
    if rule is StoppingRule.UNTIL_EXACT:
        return None
    if rule is StoppingRule.UNTIL_ONE_EXTRA and len(active) != k + 1:
        return None
    tail = sum((totals[cid] for cid in active[k:]), ZERO)
    if tail < totals[active[k - 1]]:
        return tuple(active[:k])
    return None


def tabulate(profile: PreferenceProfile, config: ElectionConfig | None = None) -> TabulationRecord:
    """Run one full count and freeze everything about it.

    Args:
        profile: the election to count.
        config: counting options; defaults to 5-place truncation with the
            early mathematical stopping rule and seed 0.

    Returns:
        A TabulationRecord holding the per-round events, seat awards,
        termination, per-ballot-group trajectories, and the exhausted-weight
        and quantization-residue ledgers.

    Raises:
        ConfigError: seats or quota overrides that cannot be applied.
    """
    if config is None:
        config = ElectionConfig()
    seats = config.seats if config.seats is not None else profile.seats
    if not 1 <= seats <= profile.n:
        raise ConfigError(f"seats must be in [1, {profile.n}], got {seats}")
    total_ballots = profile.total_voters
    if config.quota_override is not None:
        if config.quota_override < 1:
            raise ConfigError(f"quota override must be >= 1, got {config.quota_override}")
        quota = config.quota_override
    else:
        quota = compute_quota(total_ballots, seats)
    precision = config.precision
    quota_dec = Decimal(quota)

    types = profile.ballots
    mult = [ballot.multiplicity for ballot in types]
    mult_dec = [Decimal(m) for m in mult]
    rankings = [ballot.ranking for ballot in types]

    weight: list[Decimal] = [ONE] * len(types)
    position: list[int] = [0] * len(types)
    holder: list[int | None] = [ranking[0] for ranking in rankings]
    steps: list[list[tuple[int, int | None, Decimal]]] = [
        [(1, h, ONE)] for h in holder
    ]
    contributed: list[set[int]] = [set() for _ in types]

    ACTIVE, ELECTED, ELIMINATED = 0, 1, 2
    status = {cand.id: ACTIVE for cand in profile.candidates}
    piles: dict[int, list[int]] = {cand.id: [] for cand in profile.candidates}
    totals: dict[int, Decimal] = {cand.id: ZERO for cand in profile.candidates}
    for t, h in enumerate(holder):
        piles[h].append(t)
        totals[h] += mult_dec[t]

    seats_remaining = seats
    pending: list[int] = []
    awards: list[SeatAward] = []
    ties: list[TieEvent] = []
    events: list[RoundEvent] = []
    history: list[dict[int, Decimal]] = []
    exhausted_ballots_total = 0
    exhausted_weight_total = ZERO
    residue_total = ZERO

    def snapshot() -> dict[int, Decimal]:
        return dict(totals)

    def declare_elected(rnd: int) -> None:
        nonlocal seats_remaining
        at_quota = [cid for cid, st in status.items()
                    if st == ACTIVE and totals[cid] >= quota_dec]
        if not at_quota:
            return
        ranked = rank_tied(at_quota, history, config.seed)
        if len(ranked) > seats_remaining > 0:
            # more at quota than seats: a dead heat at the cut is a real tie
            cut = totals[ranked[seats_remaining - 1]]
            if totals[ranked[seats_remaining]] == cut:
                ties.append(TieEvent(rnd, "declaration",
                                     tuple(c for c in ranked if totals[c] == cut)))
        for cid in ranked:
            if seats_remaining == 0:
                break
            status[cid] = ELECTED
            seats_remaining -= 1
            pending.append(cid)
            awards.append(SeatAward(cid, len(awards) + 1, rnd, True, totals[cid]))
            for t in piles[cid]:
                if weight[t] > ZERO:
                    contributed[t].add(cid)

    def next_continuing(t: int) -> int | None:
        ranking = rankings[t]
        for i in range(position[t] + 1, len(ranking)):
            if status[ranking[i]] == ACTIVE:
                position[t] = i
                return ranking[i]
        return None

    def move_pile(cid: int, rnd: int, transfer_value: Decimal | None) -> RoundEvent:
        """Empty a pile: reweight (surplus only) and pass ballots along."""
        nonlocal exhausted_ballots_total, exhausted_weight_total, residue_total
        total_at_event = totals[cid]
        exhausted_here = 0
        exhausted_w = ZERO
        pool_ballots = 0
        pool_weight = ZERO
        for t in piles[cid]:
            if transfer_value is not None:
                weight[t] = precision.quantize(weight[t] * transfer_value)
            moved = mult_dec[t] * weight[t]
            pool_ballots += mult[t]
            pool_weight += moved
            dest = next_continuing(t)
            holder[t] = dest
            if dest is None:
                exhausted_here += mult[t]
                exhausted_w += moved
            else:
                piles[dest].append(t)
                totals[dest] += moved
            steps[t].append((rnd, dest, weight[t]))
        piles[cid] = []
        del totals[cid]
        exhausted_ballots_total += exhausted_here
        exhausted_weight_total += exhausted_w
        if transfer_value is not None:
            surplus = total_at_event - quota_dec
            residue = surplus - pool_weight
            residue_total += residue
            kind = EventKind.ELECTION
        else:
            surplus = None
            residue = ZERO
            kind = EventKind.ELIMINATION
        return RoundEvent(
            round=rnd,
            kind=kind,
            totals_after=snapshot(),
            candidate=cid,
            total_at_event=total_at_event,
            surplus=surplus,
            transfer_value=transfer_value,
            exhausted_ballots=exhausted_here,
            exhausted_weight=exhausted_w,
            residue=residue,
            pool_ballots=pool_ballots,
            pool_weight=pool_weight,
        )

    events.append(RoundEvent(round=1, kind=EventKind.INITIAL_COUNT, totals_after=snapshot()))
    history.append(events[0].totals_after)
    declare_elected(1)

    rnd = 1
    termination: Termination | None = None
    while termination is None:
        active = [cid for cid, st in status.items() if st == ACTIVE]
        if seats_remaining == 0:
            termination = Termination("all_seats_filled_by_quota", rnd, config.stopping_rule)
            break
        if len(active) <= seats_remaining:
            for cid in rank_tied(active, history, config.seed):
                awards.append(SeatAward(cid, len(awards) + 1, rnd, False, totals[cid]))
            termination = Termination("active_equals_seats", rnd, config.stopping_rule)
            break
        if not pending:
            awarded = check_termination(
                {cid: totals[cid] for cid in active}, seats_remaining, config.stopping_rule
            )
            if awarded is not None:
                for cid in rank_tied(awarded, history, config.seed):
                    awards.append(SeatAward(cid, len(awards) + 1, rnd, False, totals[cid]))
                termination = Termination("mathematical_stop", rnd, config.stopping_rule)
                break

        rnd += 1
        if pending:
            order = rank_tied(pending, history, config.seed)
            chosen = order[0]
            if len(pending) > 1 and totals[order[1]] == totals[chosen]:
                ties.append(TieEvent(rnd, "surplus_order",
                                     tuple(c for c in order if totals[c] == totals[chosen])))
            pending.remove(chosen)
            tv = surplus_transfer_value(totals[chosen], quota, precision)
            event = move_pile(chosen, rnd, tv)
            event = _with_elected_round(event, awards)
        else:
            order = rank_tied(active, history, config.seed)
            chosen = order[-1]
            low = totals[chosen]
            if len(order) > 1 and totals[order[-2]] == low:
                ties.append(TieEvent(rnd, "elimination",
                                     tuple(c for c in order if totals[c] == low)))
            event = move_pile(chosen, rnd, None)
            status[chosen] = ELIMINATED
        events.append(event)
        history.append(event.totals_after)
        declare_elected(rnd)

    return TabulationRecord(
        candidates=profile.candidates,
        seats=seats,
        quota=quota,
        total_ballots=total_ballots,
        config=config,
        metadata=profile.metadata,
        events=tuple(events),
        winners=tuple(awards),
        termination=termination,
        trajectories=tuple(
            BallotTrajectory(rankings[t], mult[t], tuple(steps[t]), tuple(sorted(contributed[t])))
            for t in range(len(types))
        ),
        exhausted_ballots=exhausted_ballots_total,
        exhausted_weight=exhausted_weight_total,
        residue=residue_total,
        tie_rounds=tuple(ties),
    )


def _with_elected_round(event: RoundEvent, awards: list[SeatAward]) -> RoundEvent:
    elected_round = next(
        award.round for award in awards
        if award.candidate == event.candidate and award.by_quota
    )
    return RoundEvent(
        round=event.round,
        kind=event.kind,
        totals_after=event.totals_after,
        candidate=event.candidate,
        total_at_event=event.total_at_event,
        surplus=event.surplus,
        transfer_value=event.transfer_value,
        elected_in_round=elected_round,
        exhausted_ballots=event.exhausted_ballots,
        exhausted_weight=event.exhausted_weight,
        residue=event.residue,
        pool_ballots=event.pool_ballots,
        pool_weight=event.pool_weight,
    )
