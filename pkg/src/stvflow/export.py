"""Stable serialized views of counts: JSON documents and CSV tables.

Every numeric field is rendered at the precision the count was configured
with; the CLI and the HTTP service both emit payloads through
``to_json_bytes`` so identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
from decimal import Decimal
from typing import Any

from .ballots import Candidate, ProfileMetadata
from .engine import (
    BallotTrajectory,
    ElectionConfig,
    EventKind,
    RoundEvent,
    SeatAward,
    StoppingRule,
    TabulationRecord,
    Termination,
    TieEvent,
)
from .fixedpoint import Precision, fmt

__all__ = [
    "RECORD_FORMAT",
    "to_json_bytes",
    "record_to_dict",
    "record_from_dict",
    "votes_by_round_rows",
    "config_to_dict",
    "config_from_dict",
]

RECORD_FORMAT = "stvflow-record-v1"


def to_json_bytes(payload: Any) -> bytes:
    """Canonical JSON bytes shared by the CLI and the HTTP service."""
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _opt(value: Decimal | None) -> str | None:
    return None if value is None else fmt(value)


def config_to_dict(config: ElectionConfig) -> dict[str, Any]:
    return {
        "seats": config.seats,
        "places": config.precision.places,
        "mode": config.precision.mode,
        "stopping_rule": config.stopping_rule.value,
        "seed": config.seed,
        "quota_override": config.quota_override,
    }


def config_from_dict(data: dict[str, Any]) -> ElectionConfig:
    return ElectionConfig(
        seats=data.get("seats"),
        precision=Precision(places=data["places"], mode=data["mode"]),
        stopping_rule=StoppingRule.parse(data["stopping_rule"]),
        seed=data.get("seed", 0),
        quota_override=data.get("quota_override"),
    )


def record_to_dict(record: TabulationRecord) -> dict[str, Any]:
    """Full-fidelity document; record_from_dict inverts it."""
    meta = record.metadata
    return {
        "format": RECORD_FORMAT,
        "metadata": {
            "title": meta.title,
            "ward": meta.ward,
            "year": meta.year,
            "rejected": meta.rejected_count,
            "source": meta.source_id,
        },
        "candidates": [
            {"id": c.id, "name": c.name, "party": c.party} for c in record.candidates
        ],
        "seats": record.seats,
        "quota": record.quota,
        "total_ballots": record.total_ballots,
        "config": config_to_dict(record.config),
        "winners": [
            {
                "candidate": w.candidate,
                "seat": w.seat,
                "round": w.round,
                "by_quota": w.by_quota,
                "total": fmt(w.total),
            }
            for w in record.winners
        ],
        "termination": {
            "reason": record.termination.reason,
            "final_round": record.termination.final_round,
            "rule": record.termination.rule.value,
        },
        "events": [
            {
                "round": e.round,
                "kind": e.kind.value,
                "candidate": e.candidate,
                "total_at_event": _opt(e.total_at_event),
                "surplus": _opt(e.surplus),
                "transfer_value": _opt(e.transfer_value),
                "elected_in_round": e.elected_in_round,
                "totals": {str(cid): fmt(total) for cid, total in e.totals_after.items()},
                "exhausted_ballots": e.exhausted_ballots,
                "exhausted_weight": fmt(e.exhausted_weight),
                "residue": fmt(e.residue),
                "pool_ballots": e.pool_ballots,
                "pool_weight": fmt(e.pool_weight),
            }
            for e in record.events
        ],
        "exhausted_ballots": record.exhausted_ballots,
        "exhausted_weight": fmt(record.exhausted_weight),
        "residue": fmt(record.residue),
        "tie_rounds": [
            {"round": t.round, "context": t.context, "candidates": list(t.candidates)}
            for t in record.tie_rounds
        ],
        "trajectories": [
            {
                "ranking": list(t.ranking),
                "multiplicity": t.multiplicity,
                "steps": [
                    [rnd, holder, fmt(weight)] for rnd, holder, weight in t.steps
                ],
                "contributed_to": list(t.contributed_to),
            }
            for t in record.trajectories
        ],
    }


def record_from_dict(data: dict[str, Any]) -> TabulationRecord:
    if data.get("format") != RECORD_FORMAT:
        raise ValueError(f"not a {RECORD_FORMAT} document")
    meta = data["metadata"]
    return TabulationRecord(
        candidates=tuple(
            Candidate(c["id"], c["name"], c.get("party")) for c in data["candidates"]
        ),
        seats=data["seats"],
        quota=data["quota"],
        total_ballots=data["total_ballots"],
        config=config_from_dict(data["config"]),
        metadata=ProfileMetadata(
            title=meta.get("title", ""),
            ward=meta.get("ward", ""),
            year=meta.get("year"),
            rejected_count=meta.get("rejected"),
            source_id=meta.get("source", ""),
        ),
        events=tuple(
            RoundEvent(
                round=e["round"],
                kind=EventKind(e["kind"]),
                totals_after={int(cid): Decimal(v) for cid, v in e["totals"].items()},
                candidate=e.get("candidate"),
                total_at_event=_dec(e.get("total_at_event")),
                surplus=_dec(e.get("surplus")),
                transfer_value=_dec(e.get("transfer_value")),
                elected_in_round=e.get("elected_in_round"),
                exhausted_ballots=e["exhausted_ballots"],
                exhausted_weight=Decimal(e["exhausted_weight"]),
                residue=Decimal(e["residue"]),
                pool_ballots=e["pool_ballots"],
                pool_weight=Decimal(e["pool_weight"]),
            )
            for e in data["events"]
        ),
        winners=tuple(
            SeatAward(
                candidate=w["candidate"],
                seat=w["seat"],
                round=w["round"],
                by_quota=w["by_quota"],
                total=Decimal(w["total"]),
            )
            for w in data["winners"]
        ),
        termination=Termination(
            reason=data["termination"]["reason"],
            final_round=data["termination"]["final_round"],
            rule=StoppingRule.parse(data["termination"]["rule"]),
        ),
        trajectories=tuple(
            BallotTrajectory(
                ranking=tuple(t["ranking"]),
                multiplicity=t["multiplicity"],
                steps=tuple(
                    (rnd, holder, Decimal(weight)) for rnd, holder, weight in t["steps"]
                ),
                contributed_to=tuple(t["contributed_to"]),
            )
            for t in data["trajectories"]
        ),
        exhausted_ballots=data["exhausted_ballots"],
        exhausted_weight=Decimal(data["exhausted_weight"]),
        residue=Decimal(data["residue"]),
        tie_rounds=tuple(
            TieEvent(t["round"], t["context"], tuple(t["candidates"]))
            for t in data["tie_rounds"]
        ),
    )


def _dec(value: str | None) -> Decimal | None:
    return None if value is None else Decimal(value)


def _last_shown_round(record: TabulationRecord, cid: int) -> int:
    """Published-table convention: a candidate's column ends at the round

    they reach quota (later rounds blank even while the surplus is pending)
    or the round before their elimination; survivors run to the end.
    """
    for award in record.winners:
        if award.candidate == cid and award.by_quota:
            return award.round
    for event in record.events:
        if event.kind is EventKind.ELIMINATION and event.candidate == cid:
            return event.round - 1
    return record.final_round


def votes_by_round_rows(record: TabulationRecord) -> list[list[str]]:
    """Votes-by-round table: candidate rows, then quota and exhaustion rows.

    The exhausted-ballot and exhausted-weight rows are cumulative, matching
    the running non-transferable row of published count sheets.
    """
    rounds = [event.round for event in record.events]
    rows: list[list[str]] = [["candidate"] + [f"round_{r}" for r in rounds]]
    for cand in record.candidates:
        last = _last_shown_round(record, cand.id)
        row = [cand.name]
        for event in record.events:
            if event.round <= last and cand.id in event.totals_after:
                row.append(fmt(event.totals_after[cand.id]))
            else:
                row.append("")
        rows.append(row)
    rows.append(["quota"] + [str(record.quota)] * len(rounds))
    exhausted_b = 0
    exhausted_w = Decimal(0)
    ballots_row, weight_row = ["exhausted_ballots"], ["exhausted_weight"]
    for event in record.events:
        exhausted_b += event.exhausted_ballots
        exhausted_w += event.exhausted_weight
        ballots_row.append(str(exhausted_b))
        weight_row.append(fmt(exhausted_w))
    rows.append(ballots_row)
    rows.append(weight_row)
    return rows
