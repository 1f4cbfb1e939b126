"""Read-only HTTP API over a directory of tabulated elections.

Endpoints (all JSON):

    GET  /elections                      catalog
    GET  /elections/{id}                 summary
    GET  /elections/{id}/rounds          votes-by-round table
    GET  /elections/{id}/exhaustion      exhaustion report
    POST /elections/{id}/trace           body {"ranking": ["Name", ...]}
    GET  /elections/{id}/completion      ?model=l1|l1l2|prop&seed=K

Elections are tabulated when the directory is loaded (with an on-disk
cache) and never mutated afterwards; traces and completions work on copies
and per-request state only.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Response

from .ballots import PreferenceProfile
from .completion import COMPLETION_MODELS, run_completion
from .engine import ElectionConfig, TabulationRecord
from .exhaustion import ExhaustionReport, build_report
from .export import to_json_bytes, votes_by_round_rows
from .fixedpoint import fmt
from .store import load_election, scan_profiles
from .tracing import BallotTrace, UnknownCandidate, trace_ballot

__all__ = ["ElectionStore", "create_app", "exhaustion_payload", "trace_payload",
           "completion_payload", "rounds_payload", "summary_payload"]


class ElectionStore:
    """Immutable catalog of elections served by the API."""

    def __init__(
        self,
        directory: str | Path,
        config: ElectionConfig | None = None,
        cache_dir: str | Path | None = None,
    ):
        self.directory = Path(directory)
        self.config = config if config is not None else ElectionConfig()
        if cache_dir is None:
            cache_dir = self.directory / ".stvflow-cache"
        self.elections: dict[str, tuple[PreferenceProfile, TabulationRecord]] = {}
        for path in scan_profiles(self.directory):
            self.elections[path.stem] = load_election(path, self.config, cache_dir)

    def get(self, election_id: str) -> tuple[PreferenceProfile, TabulationRecord]:
        try:
            return self.elections[election_id]
        except KeyError:
            raise HTTPException(404, f"no election {election_id!r}") from None


def _names(record: TabulationRecord, ids) -> list[str]:
    return [record.candidate_by_id(cid).name for cid in ids]


def summary_payload(election_id: str, record: TabulationRecord) -> dict[str, Any]:
    return {
        "id": election_id,
        "title": record.metadata.title,
        "ward": record.metadata.ward,
        "year": record.metadata.year,
        "seats": record.seats,
        "quota": record.quota,
        "total_ballots": record.total_ballots,
        "rejected": record.metadata.rejected_count,
        "candidates": [
            {"id": c.id, "name": c.name, "party": c.party} for c in record.candidates
        ],
        "winners": [
            {
                "candidate": record.candidate_by_id(w.candidate).name,
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
    }


def rounds_payload(record: TabulationRecord) -> dict[str, Any]:
    rows = votes_by_round_rows(record)
    return {
        "quota": record.quota,
        "rounds": [event.round for event in record.events],
        "events": [
            {
                "round": event.round,
                "kind": event.kind.value,
                "candidate": (
                    None
                    if event.candidate is None
                    else record.candidate_by_id(event.candidate).name
                ),
                "transfer_value": (
                    None if event.transfer_value is None else fmt(event.transfer_value)
                ),
            }
            for event in record.events
        ],
        "table": rows,
    }


def exhaustion_payload(report: ExhaustionReport) -> dict[str, Any]:
    return {
        "total_ballots": report.total_ballots,
        "exhausted": report.exhausted,
        "non_first_choice": report.non_first_choice,
        "unrepresented": report.unrepresented,
        "exhaustion_rate": round(report.exhaustion_rate, 4),
        "non_first_choice_rate": round(report.non_first_choice_rate, 4),
        "unrepresented_rate": round(report.unrepresented_rate, 4),
        "weight_exhaustion_rate": round(report.weight_exhaustion_rate, 4),
        "effective_exhaustion": [
            {"threshold": fmt(threshold), "count": count}
            for threshold, count in report.effective_exhaustion
        ],
        "per_round": [
            {
                "round": r.round,
                "exhausted_ballots": r.exhausted_ballots,
                "exhausted_weight": fmt(r.exhausted_weight),
                "pool_ballots": r.pool_ballots,
                "pool_weight": fmt(r.pool_weight),
            }
            for r in report.per_round
        ],
        "per_seat": [
            {
                "seat": s.seat,
                "round": s.round,
                "exhausted_ballots": s.exhausted_ballots,
                "previously_contributed": s.previously_contributed,
            }
            for s in report.per_seat
        ],
    }


def trace_payload(record: TabulationRecord, trace: BallotTrace) -> dict[str, Any]:
    return {
        "ballot": _names(record, trace.ranking),
        "exhausted_round": trace.exhausted_round,
        "rows": [
            {
                "round": row.round,
                "counts_for": (
                    None if row.holder is None else record.candidate_by_id(row.holder).name
                ),
                "remaining": _names(record, row.remaining),
                "weight": fmt(row.weight),
                "contribution": (
                    None
                    if row.contribution is None
                    else {
                        "kind": row.contribution.kind,
                        "candidate": record.candidate_by_id(row.contribution.candidate).name,
                        "amount": fmt(row.contribution.amount),
                        "retained_fraction": (
                            None
                            if row.contribution.retained_fraction is None
                            else fmt(row.contribution.retained_fraction)
                        ),
                    }
                ),
            }
            for row in trace.rows
        ],
    }


def completion_payload(record: TabulationRecord, outcome) -> dict[str, Any]:
    return {
        "model": outcome.model,
        "seed": outcome.seed,
        "baseline_winners": _names(record, outcome.baseline_winners),
        "winners": _names(record, outcome.winners),
        "gained": _names(record, outcome.gained),
        "lost": _names(record, outcome.lost),
        "seats_changed": outcome.seats_changed,
        "party_swap_only": outcome.party_swap_only,
    }


def _json(payload: Any) -> Response:
    return Response(content=to_json_bytes(payload), media_type="application/json")


def create_app(store: ElectionStore) -> FastAPI:
    app = FastAPI(title="stvflow", docs_url=None, redoc_url=None)

    @app.get("/elections")
    def list_elections() -> Response:
        payload = [
            {
                "id": election_id,
                "title": record.metadata.title,
                "ward": record.metadata.ward,
                "year": record.metadata.year,
                "seats": record.seats,
                "candidates": [c.name for c in record.candidates],
            }
            for election_id, (_, record) in sorted(store.elections.items())
        ]
        return _json(payload)

    @app.get("/elections/{election_id}")
    def election_summary(election_id: str) -> Response:
        _, record = store.get(election_id)
        return _json(summary_payload(election_id, record))

    @app.get("/elections/{election_id}/rounds")
    def election_rounds(election_id: str) -> Response:
        _, record = store.get(election_id)
        return _json(rounds_payload(record))

    @app.get("/elections/{election_id}/exhaustion")
    def election_exhaustion(election_id: str) -> Response:
        _, record = store.get(election_id)
        return _json(exhaustion_payload(build_report(record)))

    @app.post("/elections/{election_id}/trace")
    def election_trace(election_id: str, body: dict) -> Response:
        _, record = store.get(election_id)
        ranking_names = body.get("ranking")
        if not isinstance(ranking_names, list) or not ranking_names:
            raise HTTPException(400, "body must carry a nonempty 'ranking' list of names")
        by_name = {c.name: c.id for c in record.candidates}
        ids = []
        for name in ranking_names:
            if name not in by_name:
                raise HTTPException(404, f"no candidate named {name!r}")
            ids.append(by_name[name])
        try:
            trace = trace_ballot(record, ids)
        except (UnknownCandidate, ValueError) as exc:
            raise HTTPException(400, str(exc)) from None
        return _json(trace_payload(record, trace))

    @app.get("/elections/{election_id}/completion")
    def election_completion(election_id: str, model: str = "l1", seed: int = 0) -> Response:
        profile, record = store.get(election_id)
        if model not in COMPLETION_MODELS:
            raise HTTPException(
                400, f"unknown model {model!r}; expected one of {list(COMPLETION_MODELS)}"
            )
        _, outcome = run_completion(profile, store.config, model, seed)
        return _json(completion_payload(record, outcome))

    return app
