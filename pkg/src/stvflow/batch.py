"""Batch analysis over a directory of ballot files.

Elections run independently (optionally across a bounded worker pool), are
merged in source-id order so output is deterministic, and failures are
isolated: one bad file lands in errors.csv while the rest complete. Rates
aggregate two ways: pooled over all ballots (the convention used for
headline figures) and as per-election means.
"""

from __future__ import annotations

import hashlib
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Any

from .ballots import load_profile
from .completion import quota_failure_analysis, run_completion
from .engine import ElectionConfig
from .exhaustion import MissingMetadata, ballot_length_stats, build_report, rejected_rate
from .export import to_json_bytes
from .fixedpoint import fmt
from .store import load_or_tabulate, scan_profiles

__all__ = ["BatchManifest", "BatchSummary", "run_batch", "derive_seed"]

ANALYSES = ("exhaustion", "lengths", "rejected", "quota_failure", "completion")


@dataclass(frozen=True)
class BatchManifest:
    """Everything a batch run needs; results are a pure function of it."""

    inputs: tuple[Path, ...]
    out_dir: Path
    config: ElectionConfig = field(default_factory=ElectionConfig)
    analyses: tuple[str, ...] = ANALYSES
    completion_models: tuple[str, ...] = ("l1", "l1l2", "prop")
    completion_seeds: tuple[int, ...] = (0,)
    seed: int = 0
    workers: int = 1
    use_cache: bool = True

    @classmethod
    def for_directory(cls, directory: str | Path, out_dir: str | Path, **kwargs) -> "BatchManifest":
        return cls(inputs=tuple(scan_profiles(directory)), out_dir=Path(out_dir), **kwargs)


@dataclass(frozen=True)
class BatchSummary:
    processed: int
    failed: int
    wall_time_s: float
    aggregates: dict[str, Any]
    out_dir: Path


def derive_seed(global_seed: int, source_id: str, salt: str = "") -> int:
    """Per-election seed: stable under reordering or re-running the batch."""
    digest = hashlib.sha256(f"{global_seed}:{source_id}:{salt}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _analyze_one(path: Path, manifest: BatchManifest) -> dict[str, Any]:
    source = path.stem
    try:
        profile = load_profile(path)
        cache = manifest.out_dir / ".cache" if manifest.use_cache else None
        record = load_or_tabulate(profile, manifest.config, cache)
        row: dict[str, Any] = {
            "source": source,
            "ward": profile.metadata.ward,
            "year": profile.metadata.year,
            "candidates": profile.n,
            "seats": record.seats,
            "ballots": record.total_ballots,
            "rounds": record.final_round,
            "winners": "|".join(record.candidate_by_id(w.candidate).name for w in record.winners),
        }
        result: dict[str, Any] = {"source": source, "row": row}
        if "exhaustion" in manifest.analyses:
            report = build_report(record)
            row.update(
                exhausted=report.exhausted,
                non_first_choice=report.non_first_choice,
                unrepresented=report.unrepresented,
                exhaustion_rate=round(report.exhaustion_rate, 4),
                non_first_choice_rate=round(report.non_first_choice_rate, 4),
                unrepresented_rate=round(report.unrepresented_rate, 4),
                weight_exhaustion_rate=round(report.weight_exhaustion_rate, 4),
            )
            row["exhausted_weight"] = fmt(record.exhausted_weight + record.residue)
            for threshold, count in report.effective_exhaustion:
                row[f"effective_le_{fmt(threshold)}"] = count
            result["per_round"] = [
                {
                    "source": source,
                    "round": r.round,
                    "exhausted_ballots": r.exhausted_ballots,
                    "exhausted_weight": fmt(r.exhausted_weight),
                    "pool_ballots": r.pool_ballots,
                    "pool_weight": fmt(r.pool_weight),
                }
                for r in report.per_round
            ]
            result["per_seat"] = [
                {
                    "source": source,
                    "seat": "post" if s.seat is None else s.seat,
                    "round": s.round,
                    "exhausted_ballots": s.exhausted_ballots,
                    "previously_contributed": s.previously_contributed,
                }
                for s in report.per_seat
            ]
        if "lengths" in manifest.analyses:
            lengths = ballot_length_stats(profile)
            row["short_rate"] = round(lengths.short_rate, 4)
            row["complete_rate"] = round(lengths.complete_rate, 4)
            result["length_counts"] = {
                length: round(pct * profile.total_voters / 100.0)
                for length, pct in lengths.distribution.items()
            }
        if "rejected" in manifest.analyses:
            try:
                row["rejected"] = profile.metadata.rejected_count
                row["rejected_rate"] = round(rejected_rate(profile), 4)
            except MissingMetadata:
                row["rejected"] = None
                row["rejected_rate"] = None
        if "quota_failure" in manifest.analyses:
            result["quota_failure"] = [
                {
                    "source": source,
                    "rule": rule.value,
                    "seats": failure.seats,
                    "winners_below_quota": failure.winners_below_quota,
                }
                for rule, failure in quota_failure_analysis(profile, manifest.config).items()
            ]
        if "completion" in manifest.analyses:
            rows = []
            for model in manifest.completion_models:
                seeds = manifest.completion_seeds if model == "l1l2" else (None,)
                for global_seed in seeds:
                    seed = 0 if global_seed is None else derive_seed(global_seed, source, model)
                    _, outcome = run_completion(profile, manifest.config, model, seed)
                    rows.append(
                        {
                            "source": source,
                            "model": model,
                            "seed": global_seed,
                            "seats_changed": outcome.seats_changed,
                            "gained": "|".join(
                                record.candidate_by_id(c).name for c in outcome.gained
                            ),
                            "lost": "|".join(
                                record.candidate_by_id(c).name for c in outcome.lost
                            ),
                            "party_swap_only": outcome.party_swap_only,
                        }
                    )
            result["completion"] = rows
        return result
    except Exception as exc:  # noqa: BLE001 - a bad file must not sink the batch
        return {"source": source, "error": f"{type(exc).__name__}: {exc}"}


def _write_csv(path: Path, rows: list[dict[str, Any]]) -> None:
    import csv

    if not rows:
        path.write_text("", encoding="utf-8")
        return
    fields: list[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def run_batch(manifest: BatchManifest) -> BatchSummary:
    """Run every analysis in the manifest and write the result files.

    Outputs in ``manifest.out_dir``: elections.csv, per_round.csv,
    per_seat.csv, quota_failure.csv, completion.csv, errors.csv, and
    aggregate.json. Returns the summary with pooled and mean aggregates.
    """
    start = time.perf_counter()
    manifest.out_dir.mkdir(parents=True, exist_ok=True)
    inputs = sorted(manifest.inputs, key=lambda p: p.stem)
    if manifest.workers > 1 and len(inputs) > 1:
        with ProcessPoolExecutor(max_workers=manifest.workers) as pool:
            results = list(pool.map(_analyze_one, inputs, [manifest] * len(inputs)))
    else:
        results = [_analyze_one(path, manifest) for path in inputs]
    results.sort(key=lambda r: r["source"])

    election_rows: list[dict[str, Any]] = []
    per_round: list[dict[str, Any]] = []
    per_seat: list[dict[str, Any]] = []
    quota_rows: list[dict[str, Any]] = []
    completion_rows: list[dict[str, Any]] = []
    errors: list[dict[str, Any]] = []
    length_counts: dict[int, int] = {}
    for result in results:
        if "error" in result:
            errors.append({"source": result["source"], "error": result["error"]})
            continue
        election_rows.append(result["row"])
        per_round.extend(result.get("per_round", ()))
        per_seat.extend(result.get("per_seat", ()))
        quota_rows.extend(result.get("quota_failure", ()))
        completion_rows.extend(result.get("completion", ()))
        for length, count in result.get("length_counts", {}).items():
            length_counts[length] = length_counts.get(length, 0) + count

    aggregates = _aggregate(election_rows, quota_rows, completion_rows, length_counts)
    _write_csv(manifest.out_dir / "elections.csv", election_rows)
    _write_csv(manifest.out_dir / "per_round.csv", per_round)
    _write_csv(manifest.out_dir / "per_seat.csv", per_seat)
    _write_csv(manifest.out_dir / "quota_failure.csv", quota_rows)
    _write_csv(manifest.out_dir / "completion.csv", completion_rows)
    _write_csv(manifest.out_dir / "errors.csv", errors)
    (manifest.out_dir / "aggregate.json").write_bytes(to_json_bytes(aggregates))

    return BatchSummary(
        processed=len(election_rows),
        failed=len(errors),
        wall_time_s=round(time.perf_counter() - start, 3),
        aggregates=aggregates,
        out_dir=manifest.out_dir,
    )


def _pct(count: float, total: float) -> float:
    return round(100.0 * count / total, 4) if total else 0.0


def _aggregate(
    election_rows: list[dict[str, Any]],
    quota_rows: list[dict[str, Any]],
    completion_rows: list[dict[str, Any]],
    length_counts: dict[int, int],
) -> dict[str, Any]:
    ballots = sum(row["ballots"] for row in election_rows)
    seats = sum(row["seats"] for row in election_rows)
    aggregates: dict[str, Any] = {
        "elections": len(election_rows),
        "seats": seats,
        "ballots": ballots,
    }
    if election_rows and "exhausted" in election_rows[0]:
        exhausted = sum(row["exhausted"] for row in election_rows)
        nfc = sum(row["non_first_choice"] for row in election_rows)
        unrep = sum(row["unrepresented"] for row in election_rows)
        weight = sum(Decimal(row["exhausted_weight"]) for row in election_rows)
        aggregates["exhaustion"] = {
            "pooled_exhaustion_rate": _pct(exhausted, ballots),
            "pooled_non_first_choice_rate": _pct(nfc, ballots),
            "pooled_unrepresented_rate": _pct(unrep, ballots),
            "pooled_weight_exhaustion_rate": _pct(float(weight), ballots),
            "non_first_choice_share_of_exhausted": _pct(nfc, exhausted),
            "unrepresented_share_of_exhausted": _pct(unrep, exhausted),
            "mean_exhaustion_rate": round(
                statistics.fmean(row["exhaustion_rate"] for row in election_rows), 4
            ),
            "median_exhaustion_rate": round(
                statistics.median(row["exhaustion_rate"] for row in election_rows), 4
            ),
            "median_unrepresented_rate": round(
                statistics.median(row["unrepresented_rate"] for row in election_rows), 4
            ),
            "effective_exhaustion_totals": {
                key.removeprefix("effective_le_"): sum(row[key] for row in election_rows)
                for key in election_rows[0]
                if key.startswith("effective_le_")
            },
        }
    if length_counts:
        aggregates["lengths"] = {
            "pooled_short_rate": _pct(
                sum(row.get("short_rate", 0.0) * row["ballots"] / 100.0 for row in election_rows),
                ballots,
            ),
            "pooled_complete_rate": _pct(
                sum(row.get("complete_rate", 0.0) * row["ballots"] / 100.0 for row in election_rows),
                ballots,
            ),
            "pooled_distribution": {
                str(length): _pct(count, ballots) for length, count in sorted(length_counts.items())
            },
        }
    rejected_rows = [row for row in election_rows if row.get("rejected") is not None]
    if rejected_rows:
        rejected = sum(row["rejected"] for row in rejected_rows)
        cast = sum(row["rejected"] + row["ballots"] for row in rejected_rows)
        by_year: dict[Any, list[float]] = {}
        for row in rejected_rows:
            by_year.setdefault(row.get("year"), []).append(row["rejected_rate"])
        aggregates["rejected"] = {
            "elections_with_counts": len(rejected_rows),
            "pooled_rejected_rate": _pct(rejected, cast),
            "median_rejected_rate": round(
                statistics.median(row["rejected_rate"] for row in rejected_rows), 4
            ),
            "median_rejected_rate_by_year": {
                str(year): round(statistics.median(rates), 4)
                for year, rates in sorted(by_year.items(), key=lambda kv: str(kv[0]))
            },
        }
    if quota_rows:
        per_rule: dict[str, dict[str, int]] = {}
        for row in quota_rows:
            stats = per_rule.setdefault(row["rule"], {"seats": 0, "below": 0, "elections": 0})
            stats["seats"] += row["seats"]
            stats["below"] += row["winners_below_quota"]
            stats["elections"] += 1 if row["winners_below_quota"] else 0
        aggregates["quota_failure"] = {
            rule: {
                "winners_below_quota": stats["below"],
                "share_of_seats": _pct(stats["below"], stats["seats"]),
                "elections_affected": stats["elections"],
            }
            for rule, stats in per_rule.items()
        }
    if completion_rows:
        by_model: dict[tuple[str, Any], dict[str, int]] = {}
        for row in completion_rows:
            stats = by_model.setdefault(
                (row["model"], row["seed"]),
                {"elections_changed": 0, "seats_changed": 0, "party_swaps": 0},
            )
            if row["seats_changed"]:
                stats["elections_changed"] += 1
                stats["seats_changed"] += row["seats_changed"]
                if row["party_swap_only"]:
                    stats["party_swaps"] += 1
        aggregates["completion"] = [
            {
                "model": model,
                "seed": seed,
                "elections_changed": stats["elections_changed"],
                "elections_changed_pct": _pct(stats["elections_changed"], len(election_rows)),
                "seats_changed": stats["seats_changed"],
                "seats_changed_pct": _pct(stats["seats_changed"], seats),
                "party_swap_only": stats["party_swaps"],
            }
            for (model, seed), stats in sorted(
                by_model.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))
            )
        ]
    return aggregates
