"""Command-line interface.

Five subcommands: ``tabulate`` (one election, votes-by-round CSV),
``analyze`` (directory batch), ``complete`` (counterfactual ballot
completion), ``trace`` (follow one preference order through the count),
and ``serve`` (read-only HTTP API). JSON written here goes through the
same serializer as the HTTP service, so the two are byte-identical.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import click

from .ballots import ParseError, load_profile, write_profile
from .batch import ANALYSES, BatchManifest, run_batch
from .completion import COMPLETION_MODELS, run_completion
from .engine import ConfigError, ElectionConfig, StoppingRule, tabulate
from .export import record_to_dict, to_json_bytes, votes_by_round_rows
from .fixedpoint import Precision, fmt
from .tracing import UnknownCandidate, trace_ballot


def _config_options(fn):
    for option in reversed(
        [
            click.option("--seats", type=int, default=None, help="Override the seat count from the file."),
            click.option(
                "--places",
                type=click.IntRange(2, 9),
                default=5,
                show_default=True,
                help="Decimal places kept in transfer arithmetic.",
            ),
            click.option(
                "--mode",
                type=click.Choice(["truncate", "round"]),
                default="truncate",
                show_default=True,
                help="How values are cut to --places.",
            ),
            click.option(
                "--stop",
                type=click.Choice([rule.value for rule in StoppingRule]),
                default=StoppingRule.EARLY_MATHEMATICAL.value,
                show_default=True,
                help="When the count may end before candidates reach quota.",
            ),
            click.option("--seed", type=int, default=0, show_default=True, help="Tie-break seed."),
            click.option("--quota", type=int, default=None, help="Override the computed quota."),
        ]
    ):
        fn = option(fn)
    return fn


def _build_config(seats, places, mode, stop, seed, quota) -> ElectionConfig:
    try:
        return ElectionConfig(
            seats=seats,
            precision=Precision(places=places, mode=mode),
            stopping_rule=StoppingRule.parse(stop),
            seed=seed,
            quota_override=quota,
        )
    except (ConfigError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc


def _load(path: Path):
    try:
        return load_profile(path)
    except ParseError as exc:
        raise click.ClickException(f"{path}: {exc}") from exc


@click.group()
def main() -> None:
    """Scottish-rules STV tabulation and ballot-exhaustion analysis."""


@main.command("tabulate")
@click.argument("profile_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@_config_options
@click.option(
    "--record",
    "record_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Also write the full tabulation record as JSON.",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the CSV here instead of stdout.",
)
def tabulate_command(profile_path, seats, places, mode, stop, seed, quota, record_path, out):
    """Count one election and print its votes-by-round table as CSV."""
    profile = _load(profile_path)
    config = _build_config(seats, places, mode, stop, seed, quota)
    try:
        record = tabulate(profile, config)
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    rows = votes_by_round_rows(record)
    handle = out.open("w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        csv.writer(handle).writerows(rows)
    finally:
        if out:
            handle.close()
    if record_path:
        record_path.write_bytes(to_json_bytes(record_to_dict(record)))
    winners = ", ".join(record.candidate_by_id(w.candidate).name for w in record.winners)
    click.echo(f"quota={record.quota} rounds={record.final_round} elected: {winners}", err=True)


@main.command()
@click.argument("input_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("out_dir", type=click.Path(file_okay=False, path_type=Path))
@_config_options
@click.option(
    "--analyses",
    default=",".join(ANALYSES),
    show_default=True,
    help="Comma-separated subset of: " + ", ".join(ANALYSES) + ".",
)
@click.option(
    "--models",
    default=",".join(COMPLETION_MODELS),
    show_default=True,
    help="Completion models to run when the completion analysis is on.",
)
@click.option(
    "--completion-seeds",
    default="0",
    show_default=True,
    help="Comma-separated global seeds for the coin-flip completion model.",
)
@click.option("--workers", type=click.IntRange(1, None), default=1, show_default=True)
@click.option("--no-cache", is_flag=True, help="Re-tabulate even when a cached record exists.")
def analyze(input_dir, out_dir, seats, places, mode, stop, seed, quota, analyses, models, completion_seeds, workers, no_cache):
    """Analyze every .blt file in a directory and write CSV/JSON results.

    Exits nonzero when any election fails or the directory has no ballot
    files; the healthy subset is still written either way.
    """
    chosen = tuple(name for name in analyses.split(",") if name)
    unknown = [name for name in chosen if name not in ANALYSES]
    if unknown:
        raise click.ClickException(f"unknown analyses: {', '.join(unknown)}")
    chosen_models = tuple(name for name in models.split(",") if name)
    unknown = [name for name in chosen_models if name not in COMPLETION_MODELS]
    if unknown:
        raise click.ClickException(f"unknown completion models: {', '.join(unknown)}")
    try:
        seeds = tuple(int(part) for part in completion_seeds.split(",") if part)
    except ValueError as exc:
        raise click.ClickException(f"bad --completion-seeds value: {exc}") from exc
    manifest = BatchManifest.for_directory(
        input_dir,
        out_dir,
        config=_build_config(seats, places, mode, stop, seed, quota),
        analyses=chosen,
        completion_models=chosen_models,
        completion_seeds=seeds or (0,),
        seed=seed,
        workers=workers,
        use_cache=not no_cache,
    )
    summary = run_batch(manifest)
    click.echo(
        to_json_bytes(
            {
                "processed": summary.processed,
                "failed": summary.failed,
                "wall_time_s": summary.wall_time_s,
                "out_dir": str(summary.out_dir),
                "aggregates": summary.aggregates,
            }
        ).decode("utf-8"),
        nl=False,
    )
    if summary.failed or not summary.processed:
        raise SystemExit(1)


@main.command()
@click.argument("profile_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@_config_options
@click.option("--model", type=click.Choice(COMPLETION_MODELS), required=True)
@click.option(
    "--write-completed",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the completed ballot file here.",
)
def complete(profile_path, seats, places, mode, stop, seed, quota, model, write_completed):
    """Rerun one election with hypothetically completed ballots.

    Prints a JSON outcome comparing the counterfactual winners with the
    baseline. --seed feeds both tie-breaking and the coin-flip model.
    """
    profile = _load(profile_path)
    config = _build_config(seats, places, mode, stop, seed, quota)
    completed, outcome = run_completion(profile, config, model, seed)
    name = profile.candidate_by_id
    payload = {
        "model": outcome.model,
        "seed": outcome.seed,
        "baseline_winners": [name(c).name for c in outcome.baseline_winners],
        "winners": [name(c).name for c in outcome.winners],
        "gained": [name(c).name for c in outcome.gained],
        "lost": [name(c).name for c in outcome.lost],
        "seats_changed": outcome.seats_changed,
        "party_swap_only": outcome.party_swap_only,
    }
    click.echo(to_json_bytes(payload).decode("utf-8"), nl=False)
    if write_completed:
        write_completed.write_text(write_profile(completed), encoding="utf-8")


@main.command()
@click.argument("profile_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@_config_options
@click.option("--ballot", required=True, help='Preference order, e.g. "Giusti > McCrae > Sloan".')
def trace(profile_path, seats, places, mode, stop, seed, quota, ballot):
    """Follow one preference order through the count, round by round."""
    profile = _load(profile_path)
    config = _build_config(seats, places, mode, stop, seed, quota)
    names = [part.strip() for part in ballot.split(">") if part.strip()]
    if not names:
        raise click.ClickException("--ballot needs at least one candidate name")
    ranking = []
    for name in names:
        try:
            ranking.append(profile.candidate_by_name(name).id)
        except KeyError:
            raise click.ClickException(f"unknown candidate: {name!r}") from None
    record = tabulate(profile, config)
    try:
        traced = trace_ballot(record, tuple(ranking))
    except (UnknownCandidate, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc

    label = record.candidate_by_id
    table = [("round", "counts for", "weight", "still listed", "note")]
    for row in traced.rows:
        note = ""
        if row.contribution is not None:
            c = row.contribution
            note = f"{c.kind.replace('_', ' ')}: {fmt(c.amount)} to {label(c.candidate).name}"
            if c.retained_fraction is not None:
                note += f" (keeps {fmt(c.retained_fraction)})"
        table.append(
            (
                str(row.round),
                label(row.holder).name if row.holder is not None else "exhausted",
                fmt(row.weight),
                " > ".join(label(c).name for c in row.remaining),
                note,
            )
        )
    widths = [max(len(line[col]) for line in table) for col in range(4)]
    for line in table:
        left = "  ".join(line[col].ljust(widths[col]) for col in range(4)).rstrip()
        click.echo(f"{left}  {line[4]}".rstrip())
    if traced.exhausted_round is not None:
        click.echo(f"exhausted in round {traced.exhausted_round}", err=True)


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False, path_type=Path))
@_config_options
@click.option("--bind", default="127.0.0.1:8000", show_default=True, help="host:port to listen on.")
@click.option(
    "--cache-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Where tabulation records are cached (default: <directory>/.stvflow-cache).",
)
def serve(directory, seats, places, mode, stop, seed, quota, bind, cache_dir):
    """Serve the read-only HTTP API over a directory of ballot files."""
    import uvicorn

    from .service import ElectionStore, create_app

    config = _build_config(seats, places, mode, stop, seed, quota)
    try:
        store = ElectionStore(directory, config=config, cache_dir=cache_dir)
    except ParseError as exc:
        raise click.ClickException(str(exc)) from exc
    host, _, port = bind.partition(":")
    uvicorn.run(create_app(store), host=host or "127.0.0.1", port=int(port or "8000"))


if __name__ == "__main__":
    main()
