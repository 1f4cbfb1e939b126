"""Ranked-ballot profiles: domain types, file parsing, and serialization.

Profile file format (UTF-8 text, one record per line):

    <n> <S>                                   header: candidates, seats
    <multiplicity> <id1> <id2> ... <idk> 0    one line per ballot group
    0                                         end of the ballot section
    "Candidate Name" ["Party"]                n lines, in candidate-id order
    "Election title"
    # rejected=<count>                        optional trailer lines
    # source=<id>

Candidate ids are 1-based positions into the name list. Ballot lines with
identical rankings are merged on parse by summing multiplicities; first
appearance order is preserved. Parse failures always name the 1-based line
they occurred on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

__all__ = [
    "Candidate",
    "RankedBallot",
    "ProfileMetadata",
    "PreferenceProfile",
    "ParseError",
    "EmptyProfileError",
    "parse_profile",
    "write_profile",
    "load_profile",
    "normalize_marks",
]


class ParseError(ValueError):
    """A profile file that does not follow the format.

    Attributes:
        line: 1-based line number the failure was detected on.
        reason: short human-readable description.
    """

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class EmptyProfileError(ParseError):
    """A structurally valid file that contains no ballots."""


@dataclass(frozen=True)
class Candidate:
    id: int
    name: str
    party: str | None = None


@dataclass(frozen=True)
class RankedBallot:
    """A group of identical ballots: ranking most-preferred first."""

    ranking: tuple[int, ...]
    multiplicity: int = 1

    def __post_init__(self) -> None:
        if not self.ranking:
            raise ValueError("ballot ranking must be nonempty")
        if len(set(self.ranking)) != len(self.ranking):
            raise ValueError("ballot ranking must not repeat a candidate")
        if self.multiplicity < 1:
            raise ValueError("ballot multiplicity must be >= 1")


@dataclass(frozen=True)
class ProfileMetadata:
    title: str = ""
    ward: str = ""
    year: int | None = None
    rejected_count: int | None = None
    source_id: str = ""


@dataclass(frozen=True)
class PreferenceProfile:
    """An election's candidates, seat count, and merged ballot groups."""

    candidates: tuple[Candidate, ...]
    seats: int
    ballots: tuple[RankedBallot, ...]
    metadata: ProfileMetadata = field(default_factory=ProfileMetadata)

    def __post_init__(self) -> None:
        n = len(self.candidates)
        ids = [c.id for c in self.candidates]
        if ids != list(range(1, n + 1)):
            raise ValueError("candidate ids must be contiguous starting at 1")
        names = [c.name for c in self.candidates]
        if len(set(names)) != n:
            raise ValueError("candidate names must be unique")
        if not 1 <= self.seats <= n:
            raise ValueError(f"seats must be in [1, {n}], got {self.seats}")
        for ballot in self.ballots:
            for cid in ballot.ranking:
                if not 1 <= cid <= n:
                    raise ValueError(f"ballot ranks unknown candidate id {cid}")

    @property
    def n(self) -> int:
        return len(self.candidates)

    @property
    def total_voters(self) -> int:
        return sum(b.multiplicity for b in self.ballots)

    def candidate_by_id(self, cid: int) -> Candidate:
        return self.candidates[cid - 1]

    def candidate_by_name(self, name: str) -> Candidate:
        for c in self.candidates:
            if c.name == name:
                return c
        raise KeyError(name)


_QUOTED = re.compile(r'^"([^"]*)"(?:\s+"([^"]*)")?\s*$')
_TRAILER = re.compile(r"^#\s*(rejected|source)\s*=\s*(.*?)\s*$")
_YEAR = re.compile(r"\b(19\d{2}|20\d{2})\b")


def _merge_ballots(raw: Iterable[RankedBallot]) -> tuple[RankedBallot, ...]:
    merged: dict[tuple[int, ...], int] = {}
    for ballot in raw:
        merged[ballot.ranking] = merged.get(ballot.ranking, 0) + ballot.multiplicity
    return tuple(RankedBallot(r, m) for r, m in merged.items())


def _derive_ward_year(title: str) -> tuple[str, int | None]:
    match = _YEAR.search(title)
    if not match:
        return title.strip(), None
    ward = " ".join((title[: match.start()] + title[match.end() :]).split())
    return ward or title.strip(), int(match.group(1))


def parse_profile(text: str, source_id: str | None = None) -> PreferenceProfile:
    """Parse a profile file into a PreferenceProfile.

    Args:
        text: full file contents.
        source_id: identifier recorded in metadata; defaults to the title.

    Raises:
        ParseError: malformed content, with the offending 1-based line.
        EmptyProfileError: well-formed file containing zero ballots.
    """
    lines = text.splitlines()
    # (line_number, content) with blank lines skipped; numbering stays 1-based.
    items = [(i + 1, line.strip()) for i, line in enumerate(lines) if line.strip()]
    if not items:
        raise ParseError(1, "empty file")
    pos = 0

    def take() -> tuple[int, str]:
        nonlocal pos
        if pos >= len(items):
            last = items[-1][0] if items else 1
            raise ParseError(last + 1, "unexpected end of file")
        item = items[pos]
        pos += 1
        return item

    lineno, header = take()
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(lineno, "header must be '<candidates> <seats>'")
    try:
        n, seats = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(lineno, "header must contain two integers") from None
    if n < 1:
        raise ParseError(lineno, f"candidate count must be >= 1, got {n}")
    if not 1 <= seats <= n:
        raise ParseError(lineno, f"seats must be in [1, {n}], got {seats}")

    raw_ballots: list[RankedBallot] = []
    while True:
        lineno, line = take()
        if line == "0":
            break
        try:
            numbers = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(lineno, f"ballot line is not whitespace-separated integers: {line!r}") from None
        if numbers[-1] != 0:
            raise ParseError(lineno, "ballot line must end with 0")
        if len(numbers) < 3:
            raise ParseError(lineno, "ballot line must rank at least one candidate")
        mult, ranking = numbers[0], numbers[1:-1]
        if mult < 1:
            raise ParseError(lineno, f"ballot multiplicity must be >= 1, got {mult}")
        seen: set[int] = set()
        for cid in ranking:
            if not 1 <= cid <= n:
                raise ParseError(lineno, f"candidate id {cid} out of range 1..{n}")
            if cid in seen:
                raise ParseError(lineno, f"candidate id {cid} ranked twice")
            seen.add(cid)
        raw_ballots.append(RankedBallot(tuple(ranking), mult))

    candidates: list[Candidate] = []
    names: set[str] = set()
    for cid in range(1, n + 1):
        lineno, line = take()
        match = _QUOTED.match(line)
        if not match:
            raise ParseError(lineno, f'expected quoted candidate name, got {line!r}')
        name, party = match.group(1), match.group(2)
        if not name:
            raise ParseError(lineno, "candidate name must be nonempty")
        if name in names:
            raise ParseError(lineno, f"duplicate candidate name {name!r}")
        names.add(name)
        candidates.append(Candidate(cid, name, party))

    lineno, line = take()
    match = _QUOTED.match(line)
    if not match or match.group(2) is not None:
        raise ParseError(lineno, f"expected quoted election title, got {line!r}")
    title = match.group(1)

    rejected: int | None = None
    source = source_id
    while pos < len(items):
        lineno, line = take()
        match = _TRAILER.match(line)
        if not match:
            raise ParseError(lineno, f"unexpected content after title: {line!r}")
        key, value = match.group(1), match.group(2)
        if key == "rejected":
            try:
                rejected = int(value)
            except ValueError:
                raise ParseError(lineno, f"rejected count must be an integer, got {value!r}") from None
            if rejected < 0:
                raise ParseError(lineno, f"rejected count must be >= 0, got {rejected}")
        elif source is None:
            source = value

    if not raw_ballots:
        raise EmptyProfileError(lineno, "profile contains no ballots")

    ward, year = _derive_ward_year(title)
    meta = ProfileMetadata(
        title=title,
        ward=ward,
        year=year,
        rejected_count=rejected,
        source_id=source if source is not None else title,
    )
    return PreferenceProfile(tuple(candidates), seats, _merge_ballots(raw_ballots), meta)


def write_profile(profile: PreferenceProfile) -> str:
    """Serialize a profile; parse_profile(write_profile(p)) reproduces p."""
    out: list[str] = [f"{profile.n} {profile.seats}"]
    for ballot in profile.ballots:
        out.append(f"{ballot.multiplicity} {' '.join(map(str, ballot.ranking))} 0")
    out.append("0")
    for cand in profile.candidates:
        if cand.party is not None:
            out.append(f'"{cand.name}" "{cand.party}"')
        else:
            out.append(f'"{cand.name}"')
    out.append(f'"{profile.metadata.title}"')
    if profile.metadata.rejected_count is not None:
        out.append(f"# rejected={profile.metadata.rejected_count}")
    if profile.metadata.source_id and profile.metadata.source_id != profile.metadata.title:
        out.append(f"# source={profile.metadata.source_id}")
    return "\n".join(out) + "\n"


def load_profile(path: str | Path) -> PreferenceProfile:
    """Read a profile file; the file stem becomes the source id."""
    path = Path(path)
    return parse_profile(path.read_text(encoding="utf-8"), source_id=path.stem)


def normalize_marks(marks: Mapping[int, int]) -> RankedBallot | None:
    """Turn raw per-candidate rank marks into a ballot, or reject it.

    Mirrors Scottish counting guidance: a ballot needs a unique lowest mark
    to be valid (otherwise it is rejected and None is returned); gaps in the
    rank sequence are compressed; the ranking is cut at the first rank that
    two candidates share.

    Args:
        marks: candidate id -> rank mark (lower is more preferred).

    Returns:
        The normalized ballot with multiplicity 1, or None if rejected.
    """
    if not marks:
        return None
    by_rank: dict[int, list[int]] = {}
    for cid, rank in marks.items():
        by_rank.setdefault(rank, []).append(cid)
    ordered = sorted(by_rank.items())
    first_rank, first_group = ordered[0]
    if len(first_group) != 1:
        return None
    ranking: list[int] = []
    for _, group in ordered:
        if len(group) > 1:
            break
        ranking.append(group[0])
    return RankedBallot(tuple(ranking))
