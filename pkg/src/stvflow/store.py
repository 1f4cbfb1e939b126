"""Loading elections from disk, with a digest-keyed tabulation cache.

A cache entry is keyed by the profile digest and the config digest, so
re-serving or re-analyzing a directory never re-counts an election unless
the ballots or the counting options changed.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .ballots import PreferenceProfile, load_profile, write_profile
from .engine import ElectionConfig, TabulationRecord, tabulate
from .export import config_to_dict, record_from_dict, record_to_dict, to_json_bytes

__all__ = [
    "profile_digest",
    "config_digest",
    "scan_profiles",
    "load_or_tabulate",
]


def profile_digest(profile: PreferenceProfile) -> str:
    return hashlib.sha256(write_profile(profile).encode("utf-8")).hexdigest()


def config_digest(config: ElectionConfig) -> str:
    canonical = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def scan_profiles(directory: str | Path) -> list[Path]:
    """Ballot files in a directory, in stable source-id order."""
    return sorted(Path(directory).glob("*.blt"), key=lambda p: p.stem)


def load_or_tabulate(
    profile: PreferenceProfile,
    config: ElectionConfig,
    cache_dir: str | Path | None = None,
) -> TabulationRecord:
    """Tabulate a profile, reusing a cached record when digests match."""
    if cache_dir is None:
        return tabulate(profile, config)
    cache_dir = Path(cache_dir)
    key = f"{profile_digest(profile)[:20]}-{config_digest(config)[:12]}.json"
    path = cache_dir / key
    if path.exists():
        return record_from_dict(json.loads(path.read_text(encoding="utf-8")))
    record = tabulate(profile, config)
    cache_dir.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(to_json_bytes(record_to_dict(record)))
    tmp.replace(path)
    return record


def load_election(path: str | Path, config: ElectionConfig,
                  cache_dir: str | Path | None = None) -> tuple[PreferenceProfile, TabulationRecord]:
    profile = load_profile(path)
    return profile, load_or_tabulate(profile, config, cache_dir)
