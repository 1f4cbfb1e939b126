"""Shared fixtures: real and engineered election profiles.

The Alaska profile is the published 2022 Special House preference profile.
The ward profile is engineered to reproduce the shape of the published
2017 Stranraer and the Rhins count (quota 1055, two round-1 winners with
transfer values 0.45 and 0.38, six rounds under the early stop) plus one
multi-preference ballot whose journey is fully known. The exact-quota
profile makes a candidate hit quota exactly mid-count so the zero-surplus
path is exercised.
"""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from stvflow import (
    Candidate,
    ElectionConfig,
    PAPER_PRECISION,
    PreferenceProfile,
    ProfileMetadata,
    RankedBallot,
    parse_profile,
    tabulate,
)

ALASKA_TYPES = (
    ((1, 2, 3), 27070),
    ((1, 3, 2), 15478),
    ((1,), 11262),
    ((2, 1, 3), 34078),
    ((2, 3, 1), 3659),
    ((2,), 21237),
    ((3, 1, 2), 47407),
    ((3, 2, 1), 4647),
    ((3,), 23733),
)

WARD_BLT = """\
8 4
1925 1 0
1702 2 0
1 2 7 4 8 0
765 3 0
312 4 0
181 5 0
166 6 0
123 7 0
95 8 0
0
"Scobie" "SNP"
"Giusti" "Labour"
"Surtees" "Conservative"
"Sloan" "SNP"
"Davidson" "Independent"
"McCutcheon" "Labour"
"McCrae" "Green"
"Collings" "Independent"
"Stranraer Test Ward 2017"
# rejected=117
# source=ward-2017
"""

ALASKA_BLT = """\
3 2
27070 1 2 3 0
15478 1 3 2 0
11262 1 0
34078 2 1 3 0
3659 2 3 1 0
21237 2 0
47407 3 1 2 0
4647 3 2 1 0
23733 3 0
0
"Begich" "Republican"
"Palin" "Republican"
"Peltola" "Democratic"
"Alaska Special 2022"
# rejected=441
# source=alaska-2022
"""

EXACT_QUOTA_TYPES = (
    ((1,), 20),
    ((1, 3), 10),
    ((2, 1), 4),
    ((2, 3), 6),
    ((2,), 10),
    ((3,), 26),
    ((4,), 24),
)


def make_profile(types, seats, names, parties=None, title="test", rejected=None):
    candidates = tuple(
        Candidate(i + 1, name, None if parties is None else parties[i])
        for i, name in enumerate(names)
    )
    return PreferenceProfile(
        candidates=candidates,
        seats=seats,
        ballots=tuple(RankedBallot(r, m) for r, m in types),
        metadata=ProfileMetadata(
            title=title, ward=None, year=None, rejected_count=rejected, source_id=title
        ),
    )


@pytest.fixture
def alaska():
    def build(seats: int) -> PreferenceProfile:
        return make_profile(
            ALASKA_TYPES,
            seats,
            ("Begich", "Palin", "Peltola"),
            parties=("Republican", "Republican", "Democratic"),
            title="alaska-2022",
        )

    return build


@pytest.fixture
def paper_config():
    return ElectionConfig(precision=PAPER_PRECISION)


@pytest.fixture
def ward_profile():
    return parse_profile(WARD_BLT, source_id="ward-2017")


@pytest.fixture
def ward_record(ward_profile, paper_config):
    return tabulate(ward_profile, paper_config)


@pytest.fixture
def exact_quota_profile():
    return make_profile(EXACT_QUOTA_TYPES, 2, ("Avery", "Blair", "Cato", "Dale"), title="exactq")


@pytest.fixture
def wards_dir(tmp_path):
    """Directory with two parseable elections, for batch and service tests."""
    (tmp_path / "alaska-2022.blt").write_text(ALASKA_BLT, encoding="utf-8")
    (tmp_path / "ward-2017.blt").write_text(WARD_BLT, encoding="utf-8")
    return tmp_path
