"""Regenerate the JSON fixtures from the real HTTP service.

The UI tests replay these files as stubbed fetch responses, so every
value they assert against is a verbatim service payload. Run from this
directory with the Python package installed:

    python3 capture.py

Uses the published-table precision (2 places, rounded) so the traced
weights match the numbers people have seen in print.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from stvflow import ElectionConfig, PAPER_PRECISION
from stvflow.service import ElectionStore, create_app

HERE = Path(__file__).resolve().parent

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


def save(name: str, response) -> None:
    (HERE / name).write_bytes(response.content)
    print(f"{name}: {response.status_code}, {len(response.content)} bytes")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        directory = Path(tmp)
        (directory / "ward-2017.blt").write_text(WARD_BLT)
        (directory / "alaska-2022.blt").write_text(ALASKA_BLT)
        store = ElectionStore(directory, ElectionConfig(precision=PAPER_PRECISION))
        client = TestClient(create_app(store))

        save("catalog.json", client.get("/elections"))
        save("summary.json", client.get("/elections/ward-2017"))
        save("rounds.json", client.get("/elections/ward-2017/rounds"))
        save(
            "trace.json",
            client.post(
                "/elections/ward-2017/trace",
                json={"ranking": ["Giusti", "McCrae", "Sloan", "Collings"]},
            ),
        )
        # Same picks with the last moved to the front; the editor's
        # reorder test swaps between this and the trace above.
        save(
            "trace-reordered.json",
            client.post(
                "/elections/ward-2017/trace",
                json={"ranking": ["Collings", "Giusti", "McCrae", "Sloan"]},
            ),
        )
        # A round-1 winner on their own: a single contribution row.
        save(
            "trace-scobie.json",
            client.post("/elections/ward-2017/trace", json={"ranking": ["Scobie"]}),
        )
        save("error-404.json", client.get("/elections/nowhere-2099"))


if __name__ == "__main__":
    main()
