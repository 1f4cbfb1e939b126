// The fixtures under ./fixtures are verbatim responses captured from the
// running HTTP service (see fixtures/capture.py), so everything asserted
// here is checked against real service payloads, not hand-typed values.

import { beforeEach, describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { Api, ApiError, ElectionSummary, RoundsTable, Trace } from "../src/api.js";
import { describeContribution, init } from "../src/app.js";

// vitest runs with the package directory as cwd
const fixture = (name: string) =>
  readFileSync(join(process.cwd(), "test", "fixtures", name), "utf8");
const fixtureJson = <T>(name: string): T => JSON.parse(fixture(name));

const WARD_RANKING = ["Giusti", "McCrae", "Sloan", "Collings"];

interface Stub {
  api: Api;
  calls: string[][];
  signals: (AbortSignal | undefined)[];
}

function makeStub(overrides: Partial<Api> = {}): Stub {
  const calls: string[][] = [];
  const signals: (AbortSignal | undefined)[] = [];
  const api: Api = {
    catalog: async () => fixtureJson("catalog.json"),
    summary: async (id) => {
      if (id !== "ward-2017") throw new ApiError(404, `no election '${id}'`);
      return fixtureJson<ElectionSummary>("summary.json");
    },
    rounds: async (id) => {
      if (id !== "ward-2017") throw new ApiError(404, `no election '${id}'`);
      return fixtureJson<RoundsTable>("rounds.json");
    },
    trace: async (_id, ranking, signal) => {
      calls.push([...ranking]);
      signals.push(signal);
      const key = ranking.join(">");
      if (key === WARD_RANKING.join(">")) return fixtureJson<Trace>("trace.json");
      if (key === "Collings>Giusti>McCrae>Sloan")
        return fixtureJson<Trace>("trace-reordered.json");
      // any other (partial) ranking: shape-correct filler
      return fixtureJson<Trace>("trace-scobie.json");
    },
    ...overrides,
  };
  return { api, calls, signals };
}

const settle = async () => {
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
};

async function mount(api: Api): Promise<HTMLElement> {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  await init(root, api);
  return root;
}

async function selectElection(root: HTMLElement, id: string) {
  const select = root.querySelector("#election") as HTMLSelectElement;
  select.value = id;
  select.dispatchEvent(new Event("change"));
  await settle();
}

async function addPick(root: HTMLElement, name: string) {
  (root.querySelector("#pick") as HTMLSelectElement).value = name;
  (root.querySelector("#add") as HTMLButtonElement).click();
  await settle();
}

function pickButton(root: HTMLElement, index: number, act: string): HTMLButtonElement {
  return root.querySelector(
    `#picks button[data-act="${act}"][data-idx="${index}"]`,
  ) as HTMLButtonElement;
}

const traceCells = (root: HTMLElement) =>
  [...root.querySelectorAll("#trace tbody tr")].map((tr) =>
    [...tr.querySelectorAll("td")].map((td) => td.textContent ?? ""),
  );

// textContent of the whole tree glues adjacent cells together ("0.62"+"3"),
// so collect text nodes individually for token-level checks
function displayedText(root: HTMLElement): string {
  const parts: string[] = [];
  const walk = (node: Node) => {
    if (node.nodeType === Node.TEXT_NODE) parts.push(node.nodeValue ?? "");
    node.childNodes.forEach(walk);
  };
  walk(root);
  return parts.join(" ");
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("catalog and election context", () => {
  it("lists every election from the service", async () => {
    const root = await mount(makeStub().api);
    const options = [...root.querySelectorAll("#election option")];
    expect(options.map((o) => o.textContent)).toEqual([
      "— choose —",
      "Alaska Special 2022",
      "Stranraer Test Ward 2017",
    ]);
  });

  it("shows quota, seats, winners, and the votes-by-round table on select", async () => {
    const root = await mount(makeStub().api);
    await selectElection(root, "ward-2017");

    const facts = root.querySelector("#context-facts")!.textContent!;
    expect(facts).toContain("4 seats");
    expect(facts).toContain("quota 1055");
    expect(facts).toContain("5270 ballots");
    expect(facts).toContain("117 rejected");

    const winners = [...root.querySelectorAll("#context-winners li")];
    expect(winners).toHaveLength(4);
    expect(winners[0].textContent).toContain("Scobie — 1925 votes");
    expect(winners[3].textContent).toContain("Sloan — 312.38 votes");

    // rendered table mirrors the payload cell for cell
    const rounds = fixtureJson<RoundsTable>("rounds.json");
    const rendered = [...root.querySelectorAll("#rounds tr")].map((tr) =>
      [...tr.querySelectorAll("th, td")].map((cell) => cell.textContent),
    );
    expect(rendered).toEqual(rounds.table);
  });

  it("surfaces an unknown election inline and disables the editor", async () => {
    const stub = makeStub();
    const withGhost = makeStub({
      catalog: async () => [
        ...(await stub.api.catalog()),
        { id: "ghost-1999", title: "Ghost 1999", ward: null, year: null, seats: 1, candidates: [] },
      ],
    });
    const root = await mount(withGhost.api);

    await selectElection(root, "ghost-1999");
    const error = root.querySelector("#error") as HTMLElement;
    expect(error.hidden).toBe(false);
    expect(error.textContent).toBe("no election 'ghost-1999'");
    expect((root.querySelector("#pick") as HTMLSelectElement).disabled).toBe(true);
    expect((root.querySelector("#add") as HTMLButtonElement).disabled).toBe(true);

    // a working selection recovers
    await selectElection(root, "ward-2017");
    expect(error.hidden).toBe(true);
    expect((root.querySelector("#pick") as HTMLSelectElement).disabled).toBe(false);
  });
});

describe("journey rendering", () => {
  it("renders the published four-column journey verbatim from the service payload", async () => {
    const stub = makeStub();
    const root = await mount(stub.api);
    await selectElection(root, "ward-2017");
    for (const name of WARD_RANKING) await addPick(root, name);

    const payload = fixtureJson<Trace>("trace.json");
    const rows = traceCells(root);
    expect(rows).toHaveLength(payload.rows.length);
    payload.rows.forEach((row, i) => {
      expect(rows[i][0]).toBe(String(row.round));
      expect(rows[i][1]).toBe(row.remaining.join(" ≻ "));
      expect(rows[i][2]).toBe(row.weight);
      expect(rows[i][3]).toBe(describeContribution(row.contribution));
    });

    // the well-known journey, spelled out
    expect(rows.map((r) => r[2])).toEqual(["1", "1", "0.38", "0.38", "0.38", "0.38"]);
    expect(rows[1][3]).toBe("1 Vote to Election of Giusti; Giusti keeps 0.62");
    expect(rows[5][3]).toBe("0.38 Votes to Election of Sloan");
    expect(rows[0][1]).toBe("Giusti ≻ McCrae ≻ Sloan ≻ Collings");
    expect(rows[3][1]).toBe("McCrae ≻ Sloan");

    const highlighted = [...root.querySelectorAll("#trace tbody tr.contribution")];
    expect(highlighted).toHaveLength(2);
    expect(root.querySelector("#sparkline polyline")).not.toBeNull();

    // four edits, four trace requests — exactly one per edit
    expect(stub.calls).toHaveLength(4);
    expect(stub.calls[3]).toEqual(WARD_RANKING);
  });

  it("displays no number that is absent from the service payloads", async () => {
    const root = await mount(makeStub().api);
    await selectElection(root, "ward-2017");
    for (const name of WARD_RANKING) await addPick(root, name);

    const corpus = ["catalog.json", "summary.json", "rounds.json", "trace.json"]
      .map(fixture)
      .join("\n");
    const shown = displayedText(root).match(/\d+(?:\.\d+)?/g) ?? [];
    expect(shown.length).toBeGreaterThan(30);
    for (const token of new Set(shown)) {
      expect(corpus, `rendered number ${token} not found in any payload`).toContain(token);
    }
  });

  it("traces a lone first preference for a round-1 winner: one contribution row", async () => {
    const root = await mount(makeStub().api);
    await selectElection(root, "ward-2017");
    await addPick(root, "Scobie");

    const payload = fixtureJson<Trace>("trace-scobie.json");
    const rows = traceCells(root);
    expect(rows).toHaveLength(payload.rows.length);
    expect(rows[0][3]).toBe("1 Vote to Election of Scobie; Scobie keeps 0.55");
    expect(rows.slice(1).every((r) => r[3] === "—")).toBe(true);
    expect(rows[1][1]).toBe("exhausted");
    expect(rows[1][2]).toBe("0.45");
    expect(root.querySelector("#journey-note")!.textContent).toBe(
      "this ballot exhausts in round 2",
    );
  });
});

describe("ranking editor", () => {
  it("issues exactly one trace request per edit and none for no-ops", async () => {
    const stub = makeStub();
    const root = await mount(stub.api);
    await selectElection(root, "ward-2017");
    expect(stub.calls).toHaveLength(0); // empty ranking: nothing to trace

    await addPick(root, "Giusti");
    expect(stub.calls).toHaveLength(1);
    await addPick(root, "McCrae");
    expect(stub.calls).toHaveLength(2);

    pickButton(root, 1, "up").click();
    await settle();
    expect(stub.calls).toHaveLength(3);
    expect(stub.calls[2]).toEqual(["McCrae", "Giusti"]);

    // moving the first pick up changes nothing, so no request
    pickButton(root, 0, "up").click();
    await settle();
    expect(stub.calls).toHaveLength(3);

    pickButton(root, 0, "rm").click();
    await settle();
    expect(stub.calls).toHaveLength(4);
    expect(stub.calls[3]).toEqual(["Giusti"]);

    // removing the last pick empties the ranking: journey clears, no request
    pickButton(root, 0, "rm").click();
    await settle();
    expect(stub.calls).toHaveLength(4);
    expect((root.querySelector("#journey") as HTMLElement).hidden).toBe(true);
  });

  it("re-traces a different journey when a pick moves to the front", async () => {
    const stub = makeStub();
    const root = await mount(stub.api);
    await selectElection(root, "ward-2017");
    for (const name of WARD_RANKING) await addPick(root, name);
    expect(traceCells(root)[0][1].startsWith("Giusti")).toBe(true);

    // walk Collings from rank 4 to rank 1
    pickButton(root, 3, "up").click();
    await settle();
    pickButton(root, 2, "up").click();
    await settle();
    pickButton(root, 1, "up").click();
    await settle();

    expect(stub.calls).toHaveLength(7);
    expect(stub.calls[6]).toEqual(["Collings", "Giusti", "McCrae", "Sloan"]);
    const payload = fixtureJson<Trace>("trace-reordered.json");
    const rows = traceCells(root);
    expect(rows[0][1]).toBe(payload.rows[0].remaining.join(" ≻ "));
    expect(rows[0][1].startsWith("Collings")).toBe(true);
  });

  it("cannot submit duplicates or unknown candidates, even if the DOM is tampered with", async () => {
    const stub = makeStub();
    const root = await mount(stub.api);
    await selectElection(root, "ward-2017");

    const pickSelect = root.querySelector("#pick") as HTMLSelectElement;
    expect(pickSelect.options.length).toBe(8);
    expect([...pickSelect.options].map((o) => o.textContent)).toContain(
      "Giusti (Labour)",
    );

    await addPick(root, "Giusti");
    expect(pickSelect.options.length).toBe(7);
    expect([...pickSelect.options].some((o) => o.value === "Giusti")).toBe(false);

    // force a duplicate option back in and try to add it
    const rogue = document.createElement("option");
    rogue.value = "Giusti";
    pickSelect.appendChild(rogue);
    await addPick(root, "Giusti");
    expect(stub.calls).toHaveLength(1);
    expect(root.querySelectorAll("#picks li")).toHaveLength(1);

    // same for a candidate who is not standing in this election
    const unknown = document.createElement("option");
    unknown.value = "Peltola";
    pickSelect.appendChild(unknown);
    await addPick(root, "Peltola");
    expect(stub.calls).toHaveLength(1);
    expect(root.querySelectorAll("#picks li")).toHaveLength(1);
  });
});

describe("request lifecycle", () => {
  it("cancels the in-flight trace when the ranking changes again", async () => {
    const pending: {
      resolve: (t: Trace) => void;
      signal: AbortSignal | undefined;
    }[] = [];
    const stub = makeStub({
      trace: (_id, _ranking, signal) =>
        new Promise<Trace>((resolve, reject) => {
          signal?.addEventListener("abort", () =>
            reject(new DOMException("aborted", "AbortError")),
          );
          pending.push({ resolve, signal });
        }),
    });
    const root = await mount(stub.api);
    await selectElection(root, "ward-2017");

    await addPick(root, "Giusti");
    expect(pending).toHaveLength(1);
    expect(pending[0].signal?.aborted).toBe(false);

    await addPick(root, "McCrae");
    expect(pending).toHaveLength(2);
    expect(pending[0].signal?.aborted).toBe(true); // superseded request cancelled
    expect(pending[1].signal?.aborted).toBe(false);

    pending[1].resolve(fixtureJson<Trace>("trace.json"));
    await settle();
    expect(traceCells(root)).toHaveLength(6);

    // a late answer from the cancelled request must not repaint the view
    pending[0].resolve(fixtureJson<Trace>("trace-scobie.json"));
    await settle();
    expect(traceCells(root)).toHaveLength(6);
    expect(traceCells(root)[0][1]).toBe("Giusti ≻ McCrae ≻ Sloan ≻ Collings");
    expect((root.querySelector("#error") as HTMLElement).hidden).toBe(true);
  });

  it("keeps the previous journey on screen when a re-trace fails", async () => {
    let fail = false;
    const inner = makeStub();
    const stub = makeStub({
      trace: (id, ranking, signal) => {
        if (fail) throw new ApiError(503, "tabulation cache briefly unavailable");
        return inner.api.trace(id, ranking, signal);
      },
    });
    const root = await mount(stub.api);
    await selectElection(root, "ward-2017");
    for (const name of WARD_RANKING) await addPick(root, name);
    expect(traceCells(root)).toHaveLength(6);

    fail = true;
    pickButton(root, 3, "up").click();
    await settle();

    const error = root.querySelector("#error") as HTMLElement;
    expect(error.hidden).toBe(false);
    expect(error.textContent).toBe("tabulation cache briefly unavailable");
    const rows = traceCells(root);
    expect(rows).toHaveLength(6); // prior journey retained
    expect(rows[0][1]).toBe("Giusti ≻ McCrae ≻ Sloan ≻ Collings");

    fail = false;
    pickButton(root, 2, "up").click();
    await settle();
    expect(error.hidden).toBe(true); // recovery clears the banner
  });
});
