// Ballot-flow explorer: pick an election, build a ranking one preference
// at a time, and watch the ballot's round-by-round journey re-trace on
// every edit. All values on screen come verbatim from the HTTP API; the
// only client-side arithmetic is sparkline geometry.

import { Api, Contribution, ElectionSummary, RoundsTable, Trace } from "./api.js";

const SKELETON = `
  <h1>Ballot flow explorer</h1>
  <p class="hint">Choose an election, then add preferences in the order a
  voter would write them. The journey below re-traces after every change,
  so reordering or removing picks answers "what if" immediately.</p>
  <div class="bar">
    <label>Election
      <select id="election"><option value="">— choose —</option></select>
    </label>
    <span id="error" role="alert" hidden></span>
  </div>
  <section id="context" hidden>
    <h2 id="context-title"></h2>
    <p id="context-facts"></p>
    <ul id="context-winners"></ul>
  </section>
  <section id="editor" hidden>
    <h2>Ballot</h2>
    <ol id="picks"></ol>
    <label>Next preference <select id="pick"></select></label>
    <button id="add" type="button">Add</button>
  </section>
  <section id="journey" hidden>
    <h2>Journey</h2>
    <p id="journey-note"></p>
    <svg id="sparkline" viewBox="0 0 120 28" width="120" height="28"
         aria-hidden="true"></svg>
    <table id="trace">
      <thead><tr>
        <th>Round</th><th>Current ballot</th>
        <th>Ballot weight</th><th>Contribution</th>
      </tr></thead>
      <tbody></tbody>
    </table>
  </section>
  <section id="rounds-panel" hidden>
    <h2>Votes by round</h2>
    <table id="rounds"></table>
  </section>
`;

export function describeContribution(c: Contribution | null): string {
  if (c === null) return "—";
  const unit = c.amount === "1" ? "Vote" : "Votes";
  const base = `${c.amount} ${unit} to Election of ${c.candidate}`;
  if (c.retained_fraction === null) return base;
  return `${base}; ${c.candidate} keeps ${c.retained_fraction}`;
}

export async function init(root: HTMLElement, client: Api): Promise<void> {
  root.innerHTML = SKELETON;
  const pick = (sel: string) => root.querySelector(sel) as HTMLElement;
  const electionSelect = pick("#election") as HTMLSelectElement;
  const errorBox = pick("#error");
  const pickSelect = pick("#pick") as HTMLSelectElement;
  const addButton = pick("#add") as HTMLButtonElement;
  const picksList = pick("#picks");

  let electionId: string | null = null;
  let summary: ElectionSummary | null = null;
  let ranking: string[] = [];
  let inflight: AbortController | null = null;

  function showError(message: string) {
    errorBox.textContent = message;
    errorBox.hidden = false;
  }

  function clearError() {
    errorBox.textContent = "";
    errorBox.hidden = true;
  }

  function setEditorEnabled(enabled: boolean) {
    pickSelect.disabled = !enabled;
    addButton.disabled = !enabled;
  }

  function renderContext(s: ElectionSummary) {
    pick("#context-title").textContent =
      s.title ?? [s.ward, s.year].filter((p) => p !== null).join(" ") ?? s.id;
    pick("#context-facts").textContent =
      `${s.seats} seats · quota ${s.quota} · ${s.total_ballots} ballots` +
      (s.rejected === null ? "" : ` (${s.rejected} rejected)`) +
      ` · ended round ${s.termination.final_round} (${s.termination.reason})`;
    const winners = pick("#context-winners");
    winners.innerHTML = "";
    for (const w of s.winners) {
      const li = document.createElement("li");
      li.textContent =
        `seat ${w.seat}: ${w.candidate} — ${w.total} votes, round ${w.round}` +
        (w.by_quota ? ", reached quota" : "");
      winners.appendChild(li);
    }
    pick("#context").hidden = false;
  }

  function renderRounds(rounds: RoundsTable) {
    const table = pick("#rounds") as HTMLTableElement;
    table.innerHTML = "";
    rounds.table.forEach((cells, i) => {
      const tr = document.createElement("tr");
      for (const cell of cells) {
        const td = document.createElement(i === 0 ? "th" : "td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      table.appendChild(tr);
    });
    pick("#rounds-panel").hidden = false;
  }

  function renderPickOptions() {
    pickSelect.innerHTML = "";
    if (summary === null) return;
    for (const c of summary.candidates) {
      if (ranking.includes(c.name)) continue;
      const option = document.createElement("option");
      option.value = c.name;
      option.textContent = c.party === null ? c.name : `${c.name} (${c.party})`;
      pickSelect.appendChild(option);
    }
    addButton.disabled = pickSelect.options.length === 0;
  }

  function renderPicks() {
    picksList.innerHTML = "";
    ranking.forEach((name, i) => {
      const li = document.createElement("li");
      const label = document.createElement("span");
      label.textContent = name;
      li.appendChild(label);
      for (const [act, glyph, title] of [
        ["up", "↑", "move earlier"],
        ["rm", "✕", "remove"],
      ]) {
        const button = document.createElement("button");
        button.type = "button";
        button.textContent = glyph;
        button.title = title;
        button.dataset.act = act;
        button.dataset.idx = String(i);
        li.appendChild(button);
      }
      picksList.appendChild(li);
    });
    renderPickOptions();
  }

  function clearJourney() {
    pick("#journey").hidden = true;
    pick("#trace tbody").innerHTML = "";
    pick("#sparkline").innerHTML = "";
    pick("#journey-note").textContent = "";
  }

  function renderSparkline(weights: number[]) {
    const svg = pick("#sparkline");
    svg.innerHTML = "";
    if (weights.length < 2) return;
    const step = 116 / (weights.length - 1);
    const points = weights
      .map((w, i) => `${(2 + i * step).toFixed(1)},${(25 - 22 * w).toFixed(1)}`)
      .join(" ");
    const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
    line.setAttribute("points", points);
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", "currentColor");
    svg.appendChild(line);
  }

  function renderTrace(trace: Trace) {
    const body = pick("#trace tbody");
    body.innerHTML = "";
    for (const row of trace.rows) {
      const tr = document.createElement("tr");
      if (row.contribution !== null) tr.className = "contribution";

      const round = document.createElement("td");
      round.textContent = String(row.round);
      tr.appendChild(round);

      const current = document.createElement("td");
      if (row.counts_for === null) {
        current.textContent = "exhausted";
        current.className = "exhausted";
      } else {
        row.remaining.forEach((name, i) => {
          if (i > 0) current.appendChild(document.createTextNode(" ≻ "));
          const span = document.createElement(i === 0 ? "strong" : "span");
          span.textContent = name;
          current.appendChild(span);
        });
      }
      tr.appendChild(current);

      const weight = document.createElement("td");
      weight.textContent = row.weight;
      tr.appendChild(weight);

      const contribution = document.createElement("td");
      contribution.textContent = describeContribution(row.contribution);
      tr.appendChild(contribution);

      body.appendChild(tr);
    }
    pick("#journey-note").textContent =
      trace.exhausted_round === null
        ? ""
        : `this ballot exhausts in round ${trace.exhausted_round}`;
    renderSparkline(trace.rows.map((row) => parseFloat(row.weight)));
    pick("#journey").hidden = false;
  }

  async function retrace() {
    if (inflight !== null) {
      inflight.abort();
      inflight = null;
    }
    if (electionId === null || ranking.length === 0) {
      clearJourney();
      return;
    }
    const controller = new AbortController();
    inflight = controller;
    try {
      const trace = await client.trace(electionId, [...ranking], controller.signal);
      if (inflight !== controller) return; // superseded by a newer edit
      inflight = null;
      clearError();
      renderTrace(trace);
    } catch (err) {
      if (inflight !== controller) return; // aborted: a newer edit owns the view
      inflight = null;
      // keep whatever journey is on screen; just surface the failure
      showError(err instanceof Error ? err.message : String(err));
    }
  }

  function addPick(name: string) {
    if (summary === null) return;
    if (!summary.candidates.some((c) => c.name === name)) return;
    if (ranking.includes(name)) return;
    ranking.push(name);
    renderPicks();
    void retrace();
  }

  function removePick(index: number) {
    ranking.splice(index, 1);
    renderPicks();
    void retrace();
  }

  function movePickUp(index: number) {
    if (index <= 0) return; // already first: nothing changed, no re-trace
    [ranking[index - 1], ranking[index]] = [ranking[index], ranking[index - 1]];
    renderPicks();
    void retrace();
  }

  async function loadElection(id: string) {
    clearError();
    try {
      const [s, rounds] = await Promise.all([client.summary(id), client.rounds(id)]);
      electionId = id;
      summary = s;
      ranking = [];
      if (inflight !== null) {
        inflight.abort();
        inflight = null;
      }
      clearJourney();
      renderContext(s);
      renderRounds(rounds);
      renderPicks();
      setEditorEnabled(true);
      pick("#editor").hidden = false;
    } catch (err) {
      showError(err instanceof Error ? err.message : String(err));
      setEditorEnabled(false);
    }
  }

  electionSelect.addEventListener("change", () => {
    if (electionSelect.value !== "") void loadElection(electionSelect.value);
  });
  addButton.addEventListener("click", () => {
    if (pickSelect.value !== "") addPick(pickSelect.value);
  });
  picksList.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const index = Number(target.dataset.idx);
    if (target.dataset.act === "up") movePickUp(index);
    else if (target.dataset.act === "rm") removePick(index);
  });

  try {
    const catalog = await client.catalog();
    for (const entry of catalog) {
      const option = document.createElement("option");
      option.value = entry.id;
      option.textContent = entry.title ?? entry.id;
      electionSelect.appendChild(option);
    }
  } catch (err) {
    showError(err instanceof Error ? err.message : String(err));
  }
}
