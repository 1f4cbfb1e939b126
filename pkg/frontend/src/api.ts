// Typed client for the stvflow HTTP API.
//
// Every weight, total, and transfer value arrives as a pre-formatted
// string and is passed through untouched — formatting numbers is the
// service's job, the UI only places them on screen.

export interface CatalogEntry {
  id: string;
  title: string | null;
  ward: string | null;
  year: number | null;
  seats: number;
  candidates: string[];
}

export interface Candidate {
  id: number;
  name: string;
  party: string | null;
}

export interface SeatAward {
  candidate: string;
  seat: number;
  round: number;
  by_quota: boolean;
  total: string;
}

export interface ElectionSummary {
  id: string;
  title: string | null;
  ward: string | null;
  year: number | null;
  seats: number;
  quota: number;
  total_ballots: number;
  rejected: number | null;
  candidates: Candidate[];
  winners: SeatAward[];
  termination: { reason: string; final_round: number; rule: string };
}

export interface RoundEvent {
  round: number;
  kind: string;
  candidate: string | null;
  transfer_value: string | null;
}

export interface RoundsTable {
  quota: number;
  rounds: number[];
  events: RoundEvent[];
  table: string[][];
}

export interface Contribution {
  kind: "elected" | "final_support";
  candidate: string;
  amount: string;
  retained_fraction: string | null;
}

export interface TraceRow {
  round: number;
  counts_for: string | null;
  remaining: string[];
  weight: string;
  contribution: Contribution | null;
}

export interface Trace {
  ballot: string[];
  exhausted_round: number | null;
  rows: TraceRow[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; the status line is all we have
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export class FlowClient {
  constructor(private readonly base: string = "") {}

  catalog(): Promise<CatalogEntry[]> {
    return request(`${this.base}/elections`);
  }

  summary(id: string): Promise<ElectionSummary> {
    return request(`${this.base}/elections/${encodeURIComponent(id)}`);
  }

  rounds(id: string): Promise<RoundsTable> {
    return request(`${this.base}/elections/${encodeURIComponent(id)}/rounds`);
  }

  trace(id: string, ranking: string[], signal?: AbortSignal): Promise<Trace> {
    return request(`${this.base}/elections/${encodeURIComponent(id)}/trace`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ranking }),
      signal,
    });
  }
}

// What the app actually needs; tests substitute plain objects.
export type Api = Pick<FlowClient, "catalog" | "summary" | "rounds" | "trace">;
