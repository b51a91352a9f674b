/** Thin typed client for the diagnosis service. Every non-2xx response
 * becomes a ServiceError carrying the server's issue list, so callers can
 * show the actual validation messages instead of a bare status code. */

import type {
  DeltaAction,
  DiagnosisResponse,
  DocumentIssue,
  HistoryResponse,
  KbSummary,
  ObservationAck,
  SessionInfo,
} from "./types.js";

export class ServiceError extends Error {
  readonly status: number;
  readonly issues: DocumentIssue[];

  constructor(status: number, issues: DocumentIssue[]) {
    super(issues[0]?.message ?? `request failed with status ${status}`);
    this.name = "ServiceError";
    this.status = status;
    this.issues = issues;
  }
}

export interface DiagnosisParams {
  mode?: "single" | "multi" | "covers";
  maxCard?: number;
  threshold?: string;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    // bind so a bare global fetch keeps its expected receiver
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  async loadKb(document: unknown): Promise<KbSummary> {
    return this.request<KbSummary>("POST", "/kb", document);
  }

  async openSession(kbId: string): Promise<SessionInfo> {
    return this.request<SessionInfo>("POST", "/sessions", { kb_id: kbId });
  }

  async openSessionInline(kbDocument: unknown): Promise<SessionInfo> {
    return this.request<SessionInfo>("POST", "/sessions", { kb: kbDocument });
  }

  async patchObservation(
    sessionId: string,
    delta: DeltaAction[],
  ): Promise<ObservationAck> {
    return this.request<ObservationAck>(
      "PATCH",
      `/sessions/${encodeURIComponent(sessionId)}/observation`,
      { delta },
    );
  }

  async diagnosis(
    sessionId: string,
    params: DiagnosisParams = {},
  ): Promise<DiagnosisResponse> {
    const query = new URLSearchParams();
    query.set("mode", params.mode ?? "single");
    if (params.maxCard !== undefined) query.set("max_card", String(params.maxCard));
    if (params.threshold !== undefined) query.set("threshold", params.threshold);
    return this.request<DiagnosisResponse>(
      "GET",
      `/sessions/${encodeURIComponent(sessionId)}/diagnosis?${query}`,
    );
  }

  async history(sessionId: string): Promise<HistoryResponse> {
    return this.request<HistoryResponse>(
      "GET",
      `/sessions/${encodeURIComponent(sessionId)}/history`,
    );
  }

  async healthy(): Promise<boolean> {
    try {
      const res = await this.fetchImpl(`${this.base}/healthz`);
      return res.ok;
    } catch {
      return false;
    }
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchImpl(`${this.base}${path}`, init);
    const text = await res.text();
    let parsed: unknown = undefined;
    if (text) {
      try {
        parsed = JSON.parse(text);
      } catch {
        parsed = undefined;
      }
    }
    if (!res.ok) {
      const issues = extractIssues(parsed);
      throw new ServiceError(res.status, issues);
    }
    return parsed as T;
  }
}

function extractIssues(payload: unknown): DocumentIssue[] {
  if (payload && typeof payload === "object" && "issues" in payload) {
    const raw = (payload as { issues: unknown }).issues;
    if (Array.isArray(raw)) {
      return raw.filter(
        (i): i is DocumentIssue =>
          !!i && typeof i === "object" && "message" in i && "path" in i,
      );
    }
  }
  return [];
}
