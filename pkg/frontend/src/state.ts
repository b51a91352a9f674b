/** Console state: the tri-state finding panel and the revision-guarded
 * ranking. Nothing here is optimistic: a finding only changes after the
 * server acknowledged the delta with a new revision, and a ranking is only
 * adopted if it was computed at exactly the revision the panel shows.
 * Rejections therefore never leave half-applied state behind; the panel
 * re-renders from this object and any widget the user moved snaps back. */

import { ServiceClient, ServiceError } from "./api.js";
import { RequestQueue } from "./queue.js";
import type {
  CoversReport,
  DeltaAction,
  DiagnosisResponse,
  FindingState,
  ObservationSnapshot,
  RankingReport,
  SessionInfo,
} from "./types.js";

export interface Finding {
  state: FindingState;
  /** On-scale level string; meaningful only when state is not "unknown". */
  level: string;
}

export interface ConsoleError {
  message: string;
  manifestation?: string;
  status?: number;
}

/** "1/4" -> 0.25, "0.5" -> 0.5, "1" -> 1. */
export function levelToNumber(level: string): number {
  const slash = level.indexOf("/");
  if (slash >= 0) {
    const num = Number(level.slice(0, slash));
    const den = Number(level.slice(slash + 1));
    return num / den;
  }
  return Number(level);
}

export class ConsoleState {
  readonly client: ServiceClient;
  readonly queue = new RequestQueue();

  sessionId = "";
  kbId = "";
  scale: string[] = [];
  manifestations: string[] = [];
  disorders: string[] = [];

  findings = new Map<string, Finding>();
  revision = 0;

  ranking: RankingReport | null = null;
  covers: CoversReport | null = null;
  /** Revision the adopted ranking/covers reflect; -1 before the first one. */
  reportRevision = -1;

  lastError: ConsoleError | null = null;

  constructor(client: ServiceClient) {
    this.client = client;
  }

  /** Load a KB document and open a fresh session on it. */
  static async open(client: ServiceClient, kbDocument: unknown): Promise<ConsoleState> {
    const state = new ConsoleState(client);
    const info = await client.openSessionInline(kbDocument);
    state.adoptSession(info);
    return state;
  }

  adoptSession(info: SessionInfo): void {
    this.sessionId = info.session_id;
    this.kbId = info.kb_id;
    this.scale = info.scale;
    this.manifestations = info.manifestation_names;
    this.disorders = info.disorder_names;
    this.revision = info.revision;
    this.findings = new Map(
      this.manifestations.map((m) => [m, { state: "unknown" as FindingState, level: this.topLevel() }]),
    );
    this.hydrateFindings(info.observation);
  }

  topLevel(): string {
    return this.scale[this.scale.length - 1] ?? "1";
  }

  /** Nearest on-scale level to an arbitrary numeric slider position. */
  snapLevel(value: number): string {
    let best = this.topLevel();
    let bestDist = Infinity;
    for (const level of this.scale) {
      const dist = Math.abs(levelToNumber(level) - value);
      if (dist < bestDist) {
        bestDist = dist;
        best = level;
      }
    }
    return best;
  }

  finding(manifestation: string): Finding {
    return this.findings.get(manifestation) ?? { state: "unknown", level: this.topLevel() };
  }

  /**
   * Submit one finding mark and await the server's verdict. The delta is
   * the bare action, so marking a manifestation absent while it is present
   * is rejected by the server (409) rather than silently retracted; use
   * replaceFinding for the explicit retract-and-remark gesture. Resolves
   * true when accepted (local state now matches the new revision), false
   * when rejected (local state untouched and lastError explains why).
   */
  async setFinding(
    manifestation: string,
    state: FindingState,
    level?: string,
  ): Promise<boolean> {
    return this.sendFindingDelta(
      manifestation,
      state,
      level,
      buildFindingDelta,
    );
  }

  /** Retract whatever is recorded for the manifestation and mark it anew
   * in one atomic batch; never conflicts with the previous state. */
  async replaceFinding(
    manifestation: string,
    state: FindingState,
    level?: string,
  ): Promise<boolean> {
    return this.sendFindingDelta(
      manifestation,
      state,
      level,
      buildReplaceDelta,
    );
  }

  private async sendFindingDelta(
    manifestation: string,
    state: FindingState,
    level: string | undefined,
    build: (m: string, s: FindingState, lv: string) => DeltaAction[],
  ): Promise<boolean> {
    const chosen = level ?? this.topLevel();
    if (state !== "unknown" && !this.scale.includes(chosen)) {
      this.lastError = {
        message: `level ${chosen} is not on the scale`,
        manifestation,
      };
      return false;
    }
    const delta = build(manifestation, state, chosen);
    return this.queue.enqueue(async () => {
      try {
        const ack = await this.client.patchObservation(this.sessionId, delta);
        this.revision = ack.revision;
        this.hydrateFindings(ack.observation);
        this.lastError = null;
        return true;
      } catch (error) {
        this.lastError = toConsoleError(error, manifestation);
        return false;
      }
    });
  }

  /** Forget everything observed so far, one manifestation at a time. */
  async clearAll(): Promise<boolean> {
    const delta: DeltaAction[] = [];
    for (const [m, f] of this.findings) {
      if (f.state !== "unknown") {
        delta.push({ action: "clear", manifestation: m, state: f.state });
      }
    }
    if (delta.length === 0) return true;
    return this.queue.enqueue(async () => {
      try {
        const ack = await this.client.patchObservation(this.sessionId, delta);
        this.revision = ack.revision;
        this.hydrateFindings(ack.observation);
        this.lastError = null;
        return true;
      } catch (error) {
        this.lastError = toConsoleError(error);
        return false;
      }
    });
  }

  /**
   * Fetch a fresh ranking and adopt it only if it reflects the panel's
   * current revision; a stale report (a mutation won the race) is dropped.
   * Returns whether the report was adopted.
   */
  async refreshRanking(): Promise<boolean> {
    const response = await this.queue.enqueue(() =>
      this.client.diagnosis(this.sessionId, { mode: "single" }),
    );
    return this.adoptReport(response);
  }

  async refreshCovers(maxCard?: number): Promise<boolean> {
    const response = await this.queue.enqueue(() =>
      this.client.diagnosis(this.sessionId, {
        mode: "covers",
        ...(maxCard !== undefined ? { maxCard } : {}),
      }),
    );
    return this.adoptReport(response);
  }

  private adoptReport(response: DiagnosisResponse): boolean {
    if (response.revision !== this.revision) {
      return false; // stale: computed before the latest accepted mutation
    }
    if (response.report.kind === "ranking") {
      this.ranking = response.report;
    } else {
      this.covers = response.report;
    }
    this.reportRevision = response.revision;
    return true;
  }

  private hydrateFindings(observation: ObservationSnapshot): void {
    for (const m of this.manifestations) {
      const present = observation.present[m];
      const absent = observation.absent[m];
      if (present !== undefined) {
        this.findings.set(m, { state: "present", level: present });
      } else if (absent !== undefined) {
        this.findings.set(m, { state: "absent", level: absent });
      } else {
        this.findings.set(m, { state: "unknown", level: this.topLevel() });
      }
    }
  }
}

/** The bare action for one mark: a set on the chosen side, or both clears
 * for a retraction. A set while the opposite side holds a grade is left
 * for the server to reject; that refusal is the point of the two-sided
 * bookkeeping and the console surfaces it instead of papering over it. */
export function buildFindingDelta(
  manifestation: string,
  state: FindingState,
  level: string,
): DeltaAction[] {
  if (state === "unknown") {
    return [
      { action: "clear", manifestation, state: "present" },
      { action: "clear", manifestation, state: "absent" },
    ];
  }
  return [{ action: "set", manifestation, state, level }];
}

/** Retract-and-remark as one atomic batch: clears both sides, then sets.
 * Valid from any previous state. */
export function buildReplaceDelta(
  manifestation: string,
  state: FindingState,
  level: string,
): DeltaAction[] {
  const delta: DeltaAction[] = [
    { action: "clear", manifestation, state: "present" },
    { action: "clear", manifestation, state: "absent" },
  ];
  if (state !== "unknown") {
    delta.push({ action: "set", manifestation, state, level });
  }
  return delta;
}

function toConsoleError(error: unknown, manifestation?: string): ConsoleError {
  if (error instanceof ServiceError) {
    return {
      message: error.issues.map((i) => i.message).join("; ") || error.message,
      status: error.status,
      ...(manifestation !== undefined ? { manifestation } : {}),
    };
  }
  return {
    message: error instanceof Error ? error.message : String(error),
    ...(manifestation !== undefined ? { manifestation } : {}),
  };
}
