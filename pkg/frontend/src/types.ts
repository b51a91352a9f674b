/** Payload shapes of the diagnosis service. Levels travel as exact strings ("1/4"). */

export interface DocumentIssue {
  path: string;
  severity: "error" | "warning";
  message: string;
}

export interface KbSummary {
  kb_id: string;
  summary: { disorders: number; manifestations: number; scale_levels: number };
  disorder_names: string[];
  manifestation_names: string[];
  /** The certainty chain, bottom to top. */
  scale: string[];
  composition: string;
  issues?: DocumentIssue[];
}

export interface SessionInfo extends KbSummary {
  session_id: string;
  revision: number;
  observation: ObservationSnapshot;
}

export interface ObservationSnapshot {
  present: Record<string, string>;
  absent: Record<string, string>;
}

export type FindingState = "unknown" | "present" | "absent";

export interface DeltaAction {
  action: "set" | "clear";
  manifestation: string;
  state: "present" | "absent";
  level?: string;
}

export interface ObservationAck {
  session_id: string;
  revision: number;
  observation: ObservationSnapshot;
}

export interface ConflictDetail {
  manifestation: string;
  term: string;
  profile_level: string;
  observed_level: string;
  overlap: string;
}

export interface RankingEntry {
  disorders: string[];
  cardinality: number;
  level: string;
  certain_vs_absent: string;
  excluded_vs_present: string;
  conflicts: ConflictDetail[];
}

export interface RankingReport {
  kind: "ranking";
  scale: string[];
  entries: RankingEntry[];
}

export interface CoverRow {
  subset: string[];
  cardinality: number;
  is_cover: boolean;
  relevant: boolean;
  irredundant: boolean;
  minimum: boolean;
}

export interface CoversReport {
  kind: "covers";
  target: string[];
  reports: CoverRow[];
}

export interface DiagnosisResponse {
  session_id: string;
  revision: number;
  mode: "single" | "multi" | "covers";
  report: RankingReport | CoversReport;
}

export interface HistoryResponse {
  session_id: string;
  revision: number;
  entries: { revision: number; delta: DeltaAction[] }[];
}
