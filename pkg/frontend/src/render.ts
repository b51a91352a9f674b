/** Pure HTML-string renderers. Every number shown is echoed verbatim from
 * a server report; nothing is recomputed here, so the view can never
 * disagree with the engine. All dynamic text goes through escapeHtml. */

import type { ConsoleError, Finding } from "./state.js";
import { levelToNumber } from "./state.js";
import type {
  ConflictDetail,
  CoversReport,
  RankingEntry,
  RankingReport,
} from "./types.js";

export function escapeHtml(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

const STATES = ["unknown", "present", "absent"] as const;

export interface PanelRow {
  manifestation: string;
  finding: Finding;
}

/** The tri-state entry panel: one row per manifestation with the three
 * state buttons and an on-scale level picker. Levels outside the KB's
 * chain are simply not offered. */
export function renderFindingPanel(
  rows: PanelRow[],
  scale: string[],
  error: ConsoleError | null = null,
): string {
  const body = rows
    .map(({ manifestation, finding }) => {
      const buttons = STATES.map((s) => {
        const active = finding.state === s ? " active" : "";
        return (
          `<button class="state-btn ${s}${active}" data-m="${escapeHtml(manifestation)}"` +
          ` data-state="${s}">${s}</button>`
        );
      }).join("");
      const options = scale
        .map((level) => {
          const selected = level === finding.level ? " selected" : "";
          return `<option value="${escapeHtml(level)}"${selected}>${escapeHtml(level)}</option>`;
        })
        .join("");
      const disabled = finding.state === "unknown" ? " disabled" : "";
      const inlineError =
        error && error.manifestation === manifestation
          ? `<div class="inline-error">${escapeHtml(error.message)}</div>`
          : "";
      return (
        `<div class="finding-row" data-row="${escapeHtml(manifestation)}">` +
        `<span class="m-name">${escapeHtml(manifestation)}</span>` +
        `<span class="state-group">${buttons}</span>` +
        `<select class="level-pick" data-m="${escapeHtml(manifestation)}"${disabled}>${options}</select>` +
        inlineError +
        `</div>`
      );
    })
    .join("\n");
  const floating =
    error && !error.manifestation
      ? `<div class="inline-error">${escapeHtml(error.message)}</div>`
      : "";
  return `<div class="finding-panel">\n${body}\n${floating}</div>`;
}

function levelBar(level: string): string {
  const pct = Math.round(levelToNumber(level) * 100);
  return (
    `<span class="level-badge">${escapeHtml(level)}</span>` +
    `<span class="level-bar"><span class="level-fill" style="width:${pct}%"></span></span>`
  );
}

function renderConflicts(conflicts: ConflictDetail[]): string {
  if (conflicts.length === 0) {
    return `<p class="no-conflicts">No conflicting evidence.</p>`;
  }
  const rows = conflicts
    .map(
      (c) =>
        `<tr><td>${escapeHtml(c.manifestation)}</td>` +
        `<td>${escapeHtml(c.term)}</td>` +
        `<td>${escapeHtml(c.profile_level)}</td>` +
        `<td>${escapeHtml(c.observed_level)}</td>` +
        `<td>${escapeHtml(c.overlap)}</td></tr>`,
    )
    .join("");
  return (
    `<table class="conflicts"><thead><tr>` +
    `<th>finding</th><th>term</th><th>profile</th><th>observed</th><th>overlap</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

function renderRankingRow(entry: RankingEntry): string {
  const name = entry.disorders.join(" + ");
  // the audit: which of the two terms pulled the level down, and on what
  return (
    `<details class="rank-row" data-d="${escapeHtml(name)}">` +
    `<summary><span class="d-name">${escapeHtml(name)}</span>${levelBar(entry.level)}</summary>` +
    `<div class="audit">` +
    `<p>certain effects vs. absent evidence: <b>${escapeHtml(entry.certain_vs_absent)}</b></p>` +
    `<p>excluded effects vs. present evidence: <b>${escapeHtml(entry.excluded_vs_present)}</b></p>` +
    renderConflicts(entry.conflicts) +
    `</div></details>`
  );
}

export function renderRanking(report: RankingReport | null, revision: number): string {
  if (!report) {
    return `<div class="ranking empty">No ranking yet. Mark a finding to begin.</div>`;
  }
  if (report.entries.length === 0) {
    return `<div class="ranking empty">The knowledge base lists no disorders.</div>`;
  }
  const rows = report.entries.map(renderRankingRow).join("\n");
  return (
    `<div class="ranking" data-revision="${revision}">` +
    `<div class="revision-tag">revision ${revision}</div>\n${rows}\n</div>`
  );
}

function flagBadges(row: { relevant: boolean; irredundant: boolean; minimum: boolean }): string {
  const badges: string[] = [];
  if (row.minimum) badges.push(`<span class="flag minimum">minimum</span>`);
  if (row.irredundant) badges.push(`<span class="flag irredundant">irredundant</span>`);
  if (row.relevant) badges.push(`<span class="flag relevant">relevant</span>`);
  return badges.join("");
}

export function renderCovers(report: CoversReport | null, revision: number): string {
  if (!report) {
    return `<div class="covers empty">No cover report yet.</div>`;
  }
  if (report.reports.length === 0) {
    const target = report.target.map(escapeHtml).join(", ") || "(nothing)";
    return `<div class="covers empty">Nothing covers {${target}}.</div>`;
  }
  const cards = report.reports
    .map((row) => {
      const name = row.subset.length ? row.subset.join(" + ") : "(empty set)";
      return (
        `<div class="cover-card" data-subset="${escapeHtml(name)}">` +
        `<span class="subset">${escapeHtml(name)}</span>` +
        flagBadges(row) +
        `</div>`
      );
    })
    .join("\n");
  const target = report.target.map(escapeHtml).join(", ") || "(nothing)";
  return (
    `<div class="covers" data-revision="${revision}">` +
    `<div class="revision-tag">covering {${target}} at revision ${revision}</div>\n${cards}\n</div>`
  );
}
