/** Browser bootstrap: wires the DOM to ConsoleState. Views re-render from
 * state after every server round trip, so a rejected mark visibly snaps
 * the widget back while the inline error explains the conflict. */

import { ServiceClient } from "./api.js";
import { renderCovers, renderFindingPanel, renderRanking } from "./render.js";
import { ConsoleState } from "./state.js";
import type { FindingState } from "./types.js";

const EXAMPLE_KB = {
  format_version: 1,
  scale: ["0", "1/4", "1/2", "3/4", "1"],
  manifestations: ["m1", "m2", "m3", "m4"],
  disorders: [
    { id: "d1", certain: { m1: "1", m2: "3/4" }, excluded: { m3: "1" } },
    { id: "d2", certain: { m3: "1/2" }, excluded: { m1: "3/4" } },
    { id: "d3" },
  ],
};

type View = "ranking" | "covers";

class ConsoleApp {
  private state: ConsoleState | null = null;
  private view: View = "ranking";

  constructor(private readonly root: HTMLElement) {}

  renderSetup(): void {
    this.root.innerHTML = `
      <div class="setup">
        <label>Service URL <input id="service-url" value="http://127.0.0.1:8000"></label>
        <label>Knowledge base document
          <textarea id="kb-doc" rows="14">${JSON.stringify(EXAMPLE_KB, null, 2)}</textarea>
        </label>
        <button id="open-session">Open session</button>
        <div id="setup-error" class="inline-error" hidden></div>
      </div>`;
    const button = this.root.querySelector<HTMLButtonElement>("#open-session")!;
    button.addEventListener("click", () => void this.openSession());
  }

  private async openSession(): Promise<void> {
    const urlInput = this.root.querySelector<HTMLInputElement>("#service-url")!;
    const docInput = this.root.querySelector<HTMLTextAreaElement>("#kb-doc")!;
    const errorBox = this.root.querySelector<HTMLElement>("#setup-error")!;
    errorBox.hidden = true;
    try {
      const document = JSON.parse(docInput.value);
      const client = new ServiceClient(urlInput.value);
      this.state = await ConsoleState.open(client, document);
      await this.state.refreshRanking();
      this.renderConsole();
    } catch (error) {
      errorBox.textContent = error instanceof Error ? error.message : String(error);
      errorBox.hidden = false;
    }
  }

  private renderConsole(): void {
    const state = this.state;
    if (!state) return;
    const rows = state.manifestations.map((m) => ({
      manifestation: m,
      finding: state.finding(m),
    }));
    const reportHtml =
      this.view === "ranking"
        ? renderRanking(state.ranking, state.reportRevision)
        : renderCovers(state.covers, state.reportRevision);
    this.root.innerHTML = `
      <div class="console">
        <div class="pane findings">
          <h2>Findings <button id="reset-findings" class="reset">reset</button></h2>
          ${renderFindingPanel(rows, state.scale, state.lastError)}
        </div>
        <div class="pane report">
          <div class="tabs">
            <button class="tab${this.view === "ranking" ? " active" : ""}" data-view="ranking">Ranking</button>
            <button class="tab${this.view === "covers" ? " active" : ""}" data-view="covers">Covers</button>
          </div>
          ${reportHtml}
        </div>
      </div>`;
    this.bindConsoleEvents();
  }

  private bindConsoleEvents(): void {
    for (const btn of this.root.querySelectorAll<HTMLButtonElement>(".state-btn")) {
      btn.addEventListener("click", () => {
        const m = btn.dataset.m!;
        const target = btn.dataset.state as FindingState;
        const level = this.levelFor(m);
        void this.submit(m, target, level);
      });
    }
    for (const pick of this.root.querySelectorAll<HTMLSelectElement>(".level-pick")) {
      pick.addEventListener("change", () => {
        const m = pick.dataset.m!;
        const current = this.state?.finding(m).state ?? "unknown";
        if (current !== "unknown") {
          void this.submit(m, current, pick.value);
        }
      });
    }
    this.root
      .querySelector<HTMLButtonElement>("#reset-findings")
      ?.addEventListener("click", () => {
        void this.state?.clearAll().then(() => this.refresh());
      });
    for (const tab of this.root.querySelectorAll<HTMLButtonElement>(".tab")) {
      tab.addEventListener("click", () => {
        this.view = tab.dataset.view as View;
        void this.refresh();
      });
    }
  }

  private levelFor(manifestation: string): string {
    const pick = this.root.querySelector<HTMLSelectElement>(
      `.level-pick[data-m="${CSS.escape(manifestation)}"]`,
    );
    return pick?.value ?? this.state?.topLevel() ?? "1";
  }

  private async submit(
    manifestation: string,
    target: FindingState,
    level: string,
  ): Promise<void> {
    const state = this.state;
    if (!state) return;
    await state.setFinding(manifestation, target, level);
    await this.refresh();
  }

  private async refresh(): Promise<void> {
    const state = this.state;
    if (!state) return;
    if (this.view === "ranking") {
      await state.refreshRanking();
    } else {
      await state.refreshCovers();
    }
    this.renderConsole();
  }
}

const root = document.getElementById("app");
if (root) {
  new ConsoleApp(root).renderSetup();
}
