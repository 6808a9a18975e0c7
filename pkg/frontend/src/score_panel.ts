// The editable CVSS3 panel. Metrics are edited through constrained
// selectors; every edit round-trips through the server, and the displayed
// aggregate is always the server-recomputed value. This module never
// computes a score itself.

import { ConflictError, type TriageApi } from "./api.js";
import {
  DISPLAY_NAMES,
  METRIC_LABELS,
  METRIC_ORDER,
  METRIC_VALUES,
  type Assessment,
  type Metric,
} from "./types.js";

export class ScorePanel {
  private current: Assessment | null = null;
  private notice = "";

  constructor(
    private readonly container: HTMLElement,
    private readonly api: TriageApi,
    private readonly actor: () => string,
  ) {}

  get assessment(): Assessment | null {
    return this.current;
  }

  async load(fn: string): Promise<void> {
    this.notice = "";
    this.current = await this.api.assessment(fn);
    this.render();
  }

  clear(): void {
    this.current = null;
    this.notice = "";
    this.container.textContent = "";
    const hint = document.createElement("p");
    hint.className = "empty-state";
    hint.textContent = "Click a function node to inspect its severity.";
    this.container.appendChild(hint);
  }

  /** Submit one metric edit; the displayed aggregate is the server's answer. */
  async submitEdit(metric: Metric, newValue: string): Promise<void> {
    if (!this.current) {
      return;
    }
    const oldValue = this.current.metrics[metric];
    if (newValue === oldValue) {
      return;
    }
    try {
      this.current = await this.api.override(
        this.current.function,
        metric,
        oldValue,
        newValue,
        this.actor(),
      );
      this.notice = "";
    } catch (error) {
      if (error instanceof ConflictError) {
        // someone else changed this metric: refresh and explain
        this.notice =
          `Your edit of ${metric} was based on a stale value; ` +
          `it is now "${error.current}". The panel has been refreshed.`;
        this.current = await this.api.assessment(this.current.function);
      } else {
        throw error;
      }
    }
    this.render();
  }

  render(): void {
    this.container.textContent = "";
    if (!this.current) {
      this.clear();
      return;
    }
    const assessment = this.current;

    const title = document.createElement("h2");
    title.textContent = assessment.function;
    this.container.appendChild(title);

    if (this.notice) {
      const banner = document.createElement("div");
      banner.className = "conflict-banner";
      banner.textContent = this.notice;
      this.container.appendChild(banner);
    }

    const aggregate = document.createElement("div");
    aggregate.className = "aggregate";
    aggregate.innerHTML =
      `<span class="score" data-testid="aggregate-score">${assessment.score.toFixed(1)}</span>` +
      `<span class="rating rating-${assessment.rating.toLowerCase()}">${assessment.rating}</span>`;
    this.container.appendChild(aggregate);

    const vector = document.createElement("code");
    vector.className = "vector";
    vector.textContent = assessment.vector;
    this.container.appendChild(vector);

    const table = document.createElement("div");
    table.className = "metric-grid";
    for (const metric of METRIC_ORDER) {
      const label = document.createElement("label");
      label.textContent = METRIC_LABELS[metric];
      label.setAttribute("for", `metric-${metric}`);

      const select = document.createElement("select");
      select.id = `metric-${metric}`;
      select.setAttribute("data-metric", metric);
      for (const value of METRIC_VALUES[metric]) {
        const option = document.createElement("option");
        option.value = value;
        option.textContent = `${DISPLAY_NAMES[metric][value]} (${value})`;
        option.selected = value === assessment.metrics[metric];
        select.appendChild(option);
      }
      if (assessment.overridden_metrics.includes(metric)) {
        select.classList.add("overridden");
      }
      select.addEventListener("change", () => {
        void this.submitEdit(metric, select.value);
      });

      table.appendChild(label);
      table.appendChild(select);
    }
    this.container.appendChild(table);
  }
}
