// Parse-trace, result-table, timing, and help-panel renderers (pure
// string builders so the contract tests run without a DOM).

import { esc } from "./map.js";
import type { QueryError, QueryResponse, Results, Timing, Trace } from "./types.js";
import type { TimingMode } from "./state.js";

const LABEL_CLASSES: Record<string, string> = {
  TIME: "tag-time",
  NUMBER: "tag-number",
  CARDINAL: "tag-cardinal",
  QUANTITY: "tag-quantity",
  INFO: "tag-info",
};

export function renderTrace(trace: Trace): string {
  const spans = trace.tagged_spans
    .map((s) => `<span class="tag ${LABEL_CLASSES[s.label] ?? ""}" title="${esc(s.label)}">` +
      `${esc(s.text)}<sub>${esc(s.label)}</sub></span>`)
    .join(" ");
  const ex = trace.extraction;
  const slots: string[] = [];
  if (ex.relations.length) slots.push(`relations: ${esc(ex.relations.join(", "))}`);
  if (ex.locations.length) slots.push(`locations: ${esc(ex.locations.map((l) => l.name).join(", "))}`);
  if (ex.objects.length) slots.push(`objects: ${esc(ex.objects.map((o) => o.name).join(", "))}`);
  if (ex.k !== null) slots.push(`k: ${ex.k}`);
  if (ex.distance_m !== null) slots.push(`distance: ${ex.distance_m} m`);
  if (ex.period) slots.push(`period: [${ex.period[0]}, ${ex.period[1]}) ms`);
  if (ex.aggregate) slots.push(`aggregate: ${esc(ex.aggregate)}`);
  if (ex.predicate) slots.push(`predicate: ${esc(ex.predicate)}`);
  const best = trace.query_type;
  return `<div class="trace">` +
    `<div class="trace-spans">${spans}</div>` +
    `<div class="trace-type">query type: <strong>${esc(best)}</strong></div>` +
    `<div class="trace-slots">${slots.map((s) => `<span>${s}</span>`).join(" | ")}</div>` +
    `</div>`;
}

export function renderPlanText(planText: string): string {
  return `<pre class="plan-text">${esc(planText)}</pre>`;
}

const MAX_ROWS = 50;

export function renderTable(results: Results): string {
  const header = results.schema.map((a) => `<th>${esc(a.name)}</th>`).join("");
  const rows = results.rows.slice(0, MAX_ROWS)
    .map((row) => `<tr>${row.map((v) => `<td>${esc(shorten(v))}</td>`).join("")}</tr>`)
    .join("");
  const more = results.rows.length > MAX_ROWS
    ? `<p class="notice">showing ${MAX_ROWS} of ${results.rows.length} rows</p>` : "";
  return `<table class="results"><thead><tr>${header}</tr></thead>` +
    `<tbody>${rows}</tbody></table>${more}`;
}

function shorten(value: unknown, limit = 64): string {
  const s = String(value);
  return s.length <= limit ? s : s.slice(0, limit) + "…";
}

/** The switch shows exactly the recorded value for the active mode. */
export function renderTiming(timing: Timing, mode: TimingMode, switchEnabled: boolean): string {
  const active = mode === "optimized" && timing.optimized_ms != null
    ? timing.optimized_ms : timing.baseline_ms;
  const label = mode === "optimized" && timing.optimized_ms != null ? "optimized" : "baseline";
  const button = switchEnabled
    ? `<button id="timing-switch" class="switch">Switch</button>`
    : `<button id="timing-switch" class="switch" disabled>Switch</button>`;
  return `<div class="timing">` +
    `<span class="timing-value" data-mode="${label}">${active} ms (${label})</span> ${button} ` +
    `<span class="timing-translation">translation ${timing.translation_ms.toFixed(1)} ms</span>` +
    `</div>`;
}

export function renderHelp(error: QueryError): string {
  const suggestions = error.suggestions
    .map((s) => `<li><a href="#" class="suggestion" data-nlq="${esc(s)}">${esc(s)}</a></li>`)
    .join("");
  return `<div class="help">` +
    `<h3>Help: ${esc(error.category)} error</h3>` +
    `<p class="error-message">${esc(error.message)}</p>` +
    (suggestions
      ? `<p>Try one of these instead:</p><ul class="suggestions">${suggestions}</ul>`
      : "") +
    `</div>`;
}

export function renderWarnings(response: QueryResponse): string {
  if (!response.warnings?.length) return "";
  return `<div class="warnings">${response.warnings.map((w) => `<p>${esc(w)}</p>`).join("")}</div>`;
}
