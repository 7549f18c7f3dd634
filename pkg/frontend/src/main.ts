// DOM glue: wires the pure renderers and state transitions to the page.

import { fetchDatabases, fetchExamples, submitQuery } from "./api.js";
import { renderMap } from "./map.js";
import {
  ViewState,
  applyNetworkFailure,
  applyResponse,
  canSubmit,
  initialState,
  switchPanel,
  timingSwitchEnabled,
  toggleTiming,
  treeAvailable,
} from "./state.js";
import { renderOperatorTree } from "./tree.js";
import {
  renderHelp,
  renderPlanText,
  renderTable,
  renderTiming,
  renderTrace,
  renderWarnings,
} from "./trace.js";

let state: ViewState = initialState();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setState(next: ViewState): void {
  state = next;
  render();
}

function render(): void {
  el<HTMLButtonElement>("submit").disabled = !canSubmit(state);
  el("network-banner").hidden = state.networkError === null;
  if (state.networkError !== null) {
    el("network-message").textContent = state.networkError;
  }

  for (const panel of ["results", "tree", "help"] as const) {
    el(`panel-${panel}`).hidden = state.panel !== panel;
    el(`tab-${panel}`).classList.toggle("active", state.panel === panel);
  }
  el<HTMLButtonElement>("tab-tree").disabled = !treeAvailable(state);

  const response = state.lastResponse;
  if (!response) return;

  if (response.error) {
    el("panel-help").innerHTML = renderHelp(response.error);
    for (const link of document.querySelectorAll<HTMLAnchorElement>(".suggestion")) {
      link.addEventListener("click", (ev) => {
        ev.preventDefault();
        el<HTMLTextAreaElement>("nlq").value = link.dataset.nlq ?? "";
        state = { ...state, currentNlq: link.dataset.nlq ?? "" };
        void submit();
      });
    }
    el("panel-tree").innerHTML = "";
    el("panel-results").innerHTML = "";
    return;
  }

  const trace = response.trace!;
  const results = response.results!;
  const timing = response.timing!;
  el("panel-results").innerHTML =
    renderTrace(trace) +
    renderWarnings(response) +
    renderPlanText(response.plan_text!) +
    renderTiming(timing, state.timingMode, timingSwitchEnabled(state)) +
    `<div class="split"><div class="map-holder">` +
    renderMap(results.geojson, trace.query_type) +
    `</div><div class="table-holder">` + renderTable(results) + `</div></div>`;
  el("panel-tree").innerHTML = renderOperatorTree(response.operator_tree!);
  el("panel-help").innerHTML = "";

  const switchBtn = document.getElementById("timing-switch");
  switchBtn?.addEventListener("click", () => setState(toggleTiming(state)));
}

async function submit(): Promise<void> {
  if (!canSubmit(state)) return;
  setState({ ...state, pending: true, networkError: null });
  try {
    const response = await submitQuery(
      state.selectedDb!, state.currentNlq,
      el<HTMLInputElement>("optimize").checked);
    setState(applyResponse(state, response));
  } catch (err) {
    setState(applyNetworkFailure(state, String(err)));
  }
}

async function loadExamples(db: string): Promise<void> {
  const holder = el("examples");
  try {
    const examples = await fetchExamples(db);
    holder.innerHTML = examples
      .map((e) => `<option>${e.nlq.replace(/&/g, "&amp;").replace(/</g, "&lt;")}</option>`)
      .join("");
  } catch {
    holder.innerHTML = "";
  }
}

async function init(): Promise<void> {
  const dbSelect = el<HTMLSelectElement>("db");
  try {
    const databases = await fetchDatabases();
    dbSelect.innerHTML = databases
      .map((d) => `<option value="${d.name}">${d.name}</option>`)
      .join("");
    if (databases.length) {
      state = { ...state, selectedDb: databases[0].name };
      void loadExamples(databases[0].name);
    }
  } catch (err) {
    state = applyNetworkFailure(state, String(err));
  }

  dbSelect.addEventListener("change", () => {
    setState({ ...state, selectedDb: dbSelect.value });
    void loadExamples(dbSelect.value);
  });
  const nlqBox = el<HTMLTextAreaElement>("nlq");
  nlqBox.addEventListener("input", () => setState({ ...state, currentNlq: nlqBox.value }));
  el<HTMLSelectElement>("examples").addEventListener("change", () => {
    const picked = el<HTMLSelectElement>("examples").value;
    nlqBox.value = picked;
    setState({ ...state, currentNlq: picked });
  });
  el("submit").addEventListener("click", () => void submit());
  el("retry").addEventListener("click", () => void submit());
  el("tab-results").addEventListener("click", () => setState(switchPanel(state, "results")));
  el("tab-tree").addEventListener("click", () => setState(switchPanel(state, "tree")));
  el("tab-help").addEventListener("click", () => setState(switchPanel(state, "help")));
  render();
}

document.addEventListener("DOMContentLoaded", () => void init());
