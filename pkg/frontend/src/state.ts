// View state and its pure transitions; the DOM layer just replays these.

import type { QueryResponse } from "./types.js";

export type Panel = "results" | "tree" | "help";
export type TimingMode = "optimized" | "baseline";

export interface ViewState {
  selectedDb: string | null;
  currentNlq: string;
  lastResponse: QueryResponse | null;
  timingMode: TimingMode;
  panel: Panel;
  pending: boolean;
  networkError: string | null;
}

export function initialState(): ViewState {
  return {
    selectedDb: null,
    currentNlq: "",
    lastResponse: null,
    timingMode: "optimized",
    panel: "results",
    pending: false,
    networkError: null,
  };
}

export function canSubmit(state: ViewState): boolean {
  return !state.pending && state.selectedDb !== null && state.currentNlq.trim().length > 0;
}

/** The timing switch is only enabled when both measurements are present. */
export function timingSwitchEnabled(state: ViewState): boolean {
  const timing = state.lastResponse?.timing;
  return !!timing && timing.optimized_ms !== null && timing.optimized_ms !== undefined;
}

export function shownTiming(state: ViewState): number | null {
  const timing = state.lastResponse?.timing;
  if (!timing) return null;
  if (state.timingMode === "optimized" && timing.optimized_ms != null) {
    return timing.optimized_ms;
  }
  return timing.baseline_ms;
}

export function treeAvailable(state: ViewState): boolean {
  return !!state.lastResponse?.operator_tree;
}

export function applyResponse(state: ViewState, response: QueryResponse): ViewState {
  return {
    ...state,
    lastResponse: response,
    pending: false,
    networkError: null,
    // an error payload flips straight to the help flow
    panel: response.error ? "help" : "results",
    timingMode: response.timing?.optimized_ms != null ? state.timingMode : "baseline",
  };
}

export function applyNetworkFailure(state: ViewState, message: string): ViewState {
  return { ...state, pending: false, networkError: message };
}

export function toggleTiming(state: ViewState): ViewState {
  if (!timingSwitchEnabled(state)) return state;
  return { ...state, timingMode: state.timingMode === "optimized" ? "baseline" : "optimized" };
}

export function switchPanel(state: ViewState, panel: Panel): ViewState {
  if (panel === "tree" && !treeAvailable(state)) return state;
  return { ...state, panel };
}
