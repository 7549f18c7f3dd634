// View state and its pure transitions; the DOM layer just replays these.
export function initialState() {
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
export function canSubmit(state) {
    return !state.pending && state.selectedDb !== null && state.currentNlq.trim().length > 0;
}
/** The timing switch is only enabled when both measurements are present. */
export function timingSwitchEnabled(state) {
    const timing = state.lastResponse?.timing;
    return !!timing && timing.optimized_ms !== null && timing.optimized_ms !== undefined;
}
export function shownTiming(state) {
    const timing = state.lastResponse?.timing;
    if (!timing)
        return null;
    if (state.timingMode === "optimized" && timing.optimized_ms != null) {
        return timing.optimized_ms;
    }
    return timing.baseline_ms;
}
export function treeAvailable(state) {
    return !!state.lastResponse?.operator_tree;
}
export function applyResponse(state, response) {
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
export function applyNetworkFailure(state, message) {
    return { ...state, pending: false, networkError: message };
}
export function toggleTiming(state) {
    if (!timingSwitchEnabled(state))
        return state;
    return { ...state, timingMode: state.timingMode === "optimized" ? "baseline" : "optimized" };
}
export function switchPanel(state, panel) {
    if (panel === "tree" && !treeAvailable(state))
        return state;
    return { ...state, panel };
}
