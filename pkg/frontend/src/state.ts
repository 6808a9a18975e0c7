// Per-tab view state and its transitions, kept pure for testability.
// Pending edits only ever hold values from the metric's allowed list;
// anything else is a programming error and throws.

import { METRIC_VALUES, type Metric } from "./types.js";

export interface ViewState {
  sessionId: string;
  selectedFunction: string | null;
  expandedSource: Set<string>;
  pendingEdits: Map<Metric, string>;
}

export function initialState(sessionId: string): ViewState {
  return {
    sessionId,
    selectedFunction: null,
    expandedSource: new Set(),
    pendingEdits: new Map(),
  };
}

/** Selecting a function abandons pending edits for the previous one. */
export function selectFunction(state: ViewState, fn: string): ViewState {
  if (state.selectedFunction === fn) {
    return state;
  }
  return { ...state, selectedFunction: fn, pendingEdits: new Map() };
}

export function setPendingEdit(state: ViewState, metric: Metric, value: string): ViewState {
  if (!METRIC_VALUES[metric].includes(value)) {
    throw new Error(`value ${value} is not allowed for ${metric}`);
  }
  const pendingEdits = new Map(state.pendingEdits);
  pendingEdits.set(metric, value);
  return { ...state, pendingEdits };
}

export function clearPendingEdit(state: ViewState, metric: Metric): ViewState {
  const pendingEdits = new Map(state.pendingEdits);
  pendingEdits.delete(metric);
  return { ...state, pendingEdits };
}

/** Returns [nextState, firstExpansion]: the event fires only on first expansion. */
export function expandSource(state: ViewState, fn: string): [ViewState, boolean] {
  if (state.expandedSource.has(fn)) {
    return [state, false];
  }
  const expandedSource = new Set(state.expandedSource);
  expandedSource.add(fn);
  return [{ ...state, expandedSource }, true];
}

export function collapseSource(state: ViewState, fn: string): ViewState {
  if (!state.expandedSource.has(fn)) {
    return state;
  }
  const expandedSource = new Set(state.expandedSource);
  expandedSource.delete(fn);
  return { ...state, expandedSource };
}
