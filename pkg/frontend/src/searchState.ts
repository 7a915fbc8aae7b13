// Search page state. The ranked visualization list comes from the backend;
// the user can cycle through it or override the chart entirely. An override,
// when set, supersedes the ranked selection but never mutates the list.

import type { ApiClient } from './api.js';
import type { ChartSpec, HistoryEntry, QueryResponse } from './types.js';
import { validateChartSpec } from './validation.js';

export interface SearchViewState {
  databaseId: string | null;
  queryText: string;
  response: QueryResponse | null;
  activeVizIndex: number;
  override: ChartSpec | null;
  error: string | null;
  sidebarHistory: HistoryEntry[];
  pending: boolean;
}

export function initialState(): SearchViewState {
  return {
    databaseId: null,
    queryText: '',
    response: null,
    activeVizIndex: 0,
    override: null,
    error: null,
    sidebarHistory: [],
    pending: false,
  };
}

export function canSubmit(state: SearchViewState): boolean {
  return state.databaseId !== null && state.queryText.trim().length > 0 && !state.pending;
}

/** POST the question; on success reset the viz cursor and refresh the
 * sidebar from history page 1. Errors land in state.error and leave the
 * previous response untouched. */
export async function submitQuery(
  state: SearchViewState,
  api: ApiClient,
  text: string,
): Promise<SearchViewState> {
  if (state.databaseId === null || !text.trim()) {
    return state;
  }
  try {
    const response = await api.runQuery(state.databaseId, text);
    const sidebar = await api.history(state.databaseId, 1);
    return {
      ...state,
      queryText: text,
      response,
      activeVizIndex: 0,
      override: null,
      error: null,
      sidebarHistory: sidebar,
      pending: false,
    };
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    return { ...state, queryText: text, error: message, pending: false };
  }
}

/** Move the active visualization with wraparound; +1 next, -1 previous. */
export function cycleVisualization(state: SearchViewState, direction: 1 | -1): SearchViewState {
  const total = state.response?.visualizations.length ?? 0;
  if (total === 0) {
    return state;
  }
  const next = (state.activeVizIndex + direction + total) % total;
  return { ...state, activeVizIndex: next };
}

/** The chart to render: the user's override when set, else ranked[active]. */
export function activeChart(state: SearchViewState): ChartSpec | null {
  if (state.override) {
    return state.override;
  }
  const list = state.response?.visualizations ?? [];
  return list.length > 0 ? list[Math.min(state.activeVizIndex, list.length - 1)] : null;
}

export interface OverrideOutcome {
  state: SearchViewState;
  validationError: string | null;
}

/** Validate the spec against the current result's column types (same rules
 * as the server's candidate enumeration) and set it as the override. */
export function overrideChart(state: SearchViewState, spec: ChartSpec): OverrideOutcome {
  if (!state.response || !state.response.result) {
    return { state, validationError: 'run a query first' };
  }
  const problem = validateChartSpec(spec, state.response.result);
  if (problem !== null) {
    return { state, validationError: problem };
  }
  return { state: { ...state, override: spec }, validationError: null };
}

/** Drop the override and fall back to the ranked selection. */
export function clearOverride(state: SearchViewState): SearchViewState {
  return { ...state, override: null };
}

export function selectDatabase(state: SearchViewState, databaseId: string): SearchViewState {
  return { ...initialState(), databaseId, queryText: state.queryText };
}
