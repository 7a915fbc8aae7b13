import { describe, expect, it } from 'vitest';

import {
  activeChart,
  canSubmit,
  clearOverride,
  cycleVisualization,
  initialState,
  overrideChart,
  selectDatabase,
  submitQuery,
} from '../src/searchState.js';
import { MockApi, sampleResponse, sampleSpecs } from './mockApi.js';

function loadedState() {
  return {
    ...initialState(),
    databaseId: 'db1',
    response: sampleResponse(),
  };
}

describe('cycle_visualization', () => {
  it('wraps around forward: three nexts over k=3 return to index 0', () => {
    let state = loadedState();
    state = cycleVisualization(state, 1);
    state = cycleVisualization(state, 1);
    state = cycleVisualization(state, 1);
    expect(state.activeVizIndex).toBe(0);
  });

  it('prev from 0 lands on the last index', () => {
    const state = cycleVisualization(loadedState(), -1);
    expect(state.activeVizIndex).toBe(2);
  });

  it('single candidate stays at 0', () => {
    const state = loadedState();
    state.response!.visualizations = sampleSpecs().slice(0, 1);
    expect(cycleVisualization(state, 1).activeVizIndex).toBe(0);
    expect(cycleVisualization(state, -1).activeVizIndex).toBe(0);
  });

  it('without an override the rendered spec equals ranked[active] exactly', () => {
    let state = loadedState();
    expect(activeChart(state)).toEqual(state.response!.visualizations[0]);
    state = cycleVisualization(state, 1);
    expect(activeChart(state)).toEqual(state.response!.visualizations[1]);
  });
});

describe('override_chart', () => {
  it('pie to bar on categorical/numeric data renders the bar', () => {
    const state = loadedState();
    const { state: next, validationError } = overrideChart(state, {
      type: 'bar', x: 'region', y: 'revenue', aggregate: 'sum', score: 0,
    });
    expect(validationError).toBeNull();
    expect(activeChart(next)!.type).toBe('bar');
    // ranked list untouched
    expect(next.response!.visualizations).toEqual(sampleSpecs());
  });

  it('scatter on categorical x is rejected with a message', () => {
    const { state: next, validationError } = overrideChart(loadedState(), {
      type: 'scatter', x: 'region', y: 'revenue', aggregate: 'none', score: 0,
    });
    expect(validationError).toMatch(/numeric/);
    expect(next.override).toBeNull();
  });

  it('clearing the override returns to the ranked selection', () => {
    let state = loadedState();
    state = overrideChart(state, {
      type: 'bar', x: 'region', y: 'revenue', aggregate: 'avg', score: 0,
    }).state;
    expect(activeChart(state)!.aggregate).toBe('avg');
    state = clearOverride(state);
    expect(activeChart(state)).toEqual(state.response!.visualizations[0]);
  });
});

describe('submit_query', () => {
  it('stores the response and refreshes the sidebar from history page 1', async () => {
    const api = new MockApi();
    let state = selectDatabase(initialState(), 'db1');
    state = await submitQuery(state, api, 'revenue by region');
    expect(state.response!.sql).toContain('SELECT');
    expect(state.error).toBeNull();
    expect(state.activeVizIndex).toBe(0);
    expect(api.queriesRun).toEqual(['revenue by region']);
    expect(state.sidebarHistory).toEqual(await api.history('db1', 1));
  });

  it('renders backend errors inline and keeps the previous state', async () => {
    const api = new MockApi();
    let state = selectDatabase(initialState(), 'db1');
    state = await submitQuery(state, api, 'revenue by region');
    const good = state.response;
    api.failNextQuery = 'no translation for this; please check the query again';
    state = await submitQuery(state, api, 'gibberish');
    expect(state.error).toMatch(/check the query/);
    expect(state.response).toBe(good);
  });

  it('empty text cannot submit', () => {
    const state = selectDatabase(initialState(), 'db1');
    expect(canSubmit({ ...state, queryText: '' })).toBe(false);
    expect(canSubmit({ ...state, queryText: '   ' })).toBe(false);
    expect(canSubmit({ ...state, queryText: 'who?' })).toBe(true);
  });

  it('no database selected cannot submit', () => {
    expect(canSubmit({ ...initialState(), queryText: 'hello' })).toBe(false);
  });
});
