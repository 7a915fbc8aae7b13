// DOM wiring for the three pages: Upload, Search (with history sidebar),
// and History. Hash-routed, no framework.

import { HttpApiClient, RequestFailed } from './api.js';
import { renderChartSvg } from './charts.js';
import { loadHistoryPage } from './history.js';
import {
  SearchViewState,
  activeChart,
  canSubmit,
  clearOverride,
  cycleVisualization,
  initialState,
  overrideChart,
  selectDatabase,
  submitQuery,
} from './searchState.js';
import type { ChartSpec, DatabaseInfo, HistoryEntry, ResultTable } from './types.js';

const api = new HttpApiClient('');
let state: SearchViewState = initialState();
let databases: DatabaseInfo[] = [];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

function displayNames(): Record<string, string> {
  const info = databases.find((d) => d.id === state.databaseId);
  return info?.display_names ?? {};
}

function renderTable(result: ResultTable): HTMLElement {
  const names = displayNames();
  const head = el('tr', {}, result.columns.map((c) =>
    el('th', {}, [names[c.name] ?? c.name])));
  const body = result.rows.map((row) =>
    el('tr', {}, row.map((v) => el('td', {}, [v === null ? '' : String(v)]))));
  const table = el('table', { class: 'results' }, [el('thead', {}, [head]), el('tbody', {}, body)]);
  return table;
}

function renderWarnings(warnings: string[]): HTMLElement {
  return el('div', { class: 'warnings' },
    warnings.map((w) => el('p', { class: 'warning' }, [`⚠ ${w}`])));
}

function renderHistoryList(entries: HistoryEntry[], onPick: (q: string) => void): HTMLElement {
  const items = entries.map((entry) => {
    const link = el('a', { href: '#/search' }, [entry.raw_query]);
    link.addEventListener('click', () => onPick(entry.raw_query));
    return el('li', {}, [link, el('small', {}, [` ${entry.timestamp.slice(0, 19)}`])]);
  });
  return el('ul', { class: 'history' }, items);
}

async function refresh(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) {
    return;
  }
  root.replaceChildren();
  const route = window.location.hash || '#/search';
  const nav = el('nav', {}, [
    el('a', { href: '#/upload' }, ['Upload']),
    ' | ',
    el('a', { href: '#/search' }, ['Search']),
    ' | ',
    el('a', { href: '#/history' }, ['History']),
  ]);
  root.append(nav);
  if (route.startsWith('#/upload')) {
    root.append(await uploadPage());
  } else if (route.startsWith('#/history')) {
    root.append(await historyPage());
  } else {
    root.append(await searchPage());
  }
}

async function uploadPage(): Promise<HTMLElement> {
  const page = el('section', {}, [el('h2', {}, ['Upload a database'])]);
  const file = el('input', { type: 'file', accept: '.csv,.sqlite,.db' });
  const name = el('input', { type: 'text', placeholder: 'display name (optional)' });
  const config = el('textarea', {
    rows: '6', cols: '60',
    placeholder: '{"renames": {}, "synonym_map": {}, "datetime_columns": {}}',
  });
  const status = el('p', {});
  const button = el('button', {}, ['Upload']);
  button.addEventListener('click', async () => {
    const chosen = file.files?.[0];
    if (!chosen) {
      status.textContent = 'choose a csv or SQLite file first';
      return;
    }
    status.textContent = 'uploading…';
    try {
      const uploaded = await api.uploadDatabase(chosen, config.value || '{}', name.value);
      status.textContent = `ready: ${uploaded.id} (tables: ${uploaded.tables.join(', ')})`;
      databases = await api.listDatabases();
    } catch (err) {
      status.textContent = err instanceof Error ? err.message : String(err);
    }
  });
  page.append(file, name, el('div', {}, [config]), button, status);
  return page;
}

async function searchPage(): Promise<HTMLElement> {
  databases = await api.listDatabases();
  const page = el('section', { class: 'search-page' });
  const sidebar = el('aside', { class: 'sidebar' }, [el('h3', {}, ['Recent searches'])]);
  const main = el('div', { class: 'main' });

  const picker = el('select', {});
  picker.append(el('option', { value: '' }, ['select a database…']));
  for (const db of databases) {
    const option = el('option', { value: db.id }, [`${db.name} (${db.tables.join(', ')})`]);
    if (db.id === state.databaseId) {
      option.selected = true;
    }
    picker.append(option);
  }
  picker.addEventListener('change', () => {
    state = selectDatabase(state, picker.value);
    void refresh();
  });

  const box = el('input', { type: 'text', class: 'searchbox',
    placeholder: 'ask a question in plain English…' });
  box.value = state.queryText;
  const go = el('button', {}, ['Search']);
  const syncDisabled = () => {
    state = { ...state, queryText: box.value };
    go.disabled = !canSubmit(state);
  };
  box.addEventListener('input', syncDisabled);
  const run = async () => {
    state = { ...state, pending: true };
    state = await submitQuery(state, api, box.value);
    void refresh();
  };
  go.addEventListener('click', run);
  box.addEventListener('keydown', (event) => {
    if (event.key === 'Enter' && canSubmit(state)) {
      void run();
    }
  });
  syncDisabled();

  main.append(el('div', {}, [picker]), el('div', {}, [box, go]));

  if (state.error) {
    main.append(el('p', { class: 'error' }, [state.error]));
  }
  const response = state.response;
  if (response) {
    main.append(el('p', { class: 'sql' }, [el('code', {}, [response.sql])]));
    main.append(el('p', { class: 'explanation' }, [response.explanation]));
    if (response.from_cache) {
      main.append(el('p', { class: 'cache-note' }, ['answered from cache']));
    }
    if (response.warnings.length > 0) {
      main.append(renderWarnings(response.warnings));
    }
    if (response.result) {
      main.append(renderTable(response.result));
      if (response.result.truncated) {
        main.append(el('p', {}, [`showing the first ${response.result.row_count} rows`]));
      }
      const download = el('button', {}, ['Download csv']);
      download.addEventListener('click', async () => {
        try {
          const blob = await api.resultCsv(response.result_id!);
          const link = el('a', {
            href: URL.createObjectURL(blob),
            download: 'result.csv',
          });
          link.click();
        } catch (err) {
          if (err instanceof RequestFailed && err.kind === 'unknown_result') {
            state = { ...state, error: 'this result expired; please re-run the query' };
          } else {
            state = { ...state, error: err instanceof Error ? err.message : String(err) };
          }
          void refresh();
        }
      });
      main.append(download);
      main.append(renderChartPanel(response.result));
    }
  }

  sidebar.append(renderHistoryList(state.sidebarHistory, (q) => {
    box.value = q;
    void run();
  }));
  page.append(main, sidebar);
  return page;
}

function renderChartPanel(result: ResultTable): HTMLElement {
  const panel = el('div', { class: 'chart-panel' });
  const spec = activeChart(state);
  const total = state.response?.visualizations.length ?? 0;
  if (!spec) {
    panel.append(el('p', {}, ['no chart suggestions for this result']));
    return panel;
  }
  const controls = el('div', { class: 'chart-controls' });
  const prev = el('button', {}, ['◀ previous']);
  const next = el('button', {}, ['next ▶']);
  prev.addEventListener('click', () => {
    state = cycleVisualization(clearOverride(state), -1);
    void refresh();
  });
  next.addEventListener('click', () => {
    state = cycleVisualization(clearOverride(state), 1);
    void refresh();
  });
  const position = state.override
    ? 'custom chart'
    : `suggestion ${state.activeVizIndex + 1} of ${total}`;
  controls.append(prev, el('span', {}, [` ${position} `]), next);

  // Manual override: chart type against the current x/y of the active spec.
  const typePicker = el('select', {});
  for (const chartType of ['bar', 'line', 'pie', 'scatter'] as const) {
    const option = el('option', { value: chartType }, [chartType]);
    if (chartType === spec.type) {
      option.selected = true;
    }
    typePicker.append(option);
  }
  const validation = el('span', { class: 'validation' });
  typePicker.addEventListener('change', () => {
    const candidate: ChartSpec = { ...spec, type: typePicker.value as ChartSpec['type'] };
    const outcome = overrideChart(state, candidate);
    state = outcome.state;
    validation.textContent = outcome.validationError ?? '';
    if (!outcome.validationError) {
      void refresh();
    }
  });
  const reset = el('button', {}, ['back to suggestions']);
  reset.addEventListener('click', () => {
    state = clearOverride(state);
    void refresh();
  });
  controls.append(el('span', {}, [' view as: ']), typePicker, reset, validation);

  const holder = el('div', { class: 'chart' });
  holder.innerHTML = renderChartSvg(spec, result, displayNames());
  panel.append(controls, holder);
  return panel;
}

async function historyPage(): Promise<HTMLElement> {
  databases = await api.listDatabases();
  const page = el('section', {}, [el('h2', {}, ['History'])]);
  if (!state.databaseId) {
    page.append(el('p', {}, ['select a database on the Search page first']));
    return page;
  }
  let pageNumber = 1;
  const list = el('div', {});
  const load = async () => {
    const entries = await loadHistoryPage(api, state.databaseId!, pageNumber);
    list.replaceChildren(renderHistoryList(entries, (q) => {
      state = { ...state, queryText: q };
      window.location.hash = '#/search';
    }));
  };
  const older = el('button', {}, ['older']);
  const newer = el('button', {}, ['newer']);
  older.addEventListener('click', () => { pageNumber += 1; void load(); });
  newer.addEventListener('click', () => { pageNumber = Math.max(1, pageNumber - 1); void load(); });
  page.append(list, newer, older);
  await load();
  return page;
}

export function start(): void {
  window.addEventListener('hashchange', () => void refresh());
  void refresh();
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  start();
}
