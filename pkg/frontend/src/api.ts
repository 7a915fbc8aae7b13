import type { DatabaseInfo, HistoryEntry, QueryResponse, UploadResult } from './types.js';

/** The backend contract the UI consumes; tests supply a mock implementation. */
export interface ApiClient {
  listDatabases(): Promise<DatabaseInfo[]>;
  uploadDatabase(file: File, configJson: string, name: string): Promise<UploadResult>;
  runQuery(databaseId: string, query: string, referenceTime?: string): Promise<QueryResponse>;
  history(databaseId: string, page: number): Promise<HistoryEntry[]>;
  resultCsv(resultId: string): Promise<Blob>;
}

export class RequestFailed extends Error {
  constructor(message: string, public readonly kind: string, public readonly status: number) {
    super(message);
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) {
    return;
  }
  let message = `request failed (${response.status})`;
  let kind = 'error';
  try {
    const body = await response.json();
    if (body && typeof body.error === 'string') {
      message = body.error;
      kind = body.kind ?? kind;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new RequestFailed(message, kind, response.status);
}

export class HttpApiClient implements ApiClient {
  constructor(private readonly baseUrl: string = '') {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async listDatabases(): Promise<DatabaseInfo[]> {
    const response = await fetch(this.url('/databases'));
    await raiseForStatus(response);
    return (await response.json()).databases;
  }

  async uploadDatabase(file: File, configJson: string, name: string): Promise<UploadResult> {
    const form = new FormData();
    form.append('file', file);
    form.append('config', configJson || '{}');
    form.append('name', name);
    const response = await fetch(this.url('/databases'), { method: 'POST', body: form });
    await raiseForStatus(response);
    return response.json();
  }

  async runQuery(databaseId: string, query: string, referenceTime?: string): Promise<QueryResponse> {
    const body: Record<string, string> = { query };
    if (referenceTime) {
      body.reference_time = referenceTime;
    }
    const response = await fetch(this.url(`/databases/${databaseId}/query`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    await raiseForStatus(response);
    return response.json();
  }

  async history(databaseId: string, page: number): Promise<HistoryEntry[]> {
    const response = await fetch(this.url(`/databases/${databaseId}/history?page=${page}`));
    await raiseForStatus(response);
    return (await response.json()).entries;
  }

  async resultCsv(resultId: string): Promise<Blob> {
    const response = await fetch(this.url(`/results/${resultId}/csv`));
    await raiseForStatus(response);
    return response.blob();
  }
}
