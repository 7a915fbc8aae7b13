import type { ApiClient } from './api.js';
import type { HistoryEntry } from './types.js';

/** The Search page sidebar shows exactly history page 1 (newest first). */
export async function loadSidebar(api: ApiClient, databaseId: string): Promise<HistoryEntry[]> {
  return api.history(databaseId, 1);
}

/** Full History page with simple forward pagination. */
export async function loadHistoryPage(
  api: ApiClient,
  databaseId: string,
  page: number,
): Promise<HistoryEntry[]> {
  return api.history(databaseId, Math.max(1, page));
}
