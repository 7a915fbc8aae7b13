// Wire types for the nlsql HTTP API.

export interface ColumnInfo {
  name: string;
  data_type: 'textual' | 'numeric' | 'datetime';
}

export interface ResultTable {
  columns: ColumnInfo[];
  rows: unknown[][];
  row_count: number;
  truncated: boolean;
}

export interface ChartSpec {
  type: 'bar' | 'line' | 'pie' | 'scatter';
  x: string;
  y: string; // "*" means row count
  aggregate: 'none' | 'sum' | 'avg' | 'count';
  score: number;
}

export interface QueryResponse {
  sql: string;
  explanation: string;
  warnings: string[];
  from_cache: boolean;
  result: ResultTable | null;
  result_id: string | null;
  visualizations: ChartSpec[];
}

export interface HistoryEntry {
  id: number;
  database_id: string;
  raw_query: string;
  normalized_query: string;
  resolved_sql: string;
  explanation: string;
  timestamp: string;
  warnings: string[];
}

export interface DatabaseInfo {
  id: string;
  name: string;
  created_at: string;
  tables: string[];
  display_names: Record<string, string>;
}

export interface UploadResult {
  id: string;
  status: string;
  tables: string[];
}

export interface ApiError {
  error: string;
  kind: string;
}
