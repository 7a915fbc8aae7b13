// Client-side chart validity, mirroring the server's candidate rules so an
// override is rejected with a message instead of a broken render.

import type { ChartSpec, ResultTable } from './types.js';

export type ColumnKind = 'categorical' | 'numeric' | 'temporal';

export function columnKind(dataType: string): ColumnKind {
  if (dataType === 'numeric') {
    return 'numeric';
  }
  if (dataType === 'datetime') {
    return 'temporal';
  }
  return 'categorical';
}

function columnIndex(result: ResultTable, name: string): number {
  return result.columns.findIndex((c) => c.name === name);
}

function distinctCount(result: ResultTable, index: number): number {
  const seen = new Set<unknown>();
  for (const row of result.rows) {
    if (row[index] !== null && row[index] !== undefined) {
      seen.add(row[index]);
    }
  }
  return seen.size;
}

function aggregatedValues(
  result: ResultTable,
  xIndex: number,
  yIndex: number | null,
  aggregate: string,
): number[] {
  const groups = new Map<unknown, number[]>();
  for (const row of result.rows) {
    const key = row[xIndex];
    if (key === null || key === undefined) {
      continue;
    }
    if (!groups.has(key)) {
      groups.set(key, []);
    }
    if (yIndex !== null) {
      const value = row[yIndex];
      if (value !== null && value !== undefined) {
        groups.get(key)!.push(Number(value));
      }
    } else {
      groups.get(key)!.push(1);
    }
  }
  const out: number[] = [];
  for (const members of groups.values()) {
    if (aggregate === 'count') {
      out.push(members.length);
    } else if (members.length === 0) {
      out.push(0);
    } else if (aggregate === 'sum') {
      out.push(members.reduce((a, b) => a + b, 0));
    } else {
      out.push(members.reduce((a, b) => a + b, 0) / members.length);
    }
  }
  return out;
}

/** Returns null when the spec is valid for this result, else a message. */
export function validateChartSpec(spec: ChartSpec, result: ResultTable): string | null {
  const xIndex = columnIndex(result, spec.x);
  if (xIndex < 0) {
    return `unknown x column "${spec.x}"`;
  }
  const xKind = columnKind(result.columns[xIndex].data_type);
  const rowCount = result.rows.length;
  if (rowCount === 0) {
    return 'no rows to chart';
  }

  let yIndex: number | null = null;
  if (spec.y !== '*') {
    yIndex = columnIndex(result, spec.y);
    if (yIndex < 0) {
      return `unknown y column "${spec.y}"`;
    }
    if (columnKind(result.columns[yIndex].data_type) !== 'numeric') {
      return `y column "${spec.y}" must be numeric`;
    }
  } else if (spec.aggregate !== 'count') {
    return 'row-count charts need aggregate "count"';
  }

  const distinctX = distinctCount(result, xIndex);
  const histogram = result.columns.length === 1 && xKind === 'numeric' && spec.y === '*';
  if (spec.aggregate !== 'none' && !histogram && distinctX >= rowCount) {
    return 'grouping would not compress anything (every x value is unique)';
  }

  switch (spec.type) {
    case 'bar':
      if (histogram) {
        return null;
      }
      if (xKind !== 'categorical') {
        return 'bar charts need a categorical x axis';
      }
      if (distinctX > 50) {
        return 'too many categories for a bar chart (max 50)';
      }
      return null;
    case 'line':
      if (xKind === 'categorical') {
        return 'line charts need a temporal or numeric x axis';
      }
      return null;
    case 'pie':
      if (xKind !== 'categorical') {
        return 'pie charts need a categorical x axis';
      }
      if (distinctX < 2 || distinctX > 10) {
        return 'pie charts need 2-10 slices';
      }
      if (spec.aggregate === 'none') {
        return 'pie charts need aggregated values';
      }
      if (aggregatedValues(result, xIndex, yIndex, spec.aggregate).some((v) => v < 0)) {
        return 'pie charts cannot show negative values';
      }
      return null;
    case 'scatter':
      if (spec.aggregate !== 'none') {
        return 'scatter plots show raw values (aggregate must be "none")';
      }
      if (xKind !== 'numeric' || yIndex === null) {
        return 'scatter plots need numeric x and y axes';
      }
      if (rowCount < 10) {
        return 'scatter plots need at least 10 rows';
      }
      return null;
    default:
      return `unknown chart type "${spec.type}"`;
  }
}
