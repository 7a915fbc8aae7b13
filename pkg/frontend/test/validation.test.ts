import { describe, expect, it } from 'vitest';

import type { ChartSpec, ResultTable } from '../src/types.js';
import { columnKind, validateChartSpec } from '../src/validation.js';
import { sampleResult } from './mockApi.js';

function spec(overrides: Partial<ChartSpec>): ChartSpec {
  return { type: 'bar', x: 'region', y: 'revenue', aggregate: 'sum', score: 0, ...overrides };
}

function numericPair(rows: number): ResultTable {
  return {
    columns: [{ name: 'a', data_type: 'numeric' }, { name: 'b', data_type: 'numeric' }],
    rows: Array.from({ length: rows }, (_, i) => [i, i * 2]),
    row_count: rows,
    truncated: false,
  };
}

describe('column kinds mirror the server', () => {
  it('maps data types', () => {
    expect(columnKind('numeric')).toBe('numeric');
    expect(columnKind('datetime')).toBe('temporal');
    expect(columnKind('textual')).toBe('categorical');
  });
});

describe('validateChartSpec', () => {
  it('accepts bar over categorical/numeric', () => {
    expect(validateChartSpec(spec({}), sampleResult())).toBeNull();
  });

  it('rejects scatter on categorical x', () => {
    expect(validateChartSpec(
      spec({ type: 'scatter', aggregate: 'none' }), sampleResult(),
    )).toMatch(/numeric/);
  });

  it('rejects scatter under 10 rows, accepts at 10', () => {
    const nine = numericPair(9);
    const ten = numericPair(10);
    const scatter = spec({ type: 'scatter', x: 'a', y: 'b', aggregate: 'none' });
    expect(validateChartSpec(scatter, nine)).toMatch(/10 rows/);
    expect(validateChartSpec(scatter, ten)).toBeNull();
  });

  it('rejects line on categorical x', () => {
    expect(validateChartSpec(spec({ type: 'line' }), sampleResult())).toMatch(/temporal or numeric/);
  });

  it('accepts line on temporal x', () => {
    const table: ResultTable = {
      columns: [{ name: 'd', data_type: 'datetime' }, { name: 'v', data_type: 'numeric' }],
      rows: [['2021-06-01', 1], ['2021-06-02', 2]],
      row_count: 2,
      truncated: false,
    };
    expect(validateChartSpec(spec({ type: 'line', x: 'd', y: 'v', aggregate: 'none' }), table)).toBeNull();
  });

  it('pie needs 2-10 slices', () => {
    expect(validateChartSpec(spec({ type: 'pie' }), sampleResult())).toBeNull();
    const many: ResultTable = {
      columns: [{ name: 'k', data_type: 'textual' }, { name: 'v', data_type: 'numeric' }],
      rows: Array.from({ length: 24 }, (_, i) => [`k${i % 12}`, i]),
      row_count: 24,
      truncated: false,
    };
    expect(validateChartSpec(spec({ type: 'pie', x: 'k', y: 'v' }), many)).toMatch(/slices/);
  });

  it('pie rejects negative aggregated values and raw values', () => {
    const negative: ResultTable = {
      columns: [{ name: 'k', data_type: 'textual' }, { name: 'v', data_type: 'numeric' }],
      rows: [['a', -5], ['b', 3], ['a', -1]],
      row_count: 3,
      truncated: false,
    };
    expect(validateChartSpec(spec({ type: 'pie', x: 'k', y: 'v' }), negative)).toMatch(/negative/);
    expect(validateChartSpec(spec({ type: 'pie', aggregate: 'none' }), sampleResult())).toMatch(/aggregated/);
  });

  it('rejects unknown columns and non-numeric y', () => {
    expect(validateChartSpec(spec({ x: 'nope' }), sampleResult())).toMatch(/unknown x/);
    expect(validateChartSpec(spec({ y: 'nope' }), sampleResult())).toMatch(/unknown y/);
    expect(validateChartSpec(spec({ y: 'region', x: 'revenue' }), sampleResult())).toMatch(/numeric/);
  });

  it('count aggregation needs grouping to compress', () => {
    const unique: ResultTable = {
      columns: [{ name: 'k', data_type: 'textual' }, { name: 'v', data_type: 'numeric' }],
      rows: [['a', 1], ['b', 2], ['c', 3]],
      row_count: 3,
      truncated: false,
    };
    expect(validateChartSpec(spec({ y: '*', aggregate: 'count', x: 'k' }), unique)).toMatch(/unique/);
  });

  it('allows the single-numeric-column histogram', () => {
    const single: ResultTable = {
      columns: [{ name: 'v', data_type: 'numeric' }],
      rows: Array.from({ length: 12 }, (_, i) => [i]),
      row_count: 12,
      truncated: false,
    };
    expect(validateChartSpec(spec({ type: 'bar', x: 'v', y: '*', aggregate: 'count' }), single)).toBeNull();
  });
});
