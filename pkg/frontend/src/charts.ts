// Dependency-free SVG rendering of a chart spec over a result table.
// The spec's (type, x, y, aggregate) is the whole contract with the backend.

import type { ChartSpec, ResultTable } from './types.js';

const WIDTH = 560;
const HEIGHT = 320;
const PAD = 44;
const COLORS = ['#4e79a7', '#f28e2b', '#e15759', '#76b7b2', '#59a14f',
                '#edc948', '#b07aa1', '#ff9da7', '#9c755f', '#bab0ac'];

interface Point {
  label: string;
  x: number;
  y: number;
}

function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function seriesFor(spec: ChartSpec, result: ResultTable): Point[] {
  const xIndex = result.columns.findIndex((c) => c.name === spec.x);
  const yIndex = spec.y === '*' ? -1 : result.columns.findIndex((c) => c.name === spec.y);
  if (spec.aggregate === 'none') {
    return result.rows
      .filter((row) => row[xIndex] !== null && (yIndex < 0 || row[yIndex] !== null))
      .map((row) => ({
        label: String(row[xIndex]),
        x: Number(row[xIndex]),
        y: yIndex < 0 ? 1 : Number(row[yIndex]),
      }));
  }
  const groups = new Map<string, number[]>();
  for (const row of result.rows) {
    if (row[xIndex] === null || row[xIndex] === undefined) {
      continue;
    }
    const key = String(row[xIndex]);
    if (!groups.has(key)) {
      groups.set(key, []);
    }
    if (yIndex >= 0 && row[yIndex] !== null && row[yIndex] !== undefined) {
      groups.get(key)!.push(Number(row[yIndex]));
    } else if (yIndex < 0) {
      groups.get(key)!.push(1);
    }
  }
  const points: Point[] = [];
  let i = 0;
  for (const [label, values] of groups) {
    let y: number;
    if (spec.aggregate === 'count') {
      y = values.length;
    } else if (values.length === 0) {
      y = 0;
    } else {
      const total = values.reduce((a, b) => a + b, 0);
      y = spec.aggregate === 'avg' ? total / values.length : total;
    }
    points.push({ label, x: i, y });
    i += 1;
  }
  return points;
}

function axisTitle(spec: ChartSpec, displayNames: Record<string, string>): string {
  const x = displayNames[spec.x] ?? spec.x;
  const y = spec.y === '*' ? 'count' : (displayNames[spec.y] ?? spec.y);
  const agg = spec.aggregate === 'none' ? '' : ` (${spec.aggregate})`;
  return `${esc(y)}${agg} by ${esc(x)}`;
}

function barsSvg(points: Point[]): string {
  const max = Math.max(...points.map((p) => p.y), 1);
  const band = (WIDTH - 2 * PAD) / points.length;
  const parts: string[] = [];
  points.forEach((p, i) => {
    const h = ((HEIGHT - 2 * PAD) * p.y) / max;
    const x = PAD + i * band + band * 0.1;
    parts.push(
      `<rect x="${x.toFixed(1)}" y="${(HEIGHT - PAD - h).toFixed(1)}" ` +
      `width="${(band * 0.8).toFixed(1)}" height="${h.toFixed(1)}" fill="${COLORS[i % COLORS.length]}">` +
      `<title>${esc(p.label)}: ${p.y}</title></rect>`,
    );
    parts.push(
      `<text x="${(x + band * 0.4).toFixed(1)}" y="${HEIGHT - PAD + 14}" ` +
      `font-size="10" text-anchor="middle">${esc(p.label.slice(0, 9))}</text>`,
    );
  });
  return parts.join('');
}

function lineSvg(points: Point[], numericX: boolean): string {
  const ordered = numericX ? [...points].sort((a, b) => a.x - b.x) : points;
  const maxY = Math.max(...ordered.map((p) => p.y), 1);
  const minX = numericX ? Math.min(...ordered.map((p) => p.x)) : 0;
  const maxX = numericX ? Math.max(...ordered.map((p) => p.x)) : Math.max(ordered.length - 1, 1);
  const spanX = maxX - minX || 1;
  const coords = ordered.map((p, i) => {
    const xv = numericX ? (p.x - minX) / spanX : i / Math.max(ordered.length - 1, 1);
    const px = PAD + xv * (WIDTH - 2 * PAD);
    const py = HEIGHT - PAD - (p.y / maxY) * (HEIGHT - 2 * PAD);
    return `${px.toFixed(1)},${py.toFixed(1)}`;
  });
  return `<polyline fill="none" stroke="${COLORS[0]}" stroke-width="2" points="${coords.join(' ')}"/>`;
}

function pieSvg(points: Point[]): string {
  const total = points.reduce((a, p) => a + p.y, 0) || 1;
  const cx = WIDTH / 2;
  const cy = HEIGHT / 2;
  const r = Math.min(WIDTH, HEIGHT) / 2 - PAD / 2;
  let angle = -Math.PI / 2;
  const parts: string[] = [];
  points.forEach((p, i) => {
    const sweep = (p.y / total) * 2 * Math.PI;
    const x1 = cx + r * Math.cos(angle);
    const y1 = cy + r * Math.sin(angle);
    angle += sweep;
    const x2 = cx + r * Math.cos(angle);
    const y2 = cy + r * Math.sin(angle);
    const large = sweep > Math.PI ? 1 : 0;
    parts.push(
      `<path d="M${cx},${cy} L${x1.toFixed(1)},${y1.toFixed(1)} ` +
      `A${r},${r} 0 ${large} 1 ${x2.toFixed(1)},${y2.toFixed(1)} Z" ` +
      `fill="${COLORS[i % COLORS.length]}"><title>${esc(p.label)}: ${p.y}</title></path>`,
    );
  });
  return parts.join('');
}

function scatterSvg(points: Point[]): string {
  const minX = Math.min(...points.map((p) => p.x));
  const maxX = Math.max(...points.map((p) => p.x));
  const minY = Math.min(...points.map((p) => p.y));
  const maxY = Math.max(...points.map((p) => p.y));
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  return points
    .map((p) => {
      const px = PAD + ((p.x - minX) / spanX) * (WIDTH - 2 * PAD);
      const py = HEIGHT - PAD - ((p.y - minY) / spanY) * (HEIGHT - 2 * PAD);
      return `<circle cx="${px.toFixed(1)}" cy="${py.toFixed(1)}" r="3.5" fill="${COLORS[0]}" opacity="0.75"/>`;
    })
    .join('');
}

/** SVG markup for a chart spec; save-as-image works via native right click. */
export function renderChartSvg(
  spec: ChartSpec,
  result: ResultTable,
  displayNames: Record<string, string> = {},
): string {
  const points = seriesFor(spec, result);
  if (points.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}">` +
      `<text x="${WIDTH / 2}" y="${HEIGHT / 2}" text-anchor="middle">no data</text></svg>`;
  }
  let body: string;
  if (spec.type === 'bar') {
    body = barsSvg(points);
  } else if (spec.type === 'line') {
    body = lineSvg(points, spec.aggregate === 'none');
  } else if (spec.type === 'pie') {
    body = pieSvg(points);
  } else {
    body = scatterSvg(points);
  }
  const frame =
    `<line x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}" stroke="#999"/>` +
    `<line x1="${PAD}" y1="${PAD / 2}" x2="${PAD}" y2="${HEIGHT - PAD}" stroke="#999"/>`;
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">` +
    `<text x="${WIDTH / 2}" y="16" text-anchor="middle" font-size="13">${axisTitle(spec, displayNames)}</text>` +
    (spec.type === 'pie' ? '' : frame) +
    body +
    '</svg>'
  );
}
