/** Multi-panel log-log SVG renderer: one panel per model, one curve per
 * (formula, alpha) group, dashed reference slope lines anchored at the first
 * data point of each panel. Hand-rolled SVG strings, no runtime deps. */

import { SchemaError, SweepRow } from "./csv.js";

export interface PlotOptions {
  slopes: number[];
  title?: string;
  groupBy?: (row: SweepRow) => string; // curve key inside a panel
  panelBy?: (row: SweepRow) => string; // panel key
  x?: (row: SweepRow) => number;
}

const PANEL_W = 360;
const PANEL_H = 340;
const MARGIN = { top: 48, right: 16, bottom: 42, left: 64 };
const LEGEND_H = 16;

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

interface Scale {
  min: number;
  max: number;
  toPx(v: number): number;
}

function logScale(min: number, max: number, px0: number, px1: number): Scale {
  const lmin = Math.log10(min);
  const lmax = Math.log10(max);
  const span = lmax - lmin || 1;
  return {
    min,
    max,
    toPx: (v: number) => px0 + ((Math.log10(v) - lmin) / span) * (px1 - px0),
  };
}

function decadeTicks(min: number, max: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(min)); e <= Math.floor(Math.log10(max)); e++) {
    ticks.push(10 ** e);
  }
  return ticks;
}

function fmtPow10(v: number): string {
  const e = Math.round(Math.log10(v));
  return `1e${e}`;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderPanels(rows: SweepRow[], options: PlotOptions): string {
  if (rows.length === 0) {
    throw new SchemaError("no rows to plot");
  }
  const x = options.x ?? ((row: SweepRow) => row.t);
  const panelBy = options.panelBy ?? ((row: SweepRow) => row.model);
  const groupBy =
    options.groupBy ??
    ((row: SweepRow) =>
      row.alpha === 1.0 ? row.formula : `${row.formula} a=${row.alpha}`);

  const panels = new Map<string, SweepRow[]>();
  for (const row of rows) {
    const key = panelBy(row);
    if (!panels.has(key)) panels.set(key, []);
    panels.get(key)!.push(row);
  }

  const names = [...panels.keys()].sort();
  const width = MARGIN.left + names.length * (PANEL_W + MARGIN.right);
  let maxCurves = 0;
  for (const panelRows of panels.values()) {
    maxCurves = Math.max(maxCurves, new Set(panelRows.map(groupBy)).size);
  }
  const legendRows = Math.ceil(maxCurves / 2);
  const height = MARGIN.top + PANEL_H + MARGIN.bottom + legendRows * LEGEND_H + 8;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (options.title) {
    parts.push(
      `<text x="${width / 2}" y="18" text-anchor="middle" font-size="14">` +
        `${esc(options.title)}</text>`,
    );
  }

  names.forEach((name, index) => {
    const panelRows = panels.get(name)!;
    const left = MARGIN.left + index * (PANEL_W + MARGIN.right);
    parts.push(renderPanel(name, panelRows, left, options.slopes, x, groupBy,
                           legendRows));
  });

  parts.push("</svg>");
  return parts.join("\n");
}

function renderPanel(
  name: string,
  rows: SweepRow[],
  left: number,
  slopes: number[],
  x: (row: SweepRow) => number,
  groupBy: (row: SweepRow) => string,
  legendRows: number,
): string {
  const top = MARGIN.top;
  const right = left + PANEL_W;
  const bottom = top + PANEL_H;

  const xs = rows.map(x);
  const ys = rows.map((row) => Math.max(row.error, 1e-18));
  const sx = logScale(Math.min(...xs), Math.max(...xs), left, right);
  const sy = logScale(Math.min(...ys), Math.max(...ys), bottom, top);

  const parts: string[] = [];
  parts.push(
    `<rect x="${left}" y="${top}" width="${PANEL_W}" height="${PANEL_H}" ` +
      `fill="none" stroke="#333"/>`,
  );
  parts.push(
    `<text x="${left + PANEL_W / 2}" y="${top - 8}" text-anchor="middle" ` +
      `font-size="13">${esc(name)}</text>`,
  );

  for (const tick of decadeTicks(sx.min, sx.max)) {
    const px = sx.toPx(tick);
    parts.push(
      `<line x1="${px.toFixed(1)}" y1="${top}" x2="${px.toFixed(1)}" ` +
        `y2="${bottom}" stroke="#eee"/>`,
      `<text x="${px.toFixed(1)}" y="${bottom + 14}" text-anchor="middle">` +
        `${fmtPow10(tick)}</text>`,
    );
  }
  for (const tick of decadeTicks(sy.min, sy.max)) {
    const py = sy.toPx(tick);
    parts.push(
      `<line x1="${left}" y1="${py.toFixed(1)}" x2="${right}" ` +
        `y2="${py.toFixed(1)}" stroke="#eee"/>`,
      `<text x="${left - 4}" y="${(py + 3).toFixed(1)}" text-anchor="end">` +
        `${fmtPow10(tick)}</text>`,
    );
  }
  parts.push(
    `<text x="${left + PANEL_W / 2}" y="${bottom + 30}" text-anchor="middle">t</text>`,
    `<text x="${left - 48}" y="${top + PANEL_H / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 ${left - 48} ${top + PANEL_H / 2})">error</text>`,
  );

  // reference slope guides, anchored at the first data point of the panel
  const sorted = [...rows].sort((a, b) => x(a) - x(b));
  const anchor = sorted[0];
  const anchorY = Math.max(anchor.error, 1e-18);
  for (const slope of slopes) {
    const x0 = x(anchor);
    const x1 = sx.max;
    const y1 = anchorY * (x1 / x0) ** slope;
    parts.push(
      `<line x1="${sx.toPx(x0).toFixed(1)}" y1="${sy.toPx(anchorY).toFixed(1)}" ` +
        `x2="${sx.toPx(x1).toFixed(1)}" y2="${sy.toPx(Math.max(y1, 1e-18)).toFixed(1)}" ` +
        `stroke="#999" stroke-dasharray="5,4" class="ref-slope" data-slope="${slope}"/>`,
    );
    parts.push(
      `<text x="${sx.toPx(x1).toFixed(1)}" y="${(sy.toPx(Math.max(y1, 1e-18)) - 3).toFixed(1)}" ` +
        `text-anchor="end" fill="#999">t^${slope}</text>`,
    );
  }

  const curves = new Map<string, SweepRow[]>();
  for (const row of sorted) {
    const key = groupBy(row);
    if (!curves.has(key)) curves.set(key, []);
    curves.get(key)!.push(row);
  }
  let ci = 0;
  for (const [key, curveRows] of [...curves.entries()].sort()) {
    const color = PALETTE[ci % PALETTE.length];
    const pts = curveRows
      .map(
        (row) =>
          `${sx.toPx(x(row)).toFixed(1)},` +
          `${sy.toPx(Math.max(row.error, 1e-18)).toFixed(1)}`,
      )
      .join(" ");
    const dash = key.endsWith("!tri") ? ' stroke-dasharray="2,3"' : "";
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" ` +
        `stroke-width="1.5" class="curve" data-curve="${esc(key)}"${dash}/>`,
    );
    // legend entry
    const col = ci % 2;
    const rowIdx = Math.floor(ci / 2);
    const lx = left + 8 + col * (PANEL_W / 2);
    const ly = bottom + 42 + rowIdx * LEGEND_H;
    if (rowIdx < legendRows) {
      parts.push(
        `<line x1="${lx}" y1="${ly - 3}" x2="${lx + 16}" y2="${ly - 3}" ` +
          `stroke="${color}" stroke-width="2"${dash}/>`,
        `<text x="${lx + 20}" y="${ly}">${esc(key)}</text>`,
      );
    }
    ci += 1;
  }
  return parts.join("\n");
}
