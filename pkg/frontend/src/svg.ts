/**
 * Minimal deterministic SVG chart writer: linear/log scales, tick and grid
 * generation, polyline series with optional markers, legend. No timestamps
 * or random ids anywhere, so repeated renders produce identical bytes.
 */

import { InputError } from "./csv.js";

export interface Series {
  label: string;
  xs: number[];
  ys: number[];
}

export interface ChartOptions {
  title?: string;
  xLabel: string;
  yLabel: string;
  xScale: "linear" | "log";
  yScale: "linear" | "log";
  series: Series[];
  markers?: boolean;
  equalAspect?: boolean;
}

const WIDTH = 780;
const HEIGHT = 500;
const MARGIN = { top: 52, right: 28, bottom: 58, left: 86 };
const BOX = {
  x0: MARGIN.left,
  y0: MARGIN.top,
  x1: WIDTH - MARGIN.right,
  y1: HEIGHT - MARGIN.bottom,
};

export const PALETTE = [
  "#0072B2",
  "#D55E00",
  "#009E73",
  "#CC79A7",
  "#E69F00",
  "#56B4E9",
  "#333333",
];

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const px = (v: number): string => v.toFixed(2);

interface Tick {
  value: number;
  label: string;
}

function linearTickStep(span: number): number {
  const raw = span / 6;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const factor = norm >= 5 ? 5 : norm >= 2 ? 2 : 1;
  return factor * mag;
}

function formatLinear(value: number, step: number): string {
  if (value === 0) return "0";
  if (Math.abs(value) >= 1e5 || step < 1e-4) return value.toExponential(1);
  const decimals = Math.max(0, -Math.floor(Math.log10(step) + 1e-9));
  return value.toFixed(Math.min(decimals, 6));
}

function linearTicks(min: number, max: number): Tick[] {
  const step = linearTickStep(max - min);
  const ticks: Tick[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    const value = Math.abs(v) < step * 1e-9 ? 0 : v;
    ticks.push({ value, label: formatLinear(value, step) });
  }
  return ticks;
}

function formatDecade(exp: number): string {
  return exp === 0 ? "1" : `1e${exp}`;
}

function logTicks(min: number, max: number): Tick[] {
  const lo = Math.ceil(Math.log10(min) - 1e-9);
  const hi = Math.floor(Math.log10(max) + 1e-9);
  const every = Math.max(1, Math.ceil((hi - lo + 1) / 10));
  const ticks: Tick[] = [];
  for (let e = lo; e <= hi; e += every) {
    ticks.push({ value: Math.pow(10, e), label: formatDecade(e) });
  }
  if (ticks.length <= 2) {
    // narrow range: fall back to 1-2-5 mantissa ticks
    const fine: Tick[] = [];
    for (let e = Math.floor(Math.log10(min)); e <= hi + 1; e += 1) {
      for (const m of [1, 2, 5]) {
        const v = m * Math.pow(10, e);
        if (v >= min * 0.999 && v <= max * 1.001) {
          fine.push({ value: v, label: m === 1 ? formatDecade(e) : `${m}e${e}` });
        }
      }
    }
    return fine.length > ticks.length ? fine : ticks;
  }
  return ticks;
}

interface Scale {
  map(v: number): number;
  ticks: Tick[];
}

function makeScale(
  kind: "linear" | "log",
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  if (kind === "log") {
    const l0 = Math.log10(d0);
    const l1 = Math.log10(d1);
    return {
      map: (v) => r0 + ((Math.log10(v) - l0) / (l1 - l0)) * (r1 - r0),
      ticks: logTicks(d0, d1),
    };
  }
  return {
    map: (v) => r0 + ((v - d0) / (d1 - d0)) * (r1 - r0),
    ticks: linearTicks(d0, d1),
  };
}

function dataRange(values: number[], kind: "linear" | "log", what: string): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v) && (kind === "linear" || v > 0));
  if (finite.length === 0) {
    throw new InputError(`${what} has no plottable values${kind === "log" ? " (log axis needs positive numbers)" : ""}`);
  }
  let min = Math.min(...finite);
  let max = Math.max(...finite);
  if (kind === "log") {
    if (min === max) {
      min /= 10;
      max *= 10;
    }
    return [Math.pow(10, Math.floor(Math.log10(min))), Math.pow(10, Math.ceil(Math.log10(max)))];
  }
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const pad = 0.05 * (max - min);
  return [min - pad, max + pad];
}

function seriesPath(s: Series, sx: Scale, sy: Scale, yKind: "linear" | "log"): string {
  const cmds: string[] = [];
  let pen = false;
  for (let i = 0; i < s.xs.length; i += 1) {
    const x = s.xs[i] as number;
    const y = s.ys[i] as number;
    const ok = Number.isFinite(x) && Number.isFinite(y) && (yKind === "linear" || y > 0);
    if (!ok) {
      pen = false;
      continue;
    }
    cmds.push(`${pen ? "L" : "M"}${px(sx.map(x))},${px(sy.map(y))}`);
    pen = true;
  }
  return cmds.join(" ");
}

export function renderChart(opts: ChartOptions): string {
  if (opts.series.length === 0) {
    throw new InputError("chart has no series to draw");
  }
  let xDomain = dataRange(
    opts.series.flatMap((s) => s.xs),
    opts.xScale,
    `x data (${opts.xLabel})`,
  );
  let yDomain = dataRange(
    opts.series.flatMap((s) => s.ys),
    opts.yScale,
    `y data (${opts.yLabel})`,
  );
  for (const s of opts.series) {
    const plottable = s.ys.some(
      (y, i) =>
        Number.isFinite(y) &&
        Number.isFinite(s.xs[i] as number) &&
        (opts.yScale === "linear" || y > 0),
    );
    if (!plottable) {
      throw new InputError(
        `series '${s.label}' has no plottable values${opts.yScale === "log" ? " (log axis needs positive numbers)" : ""}`,
      );
    }
  }

  if (opts.equalAspect && opts.xScale === "linear" && opts.yScale === "linear") {
    const boxW = BOX.x1 - BOX.x0;
    const boxH = BOX.y1 - BOX.y0;
    const ux = (xDomain[1] - xDomain[0]) / boxW;
    const uy = (yDomain[1] - yDomain[0]) / boxH;
    const u = Math.max(ux, uy);
    const growX = (u * boxW - (xDomain[1] - xDomain[0])) / 2;
    const growY = (u * boxH - (yDomain[1] - yDomain[0])) / 2;
    xDomain = [xDomain[0] - growX, xDomain[1] + growX];
    yDomain = [yDomain[0] - growY, yDomain[1] + growY];
  }

  const sx = makeScale(opts.xScale, xDomain, [BOX.x0, BOX.x1]);
  const sy = makeScale(opts.yScale, yDomain, [BOX.y1, BOX.y0]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  if (opts.title) {
    parts.push(
      `<text x="${WIDTH / 2}" y="30" text-anchor="middle" font-family="Helvetica, Arial, sans-serif" font-size="16" font-weight="bold" fill="#222222">${escapeXml(opts.title)}</text>`,
    );
  }

  // grid and ticks
  for (const t of sx.ticks) {
    const x = px(sx.map(t.value));
    parts.push(
      `<line x1="${x}" y1="${BOX.y0}" x2="${x}" y2="${BOX.y1}" stroke="#e4e4e4" stroke-width="1"/>`,
      `<line x1="${x}" y1="${BOX.y1}" x2="${x}" y2="${BOX.y1 + 5}" stroke="#555555" stroke-width="1"/>`,
      `<text x="${x}" y="${BOX.y1 + 19}" text-anchor="middle" font-family="Helvetica, Arial, sans-serif" font-size="11" fill="#333333">${escapeXml(t.label)}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const y = px(sy.map(t.value));
    parts.push(
      `<line x1="${BOX.x0}" y1="${y}" x2="${BOX.x1}" y2="${y}" stroke="#e4e4e4" stroke-width="1"/>`,
      `<line x1="${BOX.x0 - 5}" y1="${y}" x2="${BOX.x0}" y2="${y}" stroke="#555555" stroke-width="1"/>`,
      `<text x="${BOX.x0 - 9}" y="${y}" dy="0.32em" text-anchor="end" font-family="Helvetica, Arial, sans-serif" font-size="11" fill="#333333">${escapeXml(t.label)}</text>`,
    );
  }
  parts.push(
    `<rect x="${BOX.x0}" y="${BOX.y0}" width="${BOX.x1 - BOX.x0}" height="${BOX.y1 - BOX.y0}" fill="none" stroke="#555555" stroke-width="1"/>`,
  );

  // axis titles
  parts.push(
    `<text x="${(BOX.x0 + BOX.x1) / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-family="Helvetica, Arial, sans-serif" font-size="13" fill="#222222">${escapeXml(opts.xLabel)}</text>`,
    `<text x="20" y="${(BOX.y0 + BOX.y1) / 2}" text-anchor="middle" font-family="Helvetica, Arial, sans-serif" font-size="13" fill="#222222" transform="rotate(-90 20 ${(BOX.y0 + BOX.y1) / 2})">${escapeXml(opts.yLabel)}</text>`,
  );

  // series
  opts.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length] as string;
    const d = seriesPath(s, sx, sy, opts.yScale);
    parts.push(
      `<path d="${d}" fill="none" stroke="${color}" stroke-width="1.6" stroke-linejoin="round"/>`,
    );
    if (opts.markers) {
      for (let j = 0; j < s.xs.length; j += 1) {
        const x = s.xs[j] as number;
        const y = s.ys[j] as number;
        if (Number.isFinite(x) && Number.isFinite(y) && (opts.yScale === "linear" || y > 0)) {
          parts.push(
            `<circle cx="${px(sx.map(x))}" cy="${px(sy.map(y))}" r="3.2" fill="${color}"/>`,
          );
        }
      }
    }
  });

  // legend, top-right inside the plot box
  const labelChars = Math.max(...opts.series.map((s) => s.label.length));
  const legendW = Math.min(labelChars * 6.6 + 44, BOX.x1 - BOX.x0 - 16);
  const legendH = opts.series.length * 17 + 10;
  const lx = BOX.x1 - legendW - 8;
  const ly = BOX.y0 + 8;
  parts.push(
    `<rect x="${px(lx)}" y="${ly}" width="${px(legendW)}" height="${legendH}" fill="#ffffff" fill-opacity="0.88" stroke="#bbbbbb" stroke-width="0.8"/>`,
  );
  opts.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length] as string;
    const y = ly + 14 + i * 17;
    parts.push(
      `<line x1="${px(lx + 8)}" y1="${y - 4}" x2="${px(lx + 30)}" y2="${y - 4}" stroke="${color}" stroke-width="2.2"/>`,
      `<text x="${px(lx + 36)}" y="${y}" font-family="Helvetica, Arial, sans-serif" font-size="12" fill="#222222">${escapeXml(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
