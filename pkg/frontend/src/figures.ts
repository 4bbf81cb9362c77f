/**
 * The four figure kinds, each mapping parsed inputs to one chart:
 *
 *   loglog_order    order-measurement JSONs → log-log error-vs-h plot with
 *                   the fitted slope in each legend entry
 *   error_trace     trajectory CSVs → invariant-error traces (linear time,
 *                   log error); `columns` picks the error columns (err_H
 *                   by default)
 *   solution_error  trajectory CSVs → err_sol traces (linear time, log error)
 *   phase_orbit     trajectory CSVs → (q_1, q_2) orbits, or (q_1, p_1) for
 *                   one-degree-of-freedom runs
 */

import path from "node:path";

import { InputError, Table, column, hasColumn, parseCsv } from "./csv.js";
import { FigureSpec } from "./spec.js";
import { Series, renderChart } from "./svg.js";

export interface InputFile {
  /** path as written in the spec, used in error messages */
  name: string;
  text: string;
}

function seriesLabels(spec: FigureSpec): string[] {
  if (spec.labels) return spec.labels;
  return spec.inputs.map((p) => path.basename(p).replace(/\.[^.]*$/, ""));
}

interface OrderReport {
  h: number[];
  error: number[];
  fitted_slope: number;
}

function parseOrderReport(file: string, text: string): OrderReport {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new InputError(`input ${file} is not valid JSON: ${(err as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new InputError(`input ${file} must be a JSON object`);
  }
  const obj = raw as Record<string, unknown>;
  for (const field of ["h", "error"]) {
    const v = obj[field];
    if (!Array.isArray(v) || v.length === 0 || !v.every((x) => typeof x === "number")) {
      throw new InputError(`input ${file} is missing a numeric list field '${field}'`);
    }
  }
  const h = obj.h as number[];
  const error = obj.error as number[];
  if (h.length !== error.length) {
    throw new InputError(`input ${file}: 'h' and 'error' have different lengths`);
  }
  if (typeof obj.fitted_slope !== "number") {
    throw new InputError(`input ${file} is missing a numeric field 'fitted_slope'`);
  }
  return { h, error, fitted_slope: obj.fitted_slope };
}

function loglogOrder(spec: FigureSpec, inputs: InputFile[]): string {
  const labels = seriesLabels(spec);
  const series: Series[] = inputs.map((inp, i) => {
    const report = parseOrderReport(inp.name, inp.text);
    return {
      label: `${labels[i]} (slope ${report.fitted_slope.toFixed(2)})`,
      xs: report.h,
      ys: report.error,
    };
  });
  return renderChart({
    title: spec.title,
    xLabel: "step size h",
    yLabel: "error at the final time",
    xScale: "log",
    yScale: "log",
    series,
    markers: true,
  });
}

function traceChart(
  spec: FigureSpec,
  tables: Table[],
  columns: string[],
  yLabel: string,
): string {
  const labels = seriesLabels(spec);
  const series: Series[] = [];
  tables.forEach((table, i) => {
    const t = column(table, "t");
    for (const col of columns) {
      const ys = column(table, col);
      const label =
        columns.length > 1 ? `${labels[i]}: ${col}` : (labels[i] as string);
      series.push({ label, xs: t, ys });
    }
  });
  return renderChart({
    title: spec.title,
    xLabel: "time t",
    yLabel,
    xScale: "linear",
    yScale: "log",
    series,
  });
}

function phaseOrbit(spec: FigureSpec, tables: Table[]): string {
  const labels = seriesLabels(spec);
  const planar = tables.map((t) => hasColumn(t, "q_2"));
  if (new Set(planar).size > 1) {
    throw new InputError(
      "phase orbit inputs mix one- and two-degree-of-freedom trajectories",
    );
  }
  const twoD = planar[0] as boolean;
  const series: Series[] = tables.map((table, i) => ({
    label: labels[i] as string,
    xs: column(table, "q_1"),
    ys: column(table, twoD ? "q_2" : "p_1"),
  }));
  return renderChart({
    title: spec.title,
    xLabel: "q_1",
    yLabel: twoD ? "q_2" : "p_1",
    xScale: "linear",
    yScale: "linear",
    series,
    equalAspect: true,
  });
}

export function renderFigure(spec: FigureSpec, inputs: InputFile[]): string {
  if (spec.kind === "loglog_order") {
    return loglogOrder(spec, inputs);
  }
  const tables = inputs.map((inp) => parseCsv(inp.name, inp.text));
  switch (spec.kind) {
    case "error_trace":
      return traceChart(spec, tables, spec.columns ?? ["err_H"], "absolute invariant error");
    case "solution_error":
      return traceChart(spec, tables, ["err_sol"], "solution error (max norm)");
    case "phase_orbit":
      return phaseOrbit(spec, tables);
  }
}
