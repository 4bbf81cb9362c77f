/**
 * Figure description read from a JSON file:
 *
 *   {
 *     "kind": "loglog_order" | "error_trace" | "phase_orbit" | "solution_error",
 *     "inputs": ["run1.csv", ...],       // paths relative to the spec file
 *     "labels": ["method one", ...],     // optional, one per input
 *     "columns": ["err_H", "err_I"],     // optional, error_trace only
 *     "title": "...",                    // optional
 *     "output": "figure.svg"
 *   }
 */

export const KINDS = ["loglog_order", "error_trace", "phase_orbit", "solution_error"] as const;
export type Kind = (typeof KINDS)[number];

export interface FigureSpec {
  kind: Kind;
  inputs: string[];
  labels?: string[];
  columns?: string[];
  title?: string;
  output: string;
}

export class SpecError extends Error {}

function isStringArray(v: unknown): v is string[] {
  return Array.isArray(v) && v.length > 0 && v.every((x) => typeof x === "string");
}

export function parseSpec(raw: unknown): FigureSpec {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new SpecError("figure spec must be a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  for (const key of Object.keys(obj)) {
    if (!["kind", "inputs", "labels", "columns", "title", "output"].includes(key)) {
      throw new SpecError(`figure spec has unknown field '${key}'`);
    }
  }
  const kind = obj.kind;
  if (typeof kind !== "string" || !(KINDS as readonly string[]).includes(kind)) {
    throw new SpecError(
      `figure spec kind '${String(kind)}' is not one of: ${KINDS.join(", ")}`,
    );
  }
  if (!isStringArray(obj.inputs)) {
    throw new SpecError("figure spec 'inputs' must be a non-empty list of file paths");
  }
  if (typeof obj.output !== "string" || obj.output.length === 0) {
    throw new SpecError("figure spec 'output' must be a file path");
  }
  if (obj.labels !== undefined) {
    if (!isStringArray(obj.labels) || obj.labels.length !== obj.inputs.length) {
      throw new SpecError("figure spec 'labels' must list one label per input");
    }
  }
  if (obj.columns !== undefined) {
    if (kind !== "error_trace") {
      throw new SpecError(`figure spec 'columns' only applies to error_trace, not ${kind}`);
    }
    if (!isStringArray(obj.columns)) {
      throw new SpecError("figure spec 'columns' must be a non-empty list of column names");
    }
  }
  if (obj.title !== undefined && typeof obj.title !== "string") {
    throw new SpecError("figure spec 'title' must be a string");
  }
  return {
    kind: kind as Kind,
    inputs: obj.inputs,
    labels: obj.labels as string[] | undefined,
    columns: obj.columns as string[] | undefined,
    title: obj.title as string | undefined,
    output: obj.output,
  };
}
