/**
 * Figure renderer entry point:
 *
 *   csprk-plots <figure-spec.json>
 *
 * Input and output paths inside the spec are resolved relative to the spec
 * file's directory. All inputs are read and validated before the output is
 * written, so a failing run never leaves a file behind. Exit codes: 0 on
 * success, 1 on any spec/input problem (message on stderr).
 */

import fs from "node:fs";
import path from "node:path";
import { pathToFileURL } from "node:url";

import { renderFigure } from "./figures.js";
import { parseSpec } from "./spec.js";

export function run(
  argv: string[],
  stderr: (message: string) => void = (m) => console.error(m),
): number {
  try {
    const specPath = argv[0];
    if (!specPath || argv.length !== 1) {
      stderr("usage: csprk-plots <figure-spec.json>");
      return 1;
    }
    const resolved = path.resolve(specPath);
    const baseDir = path.dirname(resolved);
    let raw: unknown;
    try {
      raw = JSON.parse(fs.readFileSync(resolved, "utf8"));
    } catch (err) {
      stderr(`error: figure spec ${specPath}: ${(err as Error).message}`);
      return 1;
    }
    const spec = parseSpec(raw);
    const inputs = spec.inputs.map((name) => ({
      name,
      text: fs.readFileSync(path.resolve(baseDir, name), "utf8"),
    }));
    const svg = renderFigure(spec, inputs);
    fs.writeFileSync(path.resolve(baseDir, spec.output), svg);
    return 0;
  } catch (err) {
    if (err instanceof Error) {
      stderr(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invokedAs = process.argv[1];
if (invokedAs && import.meta.url === pathToFileURL(fs.realpathSync(invokedAs)).href) {
  process.exit(run(process.argv.slice(2)));
}
