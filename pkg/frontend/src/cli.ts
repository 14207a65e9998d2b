#!/usr/bin/env node
/**
 * figplots --figure fig2 --in scan.csv --out fig2.svg
 *
 * Renders a figure from a coolsim CSV table. Output is SVG; a requested
 * .png extension is rewritten to .svg (this renderer is vector-only).
 */
import { writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseCsv, SchemaError } from "./csv.js";
import { FIGURE_IDS, FigureId, renderFigure } from "./figures.js";

function parseArgs(argv: string[]): { figure: FigureId; input: string; output: string } {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new SchemaError(`usage: figplots --figure <${FIGURE_IDS.join("|")}> --in table.csv --out figure.svg`);
    }
    flags.set(key.slice(2), value);
  }
  const figure = flags.get("figure");
  const input = flags.get("in");
  const output = flags.get("out");
  if (!figure || !input || !output) {
    throw new SchemaError("missing required flag: --figure, --in and --out are all required");
  }
  if (!FIGURE_IDS.includes(figure as FigureId)) {
    throw new SchemaError(`unknown figure ${figure}; expected one of ${FIGURE_IDS.join(", ")}`);
  }
  return { figure: figure as FigureId, input, output };
}

export function main(argv: string[]): number {
  try {
    const { figure, input, output } = parseArgs(argv);
    const rows = parseCsv(input);
    const svg = renderFigure(figure, rows);
    let target = output;
    if (target.endsWith(".png")) {
      target = target.slice(0, -4) + ".svg";
      console.error(`note: writing vector output to ${target}`);
    }
    writeFileSync(target, svg, "utf-8");
    console.log(`wrote ${target}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
