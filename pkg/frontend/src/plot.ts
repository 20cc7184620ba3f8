#!/usr/bin/env node
/** CLI: render a sweep CSV into a multi-panel log-log SVG.
 *
 * Usage: cpfsim-plot --input fig-pert.csv --out fig-pert.svg [--slopes 3,5,7]
 *        [--title "..."]
 */

import { readFileSync, writeFileSync } from "node:fs";

import { renderPanels } from "./chart.js";
import { parseSweepCsv, SchemaError } from "./csv.js";

interface Args {
  input: string;
  out: string;
  slopes: number[];
  title?: string;
}

export function parseArgs(argv: string[]): Args {
  const args: Partial<Args> = { slopes: [3, 5, 7] };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--input":
        args.input = value;
        i++;
        break;
      case "--out":
        args.out = value;
        i++;
        break;
      case "--slopes":
        args.slopes = value.split(",").map(Number);
        if (args.slopes.some((s) => !Number.isFinite(s) || s <= 0)) {
          throw new Error(`reference slopes must be positive: ${value}`);
        }
        i++;
        break;
      case "--title":
        args.title = value;
        i++;
        break;
      default:
        throw new Error(`unknown argument: ${flag}`);
    }
  }
  if (!args.input || !args.out) {
    throw new Error(
      "usage: cpfsim-plot --input <csv> --out <svg> [--slopes 3,5,7] [--title ...]",
    );
  }
  return args as Args;
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const rows = parseSweepCsv(readFileSync(args.input, "utf-8"));
    const svg = renderPanels(rows, { slopes: args.slopes, title: args.title });
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
