#!/usr/bin/env node
/**
 * plot --in 'out/fig2_*.csv' --y residual_inf --group distance --out fig2.png
 *
 * Renders benchmark convergence CSVs as a multi-panel log-scale PNG.
 * Exits nonzero on malformed input; a missing column is reported by name.
 */

import { MissingColumnError } from "./csv";
import { PlotSpec, Y_COLUMNS, plotToFile } from "./plot";

const USAGE = `usage: plot --in <glob> --y <column> [--group <key>] --out <file.png> [--title <text>]

  --in     input CSV glob (quote it), e.g. 'out/fig2_*.csv'
  --y      y-axis column: ${Y_COLUMNS.join(" | ")} (any numeric column works)
  --group  panel grouping key: a CSV column, or p/n/d derived from dims
           (default: method)
  --out    output PNG path
  --title  optional figure title`;

export function parseArgs(argv: string[]): PlotSpec {
  const opts = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      throw new Error(`unexpected argument: ${arg}`);
    }
    if (arg === "--help" || arg === "-h") {
      opts.set("help", "1");
      continue;
    }
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${arg}`);
    }
    opts.set(arg.slice(2), value);
    i++;
  }
  if (opts.has("help")) {
    console.log(USAGE);
    process.exit(0);
  }
  for (const required of ["in", "y", "out"]) {
    if (!opts.has(required)) {
      throw new Error(`--${required} is required\n${USAGE}`);
    }
  }
  return {
    inputGlob: opts.get("in")!,
    yColumn: opts.get("y")!,
    groupBy: opts.get("group") ?? "method",
    outPath: opts.get("out")!,
    title: opts.get("title"),
  };
}

export function main(argv: string[]): number {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const info = plotToFile(spec);
    console.log(
      `wrote ${spec.outPath}: ${info.panels} panel(s), ${info.width}x${info.height}`,
    );
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnError) {
      console.error(`error: missing column "${err.column}": ${err.message}`);
    } else {
      console.error(`error: ${err instanceof Error ? err.message : err}`);
    }
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
