// Usage: plot-path-bars <trace.jsonl> <out.svg>
//
// Renders one stacked bar per unique candidate path from an engine run
// trace, showing how each path's edges were disposed of.

import fs from "node:fs";
import process from "node:process";

import { parseTraceLog, pathBars } from "./trace.js";
import { renderPathBars } from "./svg.js";

function main(argv: string[]): number {
  if (argv.length !== 2) {
    console.error("usage: plot-path-bars <trace.jsonl> <out.svg>");
    return 2;
  }
  const [tracePath, outPath] = argv;
  let bars;
  try {
    bars = pathBars(parseTraceLog(fs.readFileSync(tracePath, "utf-8")));
  } catch (err) {
    console.error(`error reading trace: ${err}`);
    return 1;
  }
  fs.writeFileSync(outPath, renderPathBars(bars, "candidate paths"));
  console.log(`wrote ${outPath}`);
  return 0;
}

process.exit(main(process.argv.slice(2)));
