// Usage: plot-bars <summary.json> <out.svg> [--class NAME]
//
// Renders per-selector mean bars with standard-error whiskers from a bench
// summary. With one class in the summary the flag is optional.

import fs from "node:fs";
import process from "node:process";

import { parseSummary, selectorBars } from "./summary.js";
import { renderSelectorBars } from "./svg.js";

function main(argv: string[]): number {
  const args = argv.filter((a) => a !== "--class");
  const classIdx = argv.indexOf("--class");
  const wanted = classIdx >= 0 ? argv[classIdx + 1] : undefined;
  const positional = args.filter((a) => a !== wanted);
  if (positional.length !== 2) {
    console.error("usage: plot-bars <summary.json> <out.svg> [--class NAME]");
    return 2;
  }
  const [summaryPath, outPath] = positional;
  let summary;
  try {
    summary = parseSummary(fs.readFileSync(summaryPath, "utf-8"));
  } catch (err) {
    console.error(`error reading summary: ${err}`);
    return 1;
  }
  const classes = Object.keys(summary);
  const problemClass = wanted ?? (classes.length === 1 ? classes[0] : undefined);
  if (problemClass === undefined) {
    console.error(`summary holds ${classes.length} classes; pass --class`);
    return 2;
  }
  let svg;
  try {
    svg = renderSelectorBars(selectorBars(summary, problemClass), problemClass);
  } catch (err) {
    console.error(`error: ${err}`);
    return 1;
  }
  fs.writeFileSync(outPath, svg);
  console.log(`wrote ${outPath}`);
  return 0;
}

process.exit(main(process.argv.slice(2)));
