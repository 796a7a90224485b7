// Benchmark summary/CSV parsing and the selector bar layout.
//
// Inputs come from the search toolkit's bench command: a summary JSON with
// per-selector mean and stderr of edges evaluated, and the raw CSV it was
// computed from. Bars follow the fixed E,F,R,A,B,W,P ordering.

export const SELECTOR_ORDER = [
  "expand",
  "forward",
  "reverse",
  "alternate",
  "bisection",
  "weightsamp",
  "partition",
] as const;

export const SELECTOR_LABELS: Record<string, string> = {
  expand: "E",
  forward: "F",
  reverse: "R",
  alternate: "A",
  bisection: "B",
  weightsamp: "W",
  partition: "P",
};

export interface SelectorStats {
  mean: number;
  stderr: number;
  n: number;
}

export type Summary = Record<string, Record<string, SelectorStats>>;

export function parseSummary(text: string): Summary {
  const data = JSON.parse(text);
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new Error("summary JSON must map class -> selector -> stats");
  }
  for (const perClass of Object.values(data as Record<string, unknown>)) {
    for (const stats of Object.values(perClass as Record<string, unknown>)) {
      const s = stats as SelectorStats;
      if (typeof s.mean !== "number" || typeof s.stderr !== "number") {
        throw new Error("summary stats need numeric mean and stderr");
      }
    }
  }
  return data as Summary;
}

export interface CsvRecord {
  problemClass: string;
  instance: number;
  selector: string;
  edgesEvaluated: number;
}

export function parseBenchCsv(text: string): CsvRecord[] {
  const lines = text.trim().split("\n");
  if (lines.length === 0 || !lines[0].startsWith("class,instance,selector,")) {
    throw new Error("not a bench CSV: missing header");
  }
  const records: CsvRecord[] = [];
  for (const line of lines.slice(1)) {
    if (line.trim() === "") continue;
    const parts = line.split(",");
    if (parts.length < 4) throw new Error(`malformed CSV row: ${line}`);
    records.push({
      problemClass: parts[0],
      instance: Number(parts[1]),
      selector: parts[2],
      edgesEvaluated: Number(parts[3]),
    });
  }
  return records;
}

/** Per (class, selector) mean recomputed from the raw records. */
export function recomputeMeans(records: CsvRecord[]): Map<string, number> {
  const sums = new Map<string, { total: number; n: number }>();
  for (const r of records) {
    const key = `${r.problemClass}/${r.selector}`;
    const acc = sums.get(key) ?? { total: 0, n: 0 };
    acc.total += r.edgesEvaluated;
    acc.n += 1;
    sums.set(key, acc);
  }
  const means = new Map<string, number>();
  for (const [key, acc] of sums) {
    means.set(key, acc.total / acc.n);
  }
  return means;
}

export interface SelectorBar {
  selector: string;
  label: string;
  value: number; // bar height in data units: mean edges evaluated
  stderr: number; // whisker half-length in data units
}

/** Bars for one problem class in fixed order; selectors absent from the
 * summary are skipped. */
export function selectorBars(summary: Summary, problemClass: string): SelectorBar[] {
  const perClass = summary[problemClass];
  if (perClass === undefined) {
    throw new Error(`summary has no class ${JSON.stringify(problemClass)}`);
  }
  const bars: SelectorBar[] = [];
  for (const kind of SELECTOR_ORDER) {
    const stats = perClass[kind];
    if (stats === undefined) continue;
    bars.push({
      selector: kind,
      label: SELECTOR_LABELS[kind],
      value: stats.mean,
      stderr: stats.stderr,
    });
  }
  for (const kind of Object.keys(perClass)) {
    if (!(SELECTOR_ORDER as readonly string[]).includes(kind)) {
      throw new Error(`unknown selector in summary: ${kind}`);
    }
  }
  if (bars.length === 0) {
    throw new Error("summary covers no selectors");
  }
  return bars;
}
