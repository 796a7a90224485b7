// Run-trace log parsing and per-path stacked bar reconstruction.
//
// The engine writes one JSON object per iteration; infinite values arrive as
// the string "inf" so the log stays strict JSON. For every unique candidate
// path, in first-seen order, the stack splits its edges into what was already
// evaluated when the path first became the candidate, what got evaluated
// while it was the candidate (valid vs invalid), and what never was.

export interface TraceRecord {
  iter: number;
  candidateEdges: number[] | null; // null: the search found no finite path
  candidateLazyLength: number;
  selected: number[];
  outcomes: { edge: number; weight: number }[];
}

function parseExtendedNumber(value: unknown, where: string): number {
  if (value === "inf") return Infinity;
  if (typeof value === "number" && Number.isFinite(value)) return value;
  throw new Error(`${where}: expected a finite number or "inf"`);
}

export function parseTraceLog(text: string): TraceRecord[] {
  const records: TraceRecord[] = [];
  const lines = text.split("\n").filter((ln) => ln.trim() !== "");
  if (lines.length === 0) throw new Error("empty trace log");
  for (const [i, line] of lines.entries()) {
    let raw: any;
    try {
      raw = JSON.parse(line);
    } catch (err) {
      throw new Error(`trace line ${i + 1} is not JSON: ${err}`);
    }
    if (typeof raw.iter !== "number" || !Array.isArray(raw.outcomes)) {
      throw new Error(`trace line ${i + 1}: missing iter/outcomes`);
    }
    const candidate =
      raw.candidate_edge_ids === null ? null : (raw.candidate_edge_ids as number[]);
    if (candidate !== null && !Array.isArray(candidate)) {
      throw new Error(`trace line ${i + 1}: candidate_edge_ids must be a list or null`);
    }
    records.push({
      iter: raw.iter,
      candidateEdges: candidate,
      candidateLazyLength: parseExtendedNumber(
        raw.candidate_lazy_length,
        `trace line ${i + 1} candidate_lazy_length`
      ),
      selected: (raw.selected ?? []) as number[],
      outcomes: raw.outcomes.map((o: any, j: number) => ({
        edge: o.edge as number,
        weight: parseExtendedNumber(o.weight, `trace line ${i + 1} outcome ${j}`),
      })),
    });
  }
  return records;
}

export interface PathBar {
  edges: number[];
  alreadyEvaluated: number;
  newlyValid: number;
  newlyInvalid: number;
  unevaluated: number;
}

export function pathBars(records: TraceRecord[]): PathBar[] {
  const order: string[] = [];
  const edgesByKey = new Map<string, number[]>();
  const evaluatedBefore = new Map<string, Set<number>>();
  const outcomesDuring = new Map<string, Map<number, number>>();
  const revealed = new Set<number>();

  for (const rec of records) {
    const key = rec.candidateEdges === null ? null : rec.candidateEdges.join(",");
    if (key !== null && !edgesByKey.has(key)) {
      order.push(key);
      edgesByKey.set(key, rec.candidateEdges!);
      const prior = new Set<number>();
      for (const e of rec.candidateEdges!) {
        if (revealed.has(e)) prior.add(e);
      }
      evaluatedBefore.set(key, prior);
      outcomesDuring.set(key, new Map());
    }
    for (const { edge, weight } of rec.outcomes) {
      revealed.add(edge);
      if (key !== null && rec.candidateEdges!.includes(edge)) {
        outcomesDuring.get(key)!.set(edge, weight);
      }
    }
  }

  return order.map((key) => {
    const edges = edgesByKey.get(key)!;
    const prior = evaluatedBefore.get(key)!;
    let valid = 0;
    let invalid = 0;
    for (const [edge, weight] of outcomesDuring.get(key)!) {
      if (prior.has(edge)) continue;
      if (weight === Infinity) invalid += 1;
      else valid += 1;
    }
    return {
      edges,
      alreadyEvaluated: prior.size,
      newlyValid: valid,
      newlyInvalid: invalid,
      unevaluated: edges.length - prior.size - valid - invalid,
    };
  });
}
