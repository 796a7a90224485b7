// Minimal SVG emission for the two chart kinds. No dependencies: the charts
// are simple enough that assembling the markup directly keeps rendering
// deterministic byte for byte.

import type { SelectorBar } from "./summary.js";
import type { PathBar } from "./trace.js";

const WIDTH = 480;
const HEIGHT = 320;
const MARGIN = { top: 20, right: 16, bottom: 36, left: 48 };

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmt(x: number): string {
  return Number(x.toFixed(3)).toString();
}

function open(): string[] {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
  ];
}

function yTicks(maxValue: number, plotH: number, x0: number): string[] {
  const step = niceStep(maxValue / 4);
  const parts: string[] = [];
  for (let v = 0; v <= maxValue + 1e-9; v += step) {
    const y = MARGIN.top + plotH - (v / maxValue) * plotH;
    parts.push(
      `<line x1="${x0}" y1="${fmt(y)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" stroke="#ddd"/>`,
      `<text x="${x0 - 6}" y="${fmt(y + 4)}" font-size="11" text-anchor="end">${fmt(v)}</text>`
    );
  }
  return parts;
}

function niceStep(raw: number): number {
  if (raw <= 0) return 1;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

/** One bar per selector with a stderr whisker; heights are proportional to
 * the mean values carried in the layout. */
export function renderSelectorBars(bars: SelectorBar[], title = ""): string {
  if (bars.length === 0) throw new Error("no bars to render");
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const maxValue = Math.max(...bars.map((b) => b.value + b.stderr)) * 1.05 || 1;
  const slot = plotW / bars.length;
  const barW = slot * 0.6;

  const parts = open();
  parts.push(...yTicks(maxValue, plotH, MARGIN.left));
  bars.forEach((b, i) => {
    const x = MARGIN.left + i * slot + (slot - barW) / 2;
    const h = (b.value / maxValue) * plotH;
    const y = MARGIN.top + plotH - h;
    const cx = x + barW / 2;
    parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(barW)}" height="${fmt(h)}" fill="#bbb" stroke="black" data-selector="${b.selector}" data-value="${b.value}"/>`
    );
    if (b.stderr > 0) {
      const yLo = MARGIN.top + plotH - ((b.value - b.stderr) / maxValue) * plotH;
      const yHi = MARGIN.top + plotH - ((b.value + b.stderr) / maxValue) * plotH;
      parts.push(
        `<line x1="${fmt(cx)}" y1="${fmt(yLo)}" x2="${fmt(cx)}" y2="${fmt(yHi)}" stroke="black"/>`,
        `<line x1="${fmt(cx - 4)}" y1="${fmt(yHi)}" x2="${fmt(cx + 4)}" y2="${fmt(yHi)}" stroke="black"/>`,
        `<line x1="${fmt(cx - 4)}" y1="${fmt(yLo)}" x2="${fmt(cx + 4)}" y2="${fmt(yLo)}" stroke="black"/>`
      );
    }
    parts.push(
      `<text x="${fmt(cx)}" y="${HEIGHT - MARGIN.bottom + 16}" font-size="12" text-anchor="middle">${esc(b.label)}</text>`
    );
  });
  if (title) {
    parts.push(
      `<text x="${WIDTH / 2}" y="14" font-size="12" text-anchor="middle">${esc(title)}</text>`
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

const SEGMENT_STYLE: [keyof Omit<PathBar, "edges">, string][] = [
  ["alreadyEvaluated", "#b5e0b5"],
  ["newlyValid", "#2f9e44"],
  ["newlyInvalid", "#a61e1e"],
  ["unevaluated", "#e6e6e6"],
];

/** One stacked bar per unique candidate path, segments bottom-up in the
 * order already-evaluated, newly valid, newly invalid, unevaluated. */
export function renderPathBars(bars: PathBar[], title = ""): string {
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const maxLen = Math.max(1, ...bars.map((b) => b.edges.length));
  const slot = plotW / Math.max(1, bars.length);
  const barW = Math.min(28, slot * 0.7);

  const parts = open();
  parts.push(...yTicks(maxLen, plotH, MARGIN.left));
  bars.forEach((b, i) => {
    const x = MARGIN.left + i * slot + (slot - barW) / 2;
    let yCursor = MARGIN.top + plotH;
    for (const [segment, fill] of SEGMENT_STYLE) {
      const count = b[segment];
      if (count === 0) continue;
      const h = (count / maxLen) * plotH;
      yCursor -= h;
      parts.push(
        `<rect x="${fmt(x)}" y="${fmt(yCursor)}" width="${fmt(barW)}" height="${fmt(h)}" fill="${fill}" stroke="black" data-segment="${segment}" data-count="${count}"/>`
      );
    }
    parts.push(
      `<text x="${fmt(x + barW / 2)}" y="${HEIGHT - MARGIN.bottom + 16}" font-size="10" text-anchor="middle">${i + 1}</text>`
    );
  });
  if (title) {
    parts.push(
      `<text x="${WIDTH / 2}" y="14" font-size="12" text-anchor="middle">${esc(title)}</text>`
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
