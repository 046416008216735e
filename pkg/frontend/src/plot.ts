/** Semilog SER plot assembly: grouping, styling, and SVG output. */

import { SerRecord, adcLabel } from "./csv.js";
import { decadeLabel, decadeTicks, linearScale, logScale, padDomain } from "./scale.js";

export interface PlotOptions {
  /** Group curves by (detector, adc_bits) instead of detector alone. */
  byAdc: boolean;
  title: string;
  width: number;
  height: number;
}

export const DEFAULT_OPTIONS: PlotOptions = {
  byAdc: false,
  title: "SER vs SNR",
  width: 860,
  height: 520,
};

const DETECTOR_COLORS: Record<string, string> = {
  ML: "#1f77b4",
  MMSE: "#ff7f0e",
  ZF: "#2ca02c",
  ANND: "#d62728",
};
const FALLBACK_COLORS = ["#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"];
const DASH_PATTERNS = ["", "8 4", "2 3", "8 4 2 4", "1 3", "12 4"];

export function detectorColor(name: string): string {
  const fixed = DETECTOR_COLORS[name];
  if (fixed !== undefined) return fixed;
  let hash = 5381;
  for (const ch of name) hash = (hash * 33 + ch.charCodeAt(0)) >>> 0;
  return FALLBACK_COLORS[hash % FALLBACK_COLORS.length]!;
}

export interface PlotPoint {
  snrDb: number;
  /** The CSV value, untouched. */
  ser: number;
  /** Value placed on the log axis: ser, or the zero-SER floor 1/symbols_tested. */
  plotted: number;
  atFloor: boolean;
}

export interface CurveGroup {
  key: string;
  label: string;
  color: string;
  dash: string;
  points: PlotPoint[];
}

/** Groups in first-encounter order; point order preserved from the CSV. */
export function groupRecords(records: SerRecord[], byAdc: boolean): CurveGroup[] {
  const groups = new Map<string, CurveGroup>();
  const dashByAdc = new Map<string, string>();
  if (byAdc) {
    const labels = [...new Set(records.map((r) => adcLabel(r.adcBits)))];
    labels.sort((a, b) => {
      if (a === "Perfect") return 1;
      if (b === "Perfect") return -1;
      return parseInt(a, 10) - parseInt(b, 10);
    });
    labels.forEach((label, i) =>
      dashByAdc.set(label, DASH_PATTERNS[i % DASH_PATTERNS.length]!));
  }
  for (const r of records) {
    const key = byAdc ? `${r.detector}|${adcLabel(r.adcBits)}` : r.detector;
    let group = groups.get(key);
    if (group === undefined) {
      group = {
        key,
        label: byAdc ? `${r.detector} (${adcLabel(r.adcBits)})` : r.detector,
        color: detectorColor(r.detector),
        dash: byAdc ? dashByAdc.get(adcLabel(r.adcBits))! : "",
        points: [],
      };
      groups.set(key, group);
    }
    group.points.push({
      snrDb: r.snrDb,
      ser: r.ser,
      plotted: r.ser > 0 ? r.ser : 1 / r.symbolsTested,
      atFloor: r.ser === 0,
    });
  }
  return [...groups.values()];
}

const esc = (text: string) =>
  text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
      .replace(/"/g, "&quot;");
const px = (value: number) => value.toFixed(2);

export function renderSerSvg(records: SerRecord[], options?: Partial<PlotOptions>): string {
  const opts = { ...DEFAULT_OPTIONS, ...options };
  const groups = groupRecords(records, opts.byAdc);
  const margin = { top: 48, right: 215, bottom: 56, left: 72 };
  const innerW = opts.width - margin.left - margin.right;
  const innerH = opts.height - margin.top - margin.bottom;

  const snrs = records.map((r) => r.snrDb);
  const plotted = groups.flatMap((g) => g.points.map((p) => p.plotted));
  const x = linearScale(padDomain([Math.min(...snrs), Math.max(...snrs)]),
                        [margin.left, margin.left + innerW]);
  const yTicks = decadeTicks(Math.min(...plotted), Math.max(...plotted, 1e-10));
  const y = logScale([yTicks[0]!, yTicks[yTicks.length - 1]!],
                     [margin.top + innerH, margin.top]);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${opts.width}" ` +
             `height="${opts.height}" viewBox="0 0 ${opts.width} ${opts.height}" ` +
             `font-family="Helvetica, Arial, sans-serif">`);
  parts.push(`<rect width="${opts.width}" height="${opts.height}" fill="white"/>`);
  parts.push(`<text x="${px(margin.left + innerW / 2)}" y="26" text-anchor="middle" ` +
             `font-size="17" class="title">${esc(opts.title)}</text>`);

  // gridlines and axes
  for (const tick of yTicks) {
    const ty = y(tick);
    parts.push(`<line x1="${px(margin.left)}" y1="${px(ty)}" ` +
               `x2="${px(margin.left + innerW)}" y2="${px(ty)}" ` +
               `stroke="#dddddd" stroke-width="1"/>`);
    parts.push(`<text x="${px(margin.left - 8)}" y="${px(ty + 4)}" ` +
               `text-anchor="end" font-size="12">${decadeLabel(tick)}</text>`);
  }
  const xTickValues = [...new Set(snrs)].sort((a, b) => a - b);
  for (const tick of xTickValues) {
    const tx = x(tick);
    parts.push(`<line x1="${px(tx)}" y1="${px(margin.top + innerH)}" ` +
               `x2="${px(tx)}" y2="${px(margin.top + innerH + 5)}" ` +
               `stroke="#333333" stroke-width="1"/>`);
    parts.push(`<text x="${px(tx)}" y="${px(margin.top + innerH + 20)}" ` +
               `text-anchor="middle" font-size="12">${tick}</text>`);
  }
  parts.push(`<rect x="${px(margin.left)}" y="${px(margin.top)}" width="${px(innerW)}" ` +
             `height="${px(innerH)}" fill="none" stroke="#333333" stroke-width="1"/>`);
  parts.push(`<text x="${px(margin.left + innerW / 2)}" ` +
             `y="${px(opts.height - 14)}" text-anchor="middle" font-size="14">SNR [dB]</text>`);
  parts.push(`<text x="20" y="${px(margin.top + innerH / 2)}" text-anchor="middle" ` +
             `font-size="14" transform="rotate(-90 20 ${px(margin.top + innerH / 2)})">SER</text>`);

  // curves
  for (const group of groups) {
    const coords = group.points
      .map((p) => `${px(x(p.snrDb))},${px(y(p.plotted))}`)
      .join(" ");
    const dash = group.dash ? ` stroke-dasharray="${group.dash}"` : "";
    parts.push(`<polyline points="${coords}" fill="none" stroke="${group.color}" ` +
               `stroke-width="2"${dash} class="curve"/>`);
    for (const p of group.points) {
      const cx = x(p.snrDb);
      const cy = y(p.plotted);
      if (p.atFloor) {
        // zero-SER floor marker: open triangle pointing down at 1/symbols_tested
        const t = 5;
        parts.push(`<path d="M ${px(cx - t)} ${px(cy - t)} L ${px(cx + t)} ${px(cy - t)} ` +
                   `L ${px(cx)} ${px(cy + t)} Z" fill="white" stroke="${group.color}" ` +
                   `stroke-width="1.5" class="floor-marker"/>`);
      } else {
        parts.push(`<circle cx="${px(cx)}" cy="${px(cy)}" r="3.2" ` +
                   `fill="${group.color}" class="marker"/>`);
      }
    }
  }

  // legend
  const legendX = margin.left + innerW + 18;
  groups.forEach((group, i) => {
    const ly = margin.top + 10 + i * 22;
    const dash = group.dash ? ` stroke-dasharray="${group.dash}"` : "";
    parts.push(`<line x1="${px(legendX)}" y1="${px(ly)}" x2="${px(legendX + 26)}" ` +
               `y2="${px(ly)}" stroke="${group.color}" stroke-width="2"${dash}/>`);
    parts.push(`<text x="${px(legendX + 32)}" y="${px(ly + 4)}" font-size="12" ` +
               `class="legend">${esc(group.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
