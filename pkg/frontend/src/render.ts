/** File-level entry: read a sweep CSV, write an SVG or PNG figure. */

import { readFile, writeFile } from "node:fs/promises";
import { extname } from "node:path";

import { parseSerCsv } from "./csv.js";
import { renderSerSvg, PlotOptions } from "./plot.js";

export interface PlotSpec {
  inputCsv: string;
  outputImage: string;
  byAdc: boolean;
  title: string;
}

export async function svgToPng(svg: string): Promise<Buffer> {
  const sharp = (await import("sharp")).default;
  return sharp(Buffer.from(svg)).png().toBuffer();
}

export async function renderSerPlot(spec: PlotSpec): Promise<void> {
  const text = await readFile(spec.inputCsv, "utf8");
  const records = parseSerCsv(text);
  const options: Partial<PlotOptions> = { byAdc: spec.byAdc, title: spec.title };
  const svg = renderSerSvg(records, options);

  const ext = extname(spec.outputImage).toLowerCase();
  if (ext === ".svg") {
    await writeFile(spec.outputImage, svg, "utf8");
  } else if (ext === ".png") {
    await writeFile(spec.outputImage, await svgToPng(svg));
  } else {
    throw new Error(`unsupported output format ${JSON.stringify(ext)}: use .svg or .png`);
  }
}
