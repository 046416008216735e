/** plot-ser argument handling and entry point. */

import { renderSerPlot, PlotSpec } from "./render.js";

const USAGE =
  "usage: plot-ser --in <csv> --out <png|svg> [--by-adc] [--title <text>]";

export function parseArgs(argv: string[]): PlotSpec {
  let input: string | undefined;
  let output: string | undefined;
  let byAdc = false;
  let title = "SER vs SNR";
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]!;
    switch (arg) {
      case "--in":
        input = argv[++i];
        break;
      case "--out":
        output = argv[++i];
        break;
      case "--by-adc":
        byAdc = true;
        break;
      case "--title":
        title = argv[++i] ?? "";
        break;
      case "--help":
      case "-h":
        throw new Error(USAGE);
      default:
        throw new Error(`unknown argument ${JSON.stringify(arg)}\n${USAGE}`);
    }
  }
  if (input === undefined || output === undefined) {
    throw new Error(`--in and --out are required\n${USAGE}`);
  }
  return { inputCsv: input, outputImage: output, byAdc, title };
}

export async function run(argv: string[]): Promise<number> {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  try {
    await renderSerPlot(spec);
  } catch (err) {
    console.error(`error: ${spec.inputCsv}: ${(err as Error).message}`);
    return 1;
  }
  return 0;
}
