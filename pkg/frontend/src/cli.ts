#!/usr/bin/env node
/** plots <kind> --in <csv...> --out <path>: render one figure per invocation. */

import { pathToFileURL } from "node:url";
import yargs from "yargs";

import { CsvError, MissingColumnError } from "./csv.js";
import { FIGURE_KINDS, FigureKind, FigureSpec, FigureSpecError, render } from "./figures.js";
import { ScaleError, ScaleKind } from "./scale.js";

const SCALES: ReadonlyArray<ScaleKind> = ["linear", "log"];

export async function main(argv: string[]): Promise<number> {
  let failed = false;
  const parser = yargs(argv)
    .scriptName("plots")
    .usage("$0 <kind> --in <csv...> --out <path>")
    .command("$0 <kind>", "render one figure", (y) =>
      y
        .positional("kind", { choices: FIGURE_KINDS, demandOption: true })
        .option("in", { type: "string", array: true, demandOption: true, describe: "input CSV paths" })
        .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
        .option("columns", { type: "string", describe: "comma-separated columns (history)" })
        .option("alpha", { type: "number", describe: "inequality exponent (decay)" })
        .option("x-scale", { choices: SCALES })
        .option("y-scale", { choices: SCALES })
        .option("title", { type: "string" }),
    )
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      failed = true;
      process.stderr.write(`plots: ${msg ?? err?.message}\n`);
    });

  const args = await parser.parse();
  if (failed) return 2;

  const spec: FigureSpec = {
    kind: args.kind as FigureKind,
    inputs: args.in as string[],
    output: args.out as string,
    columns: args.columns ? (args.columns as string).split(",").map((s) => s.trim()) : undefined,
    alpha: args.alpha as number | undefined,
    xScale: args["x-scale"] as ScaleKind | undefined,
    yScale: args["y-scale"] as ScaleKind | undefined,
    title: args.title as string | undefined,
  };
  try {
    render(spec);
  } catch (err) {
    if (
      err instanceof FigureSpecError ||
      err instanceof CsvError ||
      err instanceof MissingColumnError ||
      err instanceof ScaleError
    ) {
      process.stderr.write(`plots: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
  process.stdout.write(`wrote ${spec.output}\n`);
  return 0;
}

if (import.meta.url === pathToFileURL(process.argv[1] ?? "").href) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
