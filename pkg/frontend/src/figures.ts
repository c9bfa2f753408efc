/** The four figure kinds over the solver's CSV artifacts.

history     one curve per (input file, column) against time
decay       log-log dissipation vs viscosity with its bound and fitted slope
comparison  enstrophy against the dominating scalar solution
lp_bound    vorticity L^p norm against the data-plus-forcing line
*/

import { mkdirSync, writeFileSync } from "node:fs";
import { basename, dirname } from "node:path";

import { column, readTable, Table } from "./csv.js";
import { FrameSpec, PALETTE, renderFrame, SeriesSpec } from "./frame.js";
import { leastSquaresSlope, ScaleKind } from "./scale.js";

export type FigureKind = "history" | "decay" | "comparison" | "lp_bound";

export const FIGURE_KINDS: FigureKind[] = ["history", "decay", "comparison", "lp_bound"];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  /** Destination path; when set, render() writes the SVG there. */
  output?: string;
  /** history only: which diagnostic columns to draw (required, no default). */
  columns?: string[];
  /** decay only: inequality exponent fixing the theoretical slope (required). */
  alpha?: number;
  xScale?: ScaleKind;
  yScale?: ScaleKind;
  title?: string;
}

export class FigureSpecError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "FigureSpecError";
  }
}

function stem(file: string): string {
  return basename(file).replace(/\.[^.]*$/, "");
}

/** Pull a column and insist the figure can actually draw it. */
function finiteColumn(table: Table, name: string): number[] {
  const values = column(table, name);
  const bad = values.findIndex((v) => !Number.isFinite(v));
  if (bad >= 0) {
    throw new FigureSpecError(
      `${table.file}: column "${name}" row ${bad + 2} is ${values[bad]}, cannot plot`,
    );
  }
  return values;
}

function zip(xs: number[], ys: number[]): Array<[number, number]> {
  return xs.map((x, i) => [x, ys[i]]);
}

function requireSingleInput(spec: FigureSpec): string {
  if (spec.inputs.length !== 1) {
    throw new FigureSpecError(`${spec.kind} takes exactly one input CSV, got ${spec.inputs.length}`);
  }
  return spec.inputs[0];
}

function scaleOr(spec: FigureSpec, axis: "x" | "y", fallback: ScaleKind): ScaleKind {
  return (axis === "x" ? spec.xScale : spec.yScale) ?? fallback;
}

function historyFrame(spec: FigureSpec): FrameSpec {
  if (spec.inputs.length === 0) {
    throw new FigureSpecError("history needs at least one input CSV");
  }
  if (!spec.columns || spec.columns.length === 0) {
    throw new FigureSpecError("history needs explicit columns (e.g. energy)");
  }
  const series: SeriesSpec[] = [];
  for (const file of spec.inputs) {
    const table = readTable(file);
    const t = finiteColumn(table, "t");
    for (const name of spec.columns) {
      series.push({
        label: spec.inputs.length > 1 ? `${stem(file)} ${name}` : name,
        points: zip(t, finiteColumn(table, name)),
        color: PALETTE[series.length % PALETTE.length],
      });
    }
  }
  return {
    title: spec.title ?? `history: ${spec.columns.join(", ")}`,
    xLabel: "t",
    yLabel: spec.columns.join(", "),
    xScale: scaleOr(spec, "x", "linear"),
    yScale: scaleOr(spec, "y", "linear"),
    series,
  };
}

function decayFrame(spec: FigureSpec): FrameSpec {
  const file = requireSingleInput(spec);
  if ((spec.xScale ?? "log") !== "log" || (spec.yScale ?? "log") !== "log") {
    throw new FigureSpecError("decay figures are log-log by definition");
  }
  const alpha = spec.alpha;
  if (alpha === undefined) {
    throw new FigureSpecError("decay needs --alpha for the theoretical slope");
  }
  if (!(alpha > 1)) {
    throw new FigureSpecError(`alpha must exceed 1, got ${alpha}`);
  }
  const table = readTable(file);
  const nu = finiteColumn(table, "nu");
  const measured = finiteColumn(table, "measured_dissipation");
  const bound = finiteColumn(table, "bound");
  if (nu.length < 4) {
    throw new FigureSpecError(`decay needs at least 4 viscosity points, got ${nu.length}`);
  }
  const fitted = leastSquaresSlope(nu.map(Math.log), measured.map(Math.log));
  const theory = 1 - 2 / (2 * alpha - 1);
  return {
    title: spec.title ?? `dissipation decay: ${stem(file)}`,
    xLabel: "nu",
    yLabel: "dissipation",
    xScale: "log",
    yScale: "log",
    series: [
      { label: "measured", points: zip(nu, measured), color: PALETTE[0], markers: true },
      { label: "bound", points: zip(nu, bound), color: PALETTE[1], dash: "6 4", markers: true },
    ],
    annotations: [
      `fitted slope ${fitted.toFixed(3)}`,
      `theory slope ${theory.toFixed(3)}`,
    ],
  };
}

function comparisonFrame(spec: FigureSpec): FrameSpec {
  const file = requireSingleInput(spec);
  const table = readTable(file);
  const t = finiteColumn(table, "t");
  return {
    title: spec.title ?? `enstrophy vs dominating solution: ${stem(file)}`,
    xLabel: "t",
    yLabel: "enstrophy",
    xScale: scaleOr(spec, "x", "linear"),
    yScale: scaleOr(spec, "y", "linear"),
    series: [
      { label: "enstrophy", points: zip(t, finiteColumn(table, "enstrophy")), color: PALETTE[0] },
      {
        label: "supersolution",
        points: zip(t, finiteColumn(table, "supersolution")),
        color: PALETTE[1],
        dash: "6 4",
      },
    ],
  };
}

function lpBoundFrame(spec: FigureSpec): FrameSpec {
  const file = requireSingleInput(spec);
  const table = readTable(file);
  const t = finiteColumn(table, "t");
  return {
    title: spec.title ?? `L^p norm vs bound: ${stem(file)}`,
    xLabel: "t",
    yLabel: "L^p norm",
    xScale: scaleOr(spec, "x", "linear"),
    yScale: scaleOr(spec, "y", "linear"),
    series: [
      { label: "lp_norm", points: zip(t, finiteColumn(table, "lp_norm")), color: PALETTE[0] },
      { label: "bound", points: zip(t, finiteColumn(table, "bound")), color: PALETTE[1], dash: "6 4" },
    ],
  };
}

const BUILDERS: Record<FigureKind, (spec: FigureSpec) => FrameSpec> = {
  history: historyFrame,
  decay: decayFrame,
  comparison: comparisonFrame,
  lp_bound: lpBoundFrame,
};

/** Render a figure to SVG text; writes spec.output when it is set. */
export function render(spec: FigureSpec): string {
  const builder = BUILDERS[spec.kind];
  if (!builder) {
    throw new FigureSpecError(
      `unknown figure kind "${spec.kind}" (one of: ${FIGURE_KINDS.join(", ")})`,
    );
  }
  const svg = renderFrame(builder(spec));
  if (spec.output) {
    mkdirSync(dirname(spec.output), { recursive: true });
    writeFileSync(spec.output, svg);
  }
  return svg;
}
