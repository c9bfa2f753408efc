export { column, CsvError, MissingColumnError, readTable, textColumn } from "./csv.js";
export type { Table } from "./csv.js";
export { FIGURE_KINDS, FigureSpecError, render } from "./figures.js";
export type { FigureKind, FigureSpec } from "./figures.js";
export { PALETTE, renderFrame } from "./frame.js";
export type { FrameSpec, SeriesSpec } from "./frame.js";
export {
  formatTick,
  leastSquaresSlope,
  linearTicks,
  logTicks,
  makeScale,
  padDomain,
  ScaleError,
} from "./scale.js";
export type { Scale, ScaleKind } from "./scale.js";
