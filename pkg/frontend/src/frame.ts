/** Shared figure frame: plot box, ticks, grid, series, legend, annotations. */

import { formatTick, makeScale, padDomain, Scale, ScaleKind } from "./scale.js";
import { document as svgDocument, el, polyline, text } from "./svg.js";

export interface SeriesSpec {
  label: string;
  points: Array<[number, number]>;
  color: string;
  /** SVG dash pattern, e.g. "6 4"; solid when omitted. */
  dash?: string;
  /** Draw circles at the data points (sparse series). */
  markers?: boolean;
}

export interface FrameSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: ScaleKind;
  yScale: ScaleKind;
  series: SeriesSpec[];
  /** Text lines pinned inside the plot box, top left. */
  annotations?: string[];
  width?: number;
  height?: number;
}

export const PALETTE = ["#1f6feb", "#d29922", "#2da44e", "#cf222e", "#8250df", "#57606a"];

const MARGIN = { left: 70, right: 18, top: 42, bottom: 48 };

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

function axes(x: Scale, y: Scale, box: { x0: number; x1: number; y0: number; y1: number }): string[] {
  const parts: string[] = [];
  for (const v of x.ticks()) {
    const xx = x.map(v);
    parts.push(el("line", { x1: xx, y1: box.y0, x2: xx, y2: box.y1, stroke: "#dddddd" }));
    parts.push(el("line", { x1: xx, y1: box.y1, x2: xx, y2: box.y1 + 5, stroke: "#333333" }));
    parts.push(text(formatTick(v), {
      x: xx, y: box.y1 + 18, "font-size": 10, "text-anchor": "middle", fill: "#333333",
    }));
  }
  for (const v of y.ticks()) {
    const yy = y.map(v);
    parts.push(el("line", { x1: box.x0, y1: yy, x2: box.x1, y2: yy, stroke: "#dddddd" }));
    parts.push(el("line", { x1: box.x0 - 5, y1: yy, x2: box.x0, y2: yy, stroke: "#333333" }));
    parts.push(text(formatTick(v), {
      x: box.x0 - 8, y: yy + 3, "font-size": 10, "text-anchor": "end", fill: "#333333",
    }));
  }
  parts.push(el("rect", {
    x: box.x0, y: box.y0, width: box.x1 - box.x0, height: box.y1 - box.y0,
    fill: "none", stroke: "#333333",
  }));
  return parts;
}

function legend(series: SeriesSpec[], box: { x1: number; y0: number }): string[] {
  const parts: string[] = [];
  const widest = Math.max(...series.map((s) => s.label.length));
  const w = 30 + widest * 6.2;
  const x0 = box.x1 - w - 8;
  series.forEach((s, i) => {
    const yy = box.y0 + 14 + i * 16;
    parts.push(el("line", {
      x1: x0, y1: yy, x2: x0 + 22, y2: yy, stroke: s.color, "stroke-width": 2,
      ...(s.dash ? { "stroke-dasharray": s.dash } : {}),
    }));
    parts.push(text(s.label, {
      x: x0 + 28, y: yy + 3.5, "font-size": 11, fill: "#333333",
    }));
  });
  return parts;
}

export function renderFrame(spec: FrameSpec): string {
  const width = spec.width ?? 640;
  const height = spec.height ?? 420;
  const box = {
    x0: MARGIN.left,
    x1: width - MARGIN.right,
    y0: MARGIN.top,
    y1: height - MARGIN.bottom,
  };
  const xs = spec.series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p[1]));
  const xDom = padDomain(...extent(xs), spec.xScale);
  const yDom = padDomain(...extent(ys), spec.yScale);
  const x = makeScale(spec.xScale, xDom, [box.x0, box.x1]);
  const y = makeScale(spec.yScale, yDom, [box.y1, box.y0]);

  const parts: string[] = [];
  parts.push(text(spec.title, {
    x: (box.x0 + box.x1) / 2, y: 24, "font-size": 14, "text-anchor": "middle", fill: "#111111",
  }));
  parts.push(...axes(x, y, box));
  for (const s of spec.series) {
    const mapped = s.points.map(([px_, py]) => [x.map(px_), y.map(py)] as [number, number]);
    parts.push(polyline(mapped, {
      stroke: s.color, "stroke-width": 1.6,
      ...(s.dash ? { "stroke-dasharray": s.dash } : {}),
    }));
    if (s.markers) {
      for (const [cx, cy] of mapped) {
        parts.push(el("circle", { cx, cy, r: 3, fill: s.color }));
      }
    }
  }
  parts.push(...legend(spec.series, box));
  (spec.annotations ?? []).forEach((line, i) => {
    parts.push(text(line, {
      x: box.x0 + 10, y: box.y0 + 16 + i * 15, "font-size": 11, fill: "#111111",
    }));
  });
  parts.push(text(spec.xLabel, {
    x: (box.x0 + box.x1) / 2, y: height - 12, "font-size": 12, "text-anchor": "middle",
    fill: "#333333",
  }));
  parts.push(text(spec.yLabel, {
    x: 16, y: (box.y0 + box.y1) / 2, "font-size": 12, "text-anchor": "middle", fill: "#333333",
    transform: `rotate(-90 16 ${(box.y0 + box.y1) / 2})`,
  }));
  return svgDocument(width, height, parts);
}
