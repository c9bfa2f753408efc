/** Axis scales, tick placement, and the slope fit for decay figures. */

export type ScaleKind = "linear" | "log";

export interface Scale {
  kind: ScaleKind;
  /** Data domain [lo, hi], lo < hi. */
  domain: [number, number];
  /** Output pixel range [a, b]; b < a flips the axis (SVG y grows down). */
  range: [number, number];
  map(v: number): number;
  ticks(): number[];
}

export class ScaleError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ScaleError";
  }
}

/** Round limits outward to a multiple of a 1/2/5 step covering the span. */
export function niceStep(span: number, target: number): number {
  const raw = span / Math.max(target, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= raw) return m * mag;
  }
  return 10 * mag;
}

export function linearTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) throw new ScaleError(`degenerate domain [${lo}, ${hi}]`);
  const step = niceStep(hi - lo, target);
  const first = Math.ceil(lo / step - 1e-9);
  const out: number[] = [];
  for (let i = first; i * step <= hi + 1e-9 * step; i++) {
    out.push(i === 0 ? 0 : i * step);
  }
  return out;
}

/** Decade ticks; mantissa ticks at 2 and 5 fill in when decades are scarce. */
export function logTicks(lo: number, hi: number): number[] {
  if (!(lo > 0)) throw new ScaleError(`log scale needs positive data, got ${lo}`);
  if (!(hi > lo)) throw new ScaleError(`degenerate domain [${lo}, ${hi}]`);
  const out: number[] = [];
  const mantissas = Math.log10(hi / lo) <= 2.5 ? [1, 2, 5] : [1];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
    for (const m of mantissas) {
      // decimal literal, not m * 10^e: pow can land one ulp off the parsed
      // value the data itself uses
      const v = Number(`${m}e${e}`);
      if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push(v);
    }
  }
  return out;
}

export function makeScale(kind: ScaleKind, domain: [number, number], range: [number, number]): Scale {
  const [lo, hi] = domain;
  if (!(hi > lo)) throw new ScaleError(`degenerate domain [${lo}, ${hi}]`);
  if (kind === "log" && !(lo > 0)) {
    throw new ScaleError(`log scale needs a positive domain, got [${lo}, ${hi}]`);
  }
  const [a, b] = range;
  const t = (v: number) => (kind === "log" ? Math.log(v) : v);
  const tlo = t(lo);
  const span = t(hi) - tlo;
  return {
    kind,
    domain,
    range,
    map: (v) => a + ((t(v) - tlo) / span) * (b - a),
    ticks: () => (kind === "log" ? logTicks(lo, hi) : linearTicks(lo, hi)),
  };
}

/** Widen a degenerate extent so constant series still get a frame. */
export function padDomain(lo: number, hi: number, kind: ScaleKind): [number, number] {
  if (hi > lo) return [lo, hi];
  if (kind === "log") return [lo / 2, hi * 2];
  const pad = Math.abs(lo) > 0 ? Math.abs(lo) * 0.5 : 1;
  return [lo - pad, hi + pad];
}

/** Short deterministic tick label. */
export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a));
    const m = v / Math.pow(10, e);
    const mm = Math.round(m * 100) / 100;
    return `${mm}e${e}`;
  }
  return String(Math.round(v * 1e6) / 1e6);
}

/** Least-squares slope of y against x. */
export function leastSquaresSlope(xs: number[], ys: number[]): number {
  if (xs.length !== ys.length || xs.length < 2) {
    throw new ScaleError(`slope fit needs two matched samples, got ${xs.length}/${ys.length}`);
  }
  const n = xs.length;
  const mx = xs.reduce((s, v) => s + v, 0) / n;
  const my = ys.reduce((s, v) => s + v, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx === 0) throw new ScaleError("slope fit needs distinct x values");
  return sxy / sxx;
}
