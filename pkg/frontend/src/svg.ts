/** Minimal deterministic SVG writer: fixed attribute order, fixed rounding. */

export type Attrs = Record<string, string | number>;

/** Coordinates rounded to 0.01 px so output bytes are stable across runs. */
export function px(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function attrString(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? px(v) : v}"`)
    .join("");
}

export function el(name: string, attrs: Attrs, children: string[] = []): string {
  if (children.length === 0) return `<${name}${attrString(attrs)}/>`;
  return `<${name}${attrString(attrs)}>${children.join("")}</${name}>`;
}

export function text(content: string, attrs: Attrs): string {
  return `<text${attrString(attrs)}>${escapeText(content)}</text>`;
}

export function polyline(points: Array<[number, number]>, attrs: Attrs): string {
  const pts = points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
  return el("polyline", { points: pts, fill: "none", ...attrs });
}

export function document(width: number, height: number, children: string[]): string {
  const open =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif">`;
  return `${open}\n${children.join("\n")}\n</svg>\n`;
}
