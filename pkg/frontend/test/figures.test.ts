import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { CsvError, MissingColumnError } from "../src/csv.js";
import { FigureSpec, FigureSpecError, render } from "../src/figures.js";

const FIXTURES = fileURLToPath(new URL("../fixtures", import.meta.url));
const TG = join(FIXTURES, "taylor_green");
const SWEEP = join(FIXTURES, "sweep");

function tmpFile(name: string, content?: string): string {
  const dir = mkdtempSync(join(tmpdir(), "plots-fig-"));
  const file = join(dir, name);
  if (content !== undefined) writeFileSync(file, content);
  return file;
}

function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe("history", () => {
  const spec: FigureSpec = {
    kind: "history",
    inputs: [join(TG, "diagnostics.csv"), join(TG, "analytic.csv")],
    columns: ["energy"],
  };

  it("draws measured and analytic energy as two curves", () => {
    const svg = render(spec);
    expect(svg).toContain("<svg");
    expect(count(svg, "<polyline")).toBe(2);
    expect(svg).toContain("diagnostics energy");
    expect(svg).toContain("analytic energy");
  });

  it("renders identically on repeat", () => {
    expect(render(spec)).toBe(render(spec));
  });

  it("uses plain column labels for a single input", () => {
    const svg = render({
      kind: "history",
      inputs: [join(TG, "diagnostics.csv")],
      columns: ["energy", "enstrophy"],
    });
    expect(count(svg, "<polyline")).toBe(2);
    expect(svg).toContain(">energy</text>");
    expect(svg).toContain(">enstrophy</text>");
  });

  it("requires explicit columns", () => {
    expect(() => render({ kind: "history", inputs: spec.inputs })).toThrowError(
      /explicit columns/,
    );
    expect(() =>
      render({ kind: "history", inputs: spec.inputs, columns: [] }),
    ).toThrowError(FigureSpecError);
  });

  it("requires at least one input", () => {
    expect(() => render({ kind: "history", inputs: [], columns: ["energy"] })).toThrowError(
      /at least one input/,
    );
  });

  it("names a missing column", () => {
    expect(() =>
      render({ kind: "history", inputs: [join(TG, "diagnostics.csv")], columns: ["vorticity"] }),
    ).toThrowError(MissingColumnError);
  });

  it("propagates the empty-file error", () => {
    const empty = tmpFile("empty.csv", "");
    expect(() =>
      render({ kind: "history", inputs: [empty], columns: ["energy"] }),
    ).toThrowError(CsvError);
  });

  it("refuses to draw non-finite cells", () => {
    const bad = tmpFile("bad.csv", "t,energy\n0,1\n0.5,inf\n");
    expect(() =>
      render({ kind: "history", inputs: [bad], columns: ["energy"] }),
    ).toThrowError(/row 3 is Infinity/);
  });

  it("honors a log y axis when data allows it", () => {
    const svg = render({ ...spec, yScale: "log" });
    expect(count(svg, "<polyline")).toBe(2);
  });
});

describe("decay", () => {
  const spec: FigureSpec = {
    kind: "decay",
    inputs: [join(SWEEP, "bound_table.csv")],
    alpha: 4,
  };

  it("overlays bound and measured points on log-log axes", () => {
    const svg = render(spec);
    expect(count(svg, "<polyline")).toBe(2);
    expect(count(svg, "<circle")).toBe(8);
    expect(svg).toContain("stroke-dasharray");
    expect(svg).toContain(">measured</text>");
    expect(svg).toContain(">bound</text>");
  });

  it("annotates the fitted slope to match the sweep manifest", () => {
    const manifest = JSON.parse(readFileSync(join(SWEEP, "manifest.json"), "utf-8"));
    const svg = render(spec);
    expect(svg).toContain(`fitted slope ${manifest.fitted_slope.toFixed(3)}`);
  });

  it("annotates the theoretical slope from alpha", () => {
    const svg = render(spec);
    expect(svg).toContain("theory slope 0.714");
  });

  it("requires alpha", () => {
    expect(() => render({ ...spec, alpha: undefined })).toThrowError(/alpha/);
    expect(() => render({ ...spec, alpha: 0.5 })).toThrowError(/exceed 1/);
  });

  it("requires at least four viscosity points", () => {
    const short = tmpFile(
      "short.csv",
      "nu,case,r_star,r_star_star,z0,bound,measured_dissipation\n" +
        "0.01,BELOW,1,2,3,0.2,0.1\n0.003,BELOW,1,2,3,0.1,0.05\n0.001,BELOW,1,2,3,0.05,0.02\n",
    );
    expect(() => render({ ...spec, inputs: [short] })).toThrowError(/at least 4/);
  });

  it("is log-log by definition", () => {
    expect(() => render({ ...spec, yScale: "linear" })).toThrowError(/log-log/);
  });

  it("takes exactly one input", () => {
    expect(() =>
      render({ ...spec, inputs: [...spec.inputs, ...spec.inputs] }),
    ).toThrowError(/exactly one input/);
  });
});

describe("comparison", () => {
  const spec: FigureSpec = {
    kind: "comparison",
    inputs: [join(SWEEP, "nu_0.001", "comparison.csv")],
  };

  it("draws enstrophy against its dominating solution", () => {
    const svg = render(spec);
    expect(count(svg, "<polyline")).toBe(2);
    expect(svg).toContain(">enstrophy</text>");
    expect(svg).toContain(">supersolution</text>");
    expect(svg).toContain("stroke-dasharray");
  });

  it("renders identically on repeat", () => {
    expect(render(spec)).toBe(render(spec));
  });
});

describe("lp_bound", () => {
  const spec: FigureSpec = {
    kind: "lp_bound",
    inputs: [join(SWEEP, "nu_0.001", "lp_bound.csv")],
  };

  it("draws the norm under its data-plus-forcing line", () => {
    const svg = render(spec);
    expect(count(svg, "<polyline")).toBe(2);
    expect(svg).toContain(">lp_norm</text>");
    expect(svg).toContain(">bound</text>");
  });
});

describe("render plumbing", () => {
  it("rejects unknown kinds by name", () => {
    expect(() =>
      render({ kind: "heatmap" as never, inputs: ["x.csv"] }),
    ).toThrowError(/unknown figure kind "heatmap"/);
  });

  it("writes the output file when asked", () => {
    const out = join(tmpFile("unused"), "sub", "fig.svg");
    const svg = render({
      kind: "lp_bound",
      inputs: [join(SWEEP, "nu_0.001", "lp_bound.csv")],
      output: out,
    });
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf-8")).toBe(svg);
  });
});
