import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SchemaError, parseCsv, requireColumns } from "../src/csv";
import { buildFigure } from "../src/figures";
import { render } from "../src/render";

const FIXTURES = path.join(__dirname, "fixtures");
let tmp: string;

beforeAll(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "afchain-render-"));
});

afterAll(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

function svgAttr(svg: string, name: string): string {
  const m = svg.match(new RegExp(`${name}="([^"]*)"`));
  if (!m) throw new Error(`attribute ${name} not found`);
  return m[1];
}

describe("fig2: eigenchannel capacity trajectories", () => {
  it("renders 4 solid + 4 dashed series on semilog-y", () => {
    const out = render({ figure: "fig2", inDir: path.join(FIXTURES, "fig2"), outPath: path.join(tmp, "fig2.svg") });
    const svg = fs.readFileSync(out, "utf8");
    expect(svgAttr(svg, "data-figure")).toBe("fig2");
    expect(svgAttr(svg, "data-x-scale")).toBe("linear");
    expect(svgAttr(svg, "data-y-scale")).toBe("log");
    expect(svgAttr(svg, "data-solid-series")).toBe("4");
    expect(svgAttr(svg, "data-dashed-series")).toBe("4");
    expect((svg.match(/<polyline/g) ?? []).length).toBe(8);
    expect((svg.match(/stroke-dasharray/g) ?? []).length).toBe(4);
  });

  it("dashed overlays come from exponents.csv", () => {
    const data = buildFigure("fig2", path.join(FIXTURES, "fig2"));
    const expTable = parseCsv(path.join(FIXTURES, "fig2", "exponents.csv"));
    const gamma1 = Number(expTable.rows[0]["lambda_gamma"]);
    const dash = data.series.find((s) => s.id === "predicted_i1")!;
    const [n, v] = dash.points[9];
    expect(v).toBeCloseTo(Math.exp(n * gamma1), 12);
  });
});

describe("fig7: separation bound vs antenna count", () => {
  it("renders three ratio curves on log-log axes", () => {
    const out = render({ figure: "fig7", inDir: path.join(FIXTURES, "fig7"), outPath: path.join(tmp, "fig7.svg") });
    const svg = fs.readFileSync(out, "utf8");
    expect(svgAttr(svg, "data-x-scale")).toBe("log");
    expect(svgAttr(svg, "data-y-scale")).toBe("log");
    expect(svgAttr(svg, "data-solid-series")).toBe("3");
  });

  it("curves decay like 1/d at large antenna counts", () => {
    const data = buildFigure("fig7", path.join(FIXTURES, "fig7"));
    const curve = data.series.find((s) => s.id === "phi_bar_12")!;
    const last = curve.points[curve.points.length - 1];
    expect(last[0]).toBe(256);
    expect(last[1] * last[0]).toBeGreaterThan(0.9);
    expect(last[1] * last[0]).toBeLessThan(1.1);
  });
});

describe("fig8: estimated exponents vs their upper bound", () => {
  it("renders nine estimate curves and three bound lines, log-x", () => {
    const out = render({ figure: "fig8", inDir: path.join(FIXTURES, "fig8"), outPath: path.join(tmp, "fig8.svg") });
    const svg = fs.readFileSync(out, "utf8");
    expect(svgAttr(svg, "data-x-scale")).toBe("log");
    expect(svgAttr(svg, "data-y-scale")).toBe("linear");
    expect(svgAttr(svg, "data-solid-series")).toBe("9");
    expect(svgAttr(svg, "data-dashed-series")).toBe("3");
  });

  it("bound lines are flat across the power sweep", () => {
    const data = buildFigure("fig8", path.join(FIXTURES, "fig8"));
    const bound = data.series.find((s) => s.id === "bound_i1")!;
    const ys = new Set(bound.points.map(([, y]) => y));
    expect(ys.size).toBe(1);
  });
});

describe("other figure recipes", () => {
  it("fig3 convergence view is linear-linear with flat dashed levels", () => {
    const out = render({ figure: "fig3", inDir: path.join(FIXTURES, "fig3"), outPath: path.join(tmp, "fig3.svg") });
    const svg = fs.readFileSync(out, "utf8");
    expect(svgAttr(svg, "data-y-scale")).toBe("linear");
    expect(svgAttr(svg, "data-solid-series")).toBe("4");
    expect(svgAttr(svg, "data-dashed-series")).toBe("4");
  });

  it("fig6 ratio view renders solid/dashed pairs per weaker channel", () => {
    const out = render({ figure: "fig6", inDir: path.join(FIXTURES, "fig6"), outPath: path.join(tmp, "fig6.svg") });
    const svg = fs.readFileSync(out, "utf8");
    expect(svgAttr(svg, "data-y-scale")).toBe("log");
    expect(svgAttr(svg, "data-solid-series")).toBe("2");
    expect(svgAttr(svg, "data-dashed-series")).toBe("2");
  });
});

describe("PNG output", () => {
  it("rasterizes through the same pipeline", () => {
    const out = render({ figure: "fig7", inDir: path.join(FIXTURES, "fig7"), outPath: path.join(tmp, "fig7.png") });
    const bytes = fs.readFileSync(out);
    expect(bytes.subarray(0, 4)).toEqual(Buffer.from([0x89, 0x50, 0x4e, 0x47]));
    expect(bytes.length).toBeGreaterThan(1000);
  });
});

describe("error handling", () => {
  it("rejects unknown figures and extensions", () => {
    expect(() => render({ figure: "fig9", inDir: FIXTURES, outPath: path.join(tmp, "x.svg") })).toThrow(/unknown figure/);
    expect(() => render({ figure: "fig2", inDir: path.join(FIXTURES, "fig2"), outPath: path.join(tmp, "x.pdf") })).toThrow(/svg or \.png/);
  });

  it("empty CSV errors without emitting an image", () => {
    const dir = fs.mkdtempSync(path.join(tmp, "empty-"));
    fs.writeFileSync(path.join(dir, "phi_bar.csv"), "d,i,j,phi_bar,leading_order\n");
    const outPath = path.join(tmp, "empty.svg");
    expect(() => render({ figure: "fig7", inDir: dir, outPath })).toThrow(/no data rows/);
    expect(fs.existsSync(outPath)).toBe(false);
  });

  it("missing columns are reported by name", () => {
    const dir = fs.mkdtempSync(path.join(tmp, "cols-"));
    fs.writeFileSync(path.join(dir, "phi_bar.csv"), "d,i,j,spread\n4,1,2,0.33\n");
    expect(() => render({ figure: "fig7", inDir: dir, outPath: path.join(tmp, "cols.svg") })).toThrow(/phi_bar, leading_order/);
  });

  it("requireColumns raises SchemaError with the file path", () => {
    const table = parseCsv(path.join(FIXTURES, "fig7", "phi_bar.csv"));
    try {
      requireColumns(table, ["nonexistent"]);
      throw new Error("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect(String(err)).toContain("phi_bar.csv");
    }
  });

  it("non-numeric cells are reported with their column", () => {
    const dir = fs.mkdtempSync(path.join(tmp, "bad-"));
    fs.writeFileSync(path.join(dir, "phi_bar.csv"), "d,i,j,phi_bar,leading_order\n4,1,2,abc,0.25\n");
    expect(() => render({ figure: "fig7", inDir: dir, outPath: path.join(tmp, "bad.svg") })).toThrow(/column phi_bar/);
  });

  it("re-rendering never mutates the CSV inputs", () => {
    const src = path.join(FIXTURES, "fig7", "phi_bar.csv");
    const before = fs.readFileSync(src);
    render({ figure: "fig7", inDir: path.join(FIXTURES, "fig7"), outPath: path.join(tmp, "again.svg") });
    expect(fs.readFileSync(src).equals(before)).toBe(true);
  });
});
