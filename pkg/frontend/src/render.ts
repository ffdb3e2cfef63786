import * as fs from "fs";
import * as path from "path";

import { FIGURES, FigureId, buildFigure } from "./figures";
import { chartSvg } from "./svg";

export interface PlotSpec {
  figure: string;
  inDir: string;
  outPath: string;
}

export function render(spec: PlotSpec): string {
  if (!(FIGURES as readonly string[]).includes(spec.figure)) {
    throw new Error(`unknown figure ${JSON.stringify(spec.figure)}; choose from ${FIGURES.join(", ")}`);
  }
  const ext = path.extname(spec.outPath).toLowerCase();
  if (ext !== ".svg" && ext !== ".png") {
    throw new Error(`output must end in .svg or .png, got ${spec.outPath}`);
  }
  const data = buildFigure(spec.figure as FigureId, spec.inDir);
  const svg = chartSvg(data.spec, data.series);
  fs.mkdirSync(path.dirname(path.resolve(spec.outPath)), { recursive: true });
  if (ext === ".svg") {
    fs.writeFileSync(spec.outPath, svg);
  } else {
    // lazily required: only PNG output needs the rasterizer
    const { Resvg } = require("@resvg/resvg-js");
    const png = new Resvg(svg).render().asPng();
    fs.writeFileSync(spec.outPath, png);
  }
  return spec.outPath;
}
