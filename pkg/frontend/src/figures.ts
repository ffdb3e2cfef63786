import * as path from "path";

import { Table, num, parseCsv, requireColumns } from "./csv";
import { ChartSpec, Series } from "./svg";

export const FIGURES = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"] as const;
export type FigureId = (typeof FIGURES)[number];

export interface FigureData {
  spec: ChartSpec;
  series: Series[];
}

interface ExponentRow {
  index: number;
  lambdaGamma: number;
}

function readExponents(inDir: string): ExponentRow[] {
  const table = parseCsv(path.join(inDir, "exponents.csv"));
  requireColumns(table, ["index", "lambda_gamma"]);
  return table.rows.map((r) => ({
    index: num(table, r, "index"),
    lambdaGamma: num(table, r, "lambda_gamma"),
  }));
}

function groupSorted(
  table: Table,
  rows: Record<string, string>[],
  keyCol: string,
  xCol: string,
  yCol: string
): Map<number, Array<[number, number]>> {
  const groups = new Map<number, Array<[number, number]>>();
  for (const r of rows) {
    const key = num(table, r, keyCol);
    if (!groups.has(key)) groups.set(key, []);
    groups.get(key)!.push([num(table, r, xCol), num(table, r, yCol)]);
  }
  for (const pts of groups.values()) pts.sort((a, b) => a[0] - b[0]);
  return new Map([...groups.entries()].sort((a, b) => a[0] - b[0]));
}

function capacityTrajectories(figure: FigureId, inDir: string): FigureData {
  const traj = parseCsv(path.join(inDir, "trajectory.csv"));
  requireColumns(traj, ["replica", "hop", "eig_index", "capacity_nats"]);
  const replica0 = traj.rows.filter((r) => r.replica === "0");
  const groups = groupSorted(traj, replica0, "eig_index", "hop", "capacity_nats");
  const series: Series[] = [];
  for (const [i, pts] of groups) {
    series.push({ id: `capacity_i${i}`, style: "solid", points: pts });
  }
  const hops = [...new Set(replica0.map((r) => Number(r.hop)))].sort((a, b) => a - b);
  for (const e of readExponents(inDir)) {
    series.push({
      id: `predicted_i${e.index}`,
      style: "dashed",
      points: hops.map((n) => [n, Math.exp(n * e.lambdaGamma)]),
    });
  }
  return {
    spec: {
      figure,
      xScale: "linear",
      yScale: "log",
      xLabel: "hop n",
      yLabel: "eigenchannel capacity (nats)",
    },
    series,
  };
}

function convergence(figure: FigureId, inDir: string): FigureData {
  const table = parseCsv(path.join(inDir, "convergence.csv"));
  requireColumns(table, ["replica", "hop", "eig_index", "norm_log_capacity", "lambda_gamma"]);
  const replica0 = table.rows.filter((r) => r.replica === "0");
  const groups = groupSorted(table, replica0, "eig_index", "hop", "norm_log_capacity");
  const series: Series[] = [];
  const hops = [...new Set(replica0.map((r) => Number(r.hop)))].sort((a, b) => a - b);
  for (const [i, pts] of groups) {
    series.push({ id: `norm_log_capacity_i${i}`, style: "solid", points: pts });
  }
  const gammas = new Map<number, number>();
  for (const r of replica0) gammas.set(num(table, r, "eig_index"), num(table, r, "lambda_gamma"));
  for (const [i, g] of [...gammas.entries()].sort((a, b) => a[0] - b[0])) {
    series.push({
      id: `lambda_gamma_i${i}`,
      style: "dashed",
      points: hops.map((n) => [n, g]),
    });
  }
  return {
    spec: {
      figure,
      xScale: "linear",
      yScale: "linear",
      xLabel: "hop n",
      yLabel: "(1/n) log capacity",
    },
    series,
  };
}

function capacityRatios(figure: FigureId, inDir: string): FigureData {
  const table = parseCsv(path.join(inDir, "nu.csv"));
  requireColumns(table, ["replica", "hop", "eig_index", "log_nu"]);
  const replica0 = table.rows.filter((r) => r.replica === "0");
  const groups = groupSorted(table, replica0, "eig_index", "hop", "log_nu");
  const series: Series[] = [];
  for (const [i, pts] of groups) {
    series.push({
      id: `nu_1${i}`,
      style: "solid",
      points: pts.map(([n, v]) => [n, Math.exp(v)]),
    });
  }
  const exps = readExponents(inDir);
  const top = exps.find((e) => e.index === 1);
  if (!top) throw new Error(`${inDir}/exponents.csv: missing index 1`);
  const hops = [...new Set(replica0.map((r) => Number(r.hop)))].sort((a, b) => a - b);
  for (const e of exps.filter((e) => e.index > 1)) {
    const phi = top.lambdaGamma - e.lambdaGamma;
    series.push({
      id: `predicted_nu_1${e.index}`,
      style: "dashed",
      points: hops.map((n) => [n, Math.exp(n * phi)]),
    });
  }
  return {
    spec: {
      figure,
      xScale: "linear",
      yScale: "log",
      xLabel: "hop n",
      yLabel: "capacity ratio c_1 / c_i",
    },
    series,
  };
}

function spreadVsAntennas(figure: FigureId, inDir: string): FigureData {
  const table = parseCsv(path.join(inDir, "phi_bar.csv"));
  requireColumns(table, ["d", "i", "j", "phi_bar", "leading_order"]);
  const groups = groupSorted(table, table.rows, "j", "d", "phi_bar");
  const series: Series[] = [];
  for (const [j, pts] of groups) {
    series.push({ id: `phi_bar_1${j}`, style: "solid", points: pts });
  }
  const lead = groupSorted(table, table.rows, "j", "d", "leading_order");
  for (const [j, pts] of lead) {
    series.push({ id: `leading_order_1${j}`, style: "dashed", points: pts });
  }
  return {
    spec: {
      figure,
      xScale: "log",
      yScale: "log",
      xLabel: "antennas d",
      yLabel: "capacity separation bound",
    },
    series,
  };
}

function boundSweep(figure: FigureId, inDir: string): FigureData {
  const table = parseCsv(path.join(inDir, "fig8.csv"));
  requireColumns(table, ["b", "power_ratio", "eig_index", "lambda_est", "bound"]);
  const series: Series[] = [];
  const byCurve = new Map<string, Array<[number, number]>>();
  for (const r of table.rows) {
    const key = `b${r.b}_i${r.eig_index}`;
    if (!byCurve.has(key)) byCurve.set(key, []);
    byCurve.get(key)!.push([num(table, r, "power_ratio"), num(table, r, "lambda_est")]);
  }
  for (const [key, pts] of [...byCurve.entries()].sort()) {
    pts.sort((a, b) => a[0] - b[0]);
    series.push({ id: `lambda_est_${key}`, style: "solid", points: pts });
  }
  // one straight bound line per eigenchannel (schedule-independent)
  const bounds = new Map<number, number>();
  const powers = [...new Set(table.rows.map((r) => num(table, r, "power_ratio")))].sort(
    (a, b) => a - b
  );
  for (const r of table.rows) bounds.set(num(table, r, "eig_index"), num(table, r, "bound"));
  for (const [i, b] of [...bounds.entries()].sort((a, b) => a[0] - b[0])) {
    series.push({
      id: `bound_i${i}`,
      style: "dashed",
      points: powers.map((p) => [p, b]),
    });
  }
  return {
    spec: {
      figure,
      xScale: "log",
      yScale: "linear",
      xLabel: "transmit power p / n0",
      yLabel: "information exponent",
    },
    series,
  };
}

export function buildFigure(figure: FigureId, inDir: string): FigureData {
  switch (figure) {
    case "fig2":
    case "fig4":
      return capacityTrajectories(figure, inDir);
    case "fig3":
    case "fig5":
      return convergence(figure, inDir);
    case "fig6":
      return capacityRatios(figure, inDir);
    case "fig7":
      return spreadVsAntennas(figure, inDir);
    case "fig8":
      return boundSweep(figure, inDir);
  }
}
