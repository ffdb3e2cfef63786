export type Scale = "linear" | "log";

export interface Series {
  id: string;
  style: "solid" | "dashed";
  points: Array<[number, number]>;
}

export interface ChartSpec {
  figure: string;
  xScale: Scale;
  yScale: Scale;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
}

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f", "#bcbd22",
];

const MARGIN = { left: 64, right: 16, top: 20, bottom: 44 };

function transform(scale: Scale, v: number): number | null {
  if (scale === "log") {
    return v > 0 ? Math.log10(v) : null; // nonpositive points vanish on log axes
  }
  return v;
}

function ticks(lo: number, hi: number, scale: Scale): number[] {
  if (scale === "log") {
    const out: number[] = [];
    for (let e = Math.ceil(lo); e <= Math.floor(hi); e++) out.push(e);
    if (out.length >= 2) return out.length > 8 ? out.filter((_, i) => i % Math.ceil(out.length / 8) === 0) : out;
  }
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mult = span / step > 20 ? 5 : span / step > 8 ? 2 : 1;
  const s = step * mult;
  const out: number[] = [];
  for (let t = Math.ceil(lo / s) * s; t <= hi + 1e-12; t += s) out.push(t);
  return out;
}

function fmtTick(v: number, scale: Scale): string {
  if (scale === "log") return `1e${v}`;
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.01) return v.toExponential(0);
  return String(Math.round(v * 1000) / 1000);
}

export function chartSvg(spec: ChartSpec, series: Series[]): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const pts: Array<{ x: number; y: number; s: Series }> = [];
  for (const s of series) {
    for (const [x, y] of s.points) {
      const tx = transform(spec.xScale, x);
      const ty = transform(spec.yScale, y);
      if (tx !== null && ty !== null && Number.isFinite(tx) && Number.isFinite(ty)) {
        pts.push({ x: tx, y: ty, s });
      }
    }
  }
  if (pts.length === 0) {
    throw new Error(`figure ${spec.figure}: nothing to plot after axis transforms`);
  }
  const xs = pts.map((p) => p.x);
  const ys = pts.map((p) => p.y);
  let xLo = Math.min(...xs), xHi = Math.max(...xs);
  let yLo = Math.min(...ys), yHi = Math.max(...ys);
  if (xHi === xLo) { xHi += 1; xLo -= 1; }
  if (yHi === yLo) { yHi += 1; yLo -= 1; }
  const padY = 0.04 * (yHi - yLo);
  yLo -= padY; yHi += padY;

  const px = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) => MARGIN.top + (1 - (y - yLo) / (yHi - yLo)) * plotH;

  const solid = series.filter((s) => s.style === "solid").length;
  const dashed = series.filter((s) => s.style === "dashed").length;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" data-figure="${spec.figure}" ` +
      `data-x-scale="${spec.xScale}" data-y-scale="${spec.yScale}" ` +
      `data-solid-series="${solid}" data-dashed-series="${dashed}">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  for (const t of ticks(xLo, xHi, spec.xScale)) {
    const x = px(t);
    parts.push(`<line x1="${x.toFixed(1)}" y1="${MARGIN.top}" x2="${x.toFixed(1)}" y2="${MARGIN.top + plotH}" stroke="#eee"/>`);
    parts.push(`<text x="${x.toFixed(1)}" y="${height - 24}" font-size="11" text-anchor="middle" fill="#444">${fmtTick(t, spec.xScale)}</text>`);
  }
  for (const t of ticks(yLo, yHi, spec.yScale)) {
    const y = py(t);
    parts.push(`<line x1="${MARGIN.left}" y1="${y.toFixed(1)}" x2="${MARGIN.left + plotW}" y2="${y.toFixed(1)}" stroke="#eee"/>`);
    parts.push(`<text x="${MARGIN.left - 6}" y="${(y + 4).toFixed(1)}" font-size="11" text-anchor="end" fill="#444">${fmtTick(t, spec.yScale)}</text>`);
  }
  parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#888"/>`);
  parts.push(`<text x="${MARGIN.left + plotW / 2}" y="${height - 6}" font-size="13" text-anchor="middle" fill="#111">${spec.xLabel}</text>`);
  parts.push(`<text x="14" y="${MARGIN.top + plotH / 2}" font-size="13" text-anchor="middle" fill="#111" transform="rotate(-90 14 ${MARGIN.top + plotH / 2})">${spec.yLabel}</text>`);

  series.forEach((s, idx) => {
    const coords = s.points
      .map(([x, y]) => [transform(spec.xScale, x), transform(spec.yScale, y)])
      .filter((c): c is [number, number] => c[0] !== null && c[1] !== null && Number.isFinite(c[0]!) && Number.isFinite(c[1]!))
      .map(([x, y]) => `${px(x).toFixed(2)},${py(y).toFixed(2)}`)
      .join(" ");
    if (coords.length === 0) return;
    const color = PALETTE[idx % PALETTE.length];
    const dash = s.style === "dashed" ? ' stroke-dasharray="6,4"' : "";
    parts.push(
      `<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="1.6"` +
        `${dash} data-series-id="${s.id}" data-style="${s.style}"/>`
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
