/** Log-log convergence plot with a fitted-slope annotation. */
import { column, CsvError, parseNumericCsv } from "./csv.js";
import { el, text, document as svgDocument } from "./svg.js";
import { decadeTicks, logScale } from "./scale.js";

export interface ConvergenceSeries {
  dts: number[];
  errors: number[];
}

export function readConvergence(csvText: string): ConvergenceSeries {
  const table = parseNumericCsv(csvText, ["dt", "error"]);
  const dts = column(table, "dt");
  const errors = column(table, "error");
  if (dts.some((v) => v <= 0) || errors.some((v) => v <= 0)) {
    throw new CsvError("convergence data must be positive for log axes");
  }
  return { dts, errors };
}

/** Least-squares slope of log(error) against log(dt). */
export function fittedSlope(series: ConvergenceSeries): number {
  const xs = series.dts.map(Math.log);
  const ys = series.errors.map(Math.log);
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) ** 2;
  }
  if (den === 0) {
    throw new CsvError("need at least two distinct step sizes");
  }
  return num / den;
}

export function renderConvergence(csvText: string, title?: string): string {
  const series = readConvergence(csvText);
  const slope = fittedSlope(series);
  const width = 560;
  const height = 440;
  const margin = { left: 70, right: 20, top: title ? 36 : 20, bottom: 52 };
  const sx = logScale(
    [Math.min(...series.dts), Math.max(...series.dts)],
    [margin.left, width - margin.right],
  );
  const sy = logScale(
    [Math.min(...series.errors), Math.max(...series.errors)],
    [height - margin.bottom, margin.top],
  );
  const parts: string[] = [];
  parts.push(el("rect", { x: 0, y: 0, width, height, fill: "white" }));
  const axisY = height - margin.bottom;
  parts.push(el("line", { x1: margin.left, y1: axisY, x2: width - margin.right, y2: axisY, stroke: "black" }));
  parts.push(el("line", { x1: margin.left, y1: axisY, x2: margin.left, y2: margin.top, stroke: "black" }));
  for (const tick of decadeTicks(sx.domain)) {
    const px = sx(tick);
    parts.push(el("line", { x1: px, y1: axisY, x2: px, y2: axisY + 5, stroke: "black" }));
    parts.push(text(`1e${Math.round(Math.log10(tick))}`, {
      x: px, y: axisY + 18, "text-anchor": "middle", "font-size": 11,
    }));
  }
  for (const tick of decadeTicks(sy.domain)) {
    const py = sy(tick);
    parts.push(el("line", { x1: margin.left - 5, y1: py, x2: margin.left, y2: py, stroke: "black" }));
    parts.push(text(`1e${Math.round(Math.log10(tick))}`, {
      x: margin.left - 8, y: py + 4, "text-anchor": "end", "font-size": 11,
    }));
  }
  const points = series.dts.map((dt, i) => [sx(dt), sy(series.errors[i])] as const);
  const path = points.map(([x, y], i) => `${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
  parts.push(el("path", { d: path, fill: "none", stroke: "steelblue", "stroke-width": 1.5, class: "error-line" }));
  for (const [x, y] of points) {
    parts.push(el("circle", { cx: x.toFixed(2), cy: y.toFixed(2), r: 3, fill: "steelblue", class: "error-point" }));
  }
  parts.push(text(`slope ≈ ${slope.toFixed(2)}`, {
    x: width - margin.right - 8, y: margin.top + 16, "text-anchor": "end",
    "font-size": 13, class: "slope-label",
  }));
  parts.push(text("step size", { x: (margin.left + width - margin.right) / 2, y: height - 12, "text-anchor": "middle", "font-size": 13 }));
  parts.push(text("error", { x: 18, y: (margin.top + axisY) / 2, "text-anchor": "middle", "font-size": 13 }));
  if (title) {
    parts.push(text(title, { x: width / 2, y: 20, "text-anchor": "middle", "font-size": 14 }));
  }
  return svgDocument(width, height, parts);
}
