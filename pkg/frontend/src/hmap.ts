/** Stability-region heatmap: spectral radii over scaled wave numbers.
 *
 * The stable region (radius at most 1) stays blank; radii above 1 are
 * colored on a fixed scale clipped to [1, 2] so figures are comparable
 * across methods.  Optional overlays mark the vertical line x = n0 and the
 * cone boundary z = gamma x.
 */
import { column, CsvError, parseNumericCsv } from "./csv.js";
import { el, text, document as svgDocument } from "./svg.js";
import { linearScale, linearTicks } from "./scale.js";

export interface HmapGrid {
  xs: number[];
  zs: number[];
  /** rho[i][j] at (xs[i], zs[j]) */
  rho: number[][];
}

export interface HmapOptions {
  gamma?: number;
  n0?: number;
  width?: number;
  height?: number;
  title?: string;
}

export const STABLE_TOL = 1e-8;
const COLOR_CLIP: [number, number] = [1.0, 2.0];

export function readHmapGrid(csvText: string): HmapGrid {
  const table = parseNumericCsv(csvText, ["x", "z", "rho"]);
  const xsAll = column(table, "x");
  const zsAll = column(table, "z");
  const rhoAll = column(table, "rho");
  const xs = [...new Set(xsAll)].sort((a, b) => a - b);
  const zs = [...new Set(zsAll)].sort((a, b) => a - b);
  if (xs.length * zs.length !== table.rows.length) {
    throw new CsvError("samples do not cover a full tensor grid");
  }
  const xi = new Map(xs.map((v, i) => [v, i]));
  const zi = new Map(zs.map((v, i) => [v, i]));
  const rho = xs.map(() => new Array<number>(zs.length).fill(Number.NaN));
  for (let k = 0; k < rhoAll.length; k++) {
    rho[xi.get(xsAll[k])!][zi.get(zsAll[k])!] = rhoAll[k];
  }
  return { xs, zs, rho };
}

/** Color for a radius above 1, interpolating blue -> yellow over the clip range. */
export function radiusColor(rho: number): string {
  const [lo, hi] = COLOR_CLIP;
  const t = Math.min(1, Math.max(0, (rho - lo) / (hi - lo)));
  const r = Math.round(40 + t * (250 - 40));
  const g = Math.round(80 + t * (220 - 80));
  const b = Math.round(200 - t * 160);
  return `rgb(${r},${g},${b})`;
}

export interface ConeReport {
  unstable: number;
  aboveCone: number;
}

/** Count unstable samples with x <= n0 and how many sit on or above z = gamma x. */
export function coneReport(grid: HmapGrid, gamma: number, n0: number): ConeReport {
  let unstable = 0;
  let aboveCone = 0;
  for (let i = 0; i < grid.xs.length; i++) {
    const x = grid.xs[i];
    if (x > n0 || x === 0) {
      continue;
    }
    for (let j = 0; j < grid.zs.length; j++) {
      if (grid.rho[i][j] > 1 + STABLE_TOL) {
        unstable += 1;
        if (grid.zs[j] >= gamma * x) {
          aboveCone += 1;
        }
      }
    }
  }
  return { unstable, aboveCone };
}

function cellEdges(values: number[]): number[] {
  const edges = [values[0]];
  for (let i = 0; i + 1 < values.length; i++) {
    edges.push(0.5 * (values[i] + values[i + 1]));
  }
  edges.push(values[values.length - 1]);
  return edges;
}

export function renderHmap(csvText: string, options: HmapOptions = {}): string {
  const grid = readHmapGrid(csvText);
  const width = options.width ?? 640;
  const height = options.height ?? 480;
  const margin = { left: 62, right: 16, top: options.title ? 34 : 16, bottom: 46 };
  const sx = linearScale(
    [grid.xs[0], grid.xs[grid.xs.length - 1]],
    [margin.left, width - margin.right],
  );
  const sz = linearScale(
    [grid.zs[0], grid.zs[grid.zs.length - 1]],
    [height - margin.bottom, margin.top],
  );
  const parts: string[] = [];
  parts.push(
    el("rect", { x: 0, y: 0, width, height, fill: "white" }),
  );

  const xe = cellEdges(grid.xs);
  const ze = cellEdges(grid.zs);
  for (let i = 0; i < grid.xs.length; i++) {
    for (let j = 0; j < grid.zs.length; j++) {
      const rho = grid.rho[i][j];
      if (!(rho > 1 + STABLE_TOL)) {
        continue; // stable region stays blank
      }
      const x0 = sx(xe[i]);
      const x1 = sx(xe[i + 1]);
      const z0 = sz(ze[j]);
      const z1 = sz(ze[j + 1]);
      parts.push(
        el("rect", {
          x: x0.toFixed(2),
          y: Math.min(z0, z1).toFixed(2),
          width: (x1 - x0).toFixed(2),
          height: Math.abs(z0 - z1).toFixed(2),
          fill: radiusColor(rho),
          class: "unstable-cell",
        }),
      );
    }
  }

  // axes
  const axisY = height - margin.bottom;
  parts.push(el("line", { x1: margin.left, y1: axisY, x2: width - margin.right, y2: axisY, stroke: "black" }));
  parts.push(el("line", { x1: margin.left, y1: axisY, x2: margin.left, y2: margin.top, stroke: "black" }));
  for (const tick of linearTicks(sx.domain)) {
    const px = sx(tick);
    parts.push(el("line", { x1: px, y1: axisY, x2: px, y2: axisY + 5, stroke: "black" }));
    parts.push(text(String(tick), { x: px, y: axisY + 18, "text-anchor": "middle", "font-size": 11 }));
  }
  for (const tick of linearTicks(sz.domain)) {
    const py = sz(tick);
    parts.push(el("line", { x1: margin.left - 5, y1: py, x2: margin.left, y2: py, stroke: "black" }));
    parts.push(text(String(tick), { x: margin.left - 8, y: py + 4, "text-anchor": "end", "font-size": 11 }));
  }
  parts.push(text("x", { x: (margin.left + width - margin.right) / 2, y: height - 10, "text-anchor": "middle", "font-size": 13 }));
  parts.push(text("z", { x: 16, y: (margin.top + axisY) / 2, "text-anchor": "middle", "font-size": 13 }));

  if (options.n0 !== undefined) {
    const px = sx(options.n0);
    parts.push(el("line", {
      x1: px, y1: axisY, x2: px, y2: margin.top,
      stroke: "black", "stroke-dasharray": "6 3", class: "n0-line",
    }));
  }
  if (options.gamma !== undefined) {
    const xMax = sx.domain[1];
    const zMax = sz.domain[1];
    // clip the ray z = gamma x to the window
    const xEnd = options.gamma > 0 ? Math.min(xMax, zMax / options.gamma) : xMax;
    parts.push(el("line", {
      x1: sx(0), y1: sz(0), x2: sx(xEnd), y2: sz(options.gamma * xEnd),
      stroke: "crimson", "stroke-width": 1.5, class: "gamma-line",
    }));
  }
  if (options.title) {
    parts.push(text(options.title, { x: width / 2, y: 20, "text-anchor": "middle", "font-size": 14 }));
  }
  return svgDocument(width, height, parts);
}
