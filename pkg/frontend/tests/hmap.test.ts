import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { CsvError } from "../src/csv.js";
import { coneReport, readHmapGrid, renderHmap, STABLE_TOL } from "../src/hmap.js";
import { main as plotHmapMain } from "../src/plot_hmap.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

describe("readHmapGrid", () => {
  it("reconstructs the tensor grid", () => {
    const grid = readHmapGrid(fixture("hmap_imkg232b.csv"));
    expect(grid.xs).toHaveLength(51);
    expect(grid.zs).toHaveLength(51);
    expect(grid.rho[0][0]).toBeCloseTo(1.0, 12);
  });

  it("rejects an empty csv", () => {
    expect(() => readHmapGrid("")).toThrow(CsvError);
  });

  it("rejects a schema mismatch", () => {
    expect(() => readHmapGrid("a,b\n1,2\n")).toThrow(/missing column/);
  });

  it("rejects ragged sample sets", () => {
    expect(() => readHmapGrid("x,z,rho\n0,0,1\n0,1,1\n1,0,1\n")).toThrow(/tensor grid/);
  });
});

describe("renderHmap", () => {
  it("renders the fully stable window as blank", () => {
    // Every sample of this method's window up to x = 2 is stable, so no
    // colored cells may appear left of that line.
    const grid = readHmapGrid(fixture("hmap_imkg232b.csv"));
    for (let i = 0; i < grid.xs.length; i++) {
      if (grid.xs[i] > 2.0) continue;
      for (const rho of grid.rho[i]) {
        expect(rho).toBeLessThanOrEqual(1 + STABLE_TOL);
      }
    }
    const svg = renderHmap(fixture("hmap_imkg232b.csv"));
    expect(svg).toContain("<svg");
    expect(svg).toContain("</svg>");
  });

  it("draws overlay lines when requested", () => {
    const svg = renderHmap(fixture("hmap_imkg252b.csv"), { gamma: 0.45, n0: 3.5 });
    expect(svg).toContain('class="gamma-line"');
    expect(svg).toContain('class="n0-line"');
    expect(svg).toContain('class="unstable-cell"');
  });

  it("renders without overlays too", () => {
    const svg = renderHmap(fixture("hmap_imkg252a.csv"));
    expect(svg).not.toContain('class="gamma-line"');
  });
});

describe("cone placement", () => {
  it("places every unstable sample below the 0.45 cone for the method the published region figure shows", () => {
    // The published figure labelled with the 'a' variant shows this
    // tableau's data; its instability lobe hugs the axis below the cone.
    const grid = readHmapGrid(fixture("hmap_imkg252b.csv"));
    const report = coneReport(grid, 0.45, 3.5);
    expect(report.unstable).toBeGreaterThan(0);
    expect(report.aboveCone).toBe(0);
  });

  it("reports the 'a' variant's instability above the cone, matching the documented data defect", () => {
    // The shipped coefficients of the 'a' variant are unstable throughout
    // the large-z region, so no cone can bound them; the detector must say
    // so rather than render a misleading overlay.
    const grid = readHmapGrid(fixture("hmap_imkg252a.csv"));
    const report = coneReport(grid, 0.45, 3.5);
    expect(report.unstable).toBeGreaterThan(0);
    expect(report.aboveCone).toBeGreaterThan(0);
  });
});

describe("plot_hmap cli", () => {
  it("writes an svg file", () => {
    const dir = mkdtempSync(join(tmpdir(), "hmap-"));
    const out = join(dir, "out.svg");
    const code = plotHmapMain([
      join(FIXTURES, "hmap_imkg252b.csv"),
      out,
      "--gamma",
      "0.45",
      "--n0",
      "3.5",
    ]);
    expect(code).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg).toContain('class="gamma-line"');
  });

  it("fails cleanly on an empty input", () => {
    const dir = mkdtempSync(join(tmpdir(), "hmap-"));
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    const code = plotHmapMain([empty, join(dir, "out.svg")]);
    expect(code).toBe(1);
  });

  it("rejects bad usage", () => {
    expect(plotHmapMain(["only-one-arg"])).toBe(2);
  });
});
