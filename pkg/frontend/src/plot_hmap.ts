#!/usr/bin/env node
/** plot_hmap <in.csv> <out.svg> [--gamma G] [--n0 X] */
import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { renderHmap } from "./hmap.js";

export function main(argv: string[]): number {
  const positional: string[] = [];
  let gamma: number | undefined;
  let n0: number | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--gamma") {
      gamma = Number(argv[++i]);
    } else if (arg === "--n0") {
      n0 = Number(argv[++i]);
    } else {
      positional.push(arg);
    }
  }
  if (positional.length !== 2 || [gamma, n0].some((v) => v !== undefined && Number.isNaN(v))) {
    console.error("usage: plot_hmap <in.csv> <out.svg> [--gamma G] [--n0 X]");
    return 2;
  }
  const [input, output] = positional;
  try {
    const svg = renderHmap(readFileSync(input, "utf-8"), {
      gamma,
      n0,
      title: basename(input),
    });
    writeFileSync(output, svg);
  } catch (err) {
    console.error(`plot_hmap: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
