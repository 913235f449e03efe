#!/usr/bin/env node
/** plot_convergence <in.csv> <out.svg> */
import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { renderConvergence } from "./convergence.js";

export function main(argv: string[]): number {
  if (argv.length !== 2) {
    console.error("usage: plot_convergence <in.csv> <out.svg>");
    return 2;
  }
  const [input, output] = argv;
  try {
    const svg = renderConvergence(readFileSync(input, "utf-8"), basename(input));
    writeFileSync(output, svg);
  } catch (err) {
    console.error(`plot_convergence: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
