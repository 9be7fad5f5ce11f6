#!/usr/bin/env node
/** resi-figures: render a study CSV into an SVG figure. */

import { readFileSync, writeFileSync } from "fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { render } from "./charts";
import { parseStudyCsv, SchemaError } from "./csv";

export function run(argv: string[]): number {
  const args = yargs(argv)
    .option("study", {
      choices: ["variance", "bias", "coverage"] as const,
      demandOption: true,
      describe: "which study the CSV comes from",
    })
    .option("in", { type: "string", demandOption: true, describe: "input CSV path" })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .strict()
    .exitProcess(false)
    .parseSync();

  let textContent: string;
  try {
    textContent = readFileSync(args.in, "utf8");
  } catch (err) {
    console.error(`cannot read ${args.in}: ${(err as Error).message}`);
    return 1;
  }
  try {
    const rows = parseStudyCsv(textContent);
    writeFileSync(args.out, render(args.study, rows));
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    console.error((err as Error).message);
    return 1;
  }
  console.log(`wrote ${args.out}`);
  return 0;
}

if (require.main === module) {
  process.exit(run(hideBin(process.argv)));
}
