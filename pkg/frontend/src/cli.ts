#!/usr/bin/env node
/**
 * plot --in risks.csv --out fig.svg [--instance K] [--loglog] [--annotate-slope]
 *
 * With --instance the single panel goes to --out verbatim; otherwise one
 * image per instance present in the CSV is written, with ".i<k>" inserted
 * before the extension. Exit codes: 0 success, 1 empty selection or parse
 * failure, 2 usage error.
 */

import * as fs from "fs";
import * as path from "path";

import { CsvError, parseRiskCsv, RiskRow } from "./csv";
import { renderInstancePlot } from "./plot";

interface Args {
  input: string;
  output: string;
  instance: number | null;
  logLog: boolean;
  annotateSlope: boolean;
}

const USAGE =
  "usage: plot --in <risks.csv> --out <image.svg> [--instance K] [--loglog] [--annotate-slope]";

export class UsageError extends Error {}

export function parseArgs(argv: string[]): Args {
  const args: Args = {
    input: "",
    output: "",
    instance: null,
    logLog: false,
    annotateSlope: false,
  };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const needsValue = () => {
      if (i + 1 >= argv.length) throw new UsageError(`${flag} needs a value`);
      return argv[++i];
    };
    switch (flag) {
      case "--in":
        args.input = needsValue();
        break;
      case "--out":
        args.output = needsValue();
        break;
      case "--instance": {
        const raw = needsValue();
        const value = Number(raw);
        if (!Number.isInteger(value)) throw new UsageError(`bad --instance: ${raw}`);
        args.instance = value;
        break;
      }
      case "--loglog":
        args.logLog = true;
        break;
      case "--annotate-slope":
        args.annotateSlope = true;
        break;
      default:
        throw new UsageError(`unknown flag: ${flag}`);
    }
  }
  if (!args.input || !args.output) throw new UsageError(USAGE);
  return args;
}

function outputPath(base: string, instance: number, multi: boolean): string {
  if (!multi) return base;
  const ext = path.extname(base);
  const stem = base.slice(0, base.length - ext.length);
  return `${stem}.i${instance}${ext || ".svg"}`;
}

export function runCli(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(String(err.message));
      console.error(USAGE);
      return 2;
    }
    throw err;
  }

  let rows: RiskRow[];
  try {
    rows = parseRiskCsv(fs.readFileSync(args.input, "utf8"));
  } catch (err) {
    if (err instanceof CsvError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${args.input}: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }

  if (args.instance !== null) {
    rows = rows.filter((row) => row.instance === args.instance);
  }
  if (rows.length === 0) {
    console.error("error: no rows match the requested selection");
    return 1;
  }

  const instances = [...new Set(rows.map((row) => row.instance))].sort((a, b) => a - b);
  const multi = instances.length > 1;
  for (const instance of instances) {
    const subset = rows.filter((row) => row.instance === instance);
    const target = outputPath(args.output, instance, multi);
    try {
      const result = renderInstancePlot(instance, subset, {
        logLog: args.logLog,
        annotateSlope: args.annotateSlope,
      });
      if (result.droppedRows > 0) {
        console.error(
          `warning: instance ${instance}: dropped ${result.droppedRows} ` +
            "non-positive mean_risk row(s) under log scale",
        );
      }
      fs.writeFileSync(target, result.svg);
      console.log(target);
    } catch (err) {
      console.error(`error: instance ${instance}: ${(err as Error).message}`);
      return 1;
    }
  }
  return 0;
}

if (require.main === module) {
  process.exit(runCli(process.argv.slice(2)));
}
