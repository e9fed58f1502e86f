#!/usr/bin/env node
/**
 * Usage:
 *   render slice  --in <dump.vtk> --out <png> [--axis x|y|z] [--index N]
 *                 [--vmin C] [--vmax C]
 *   render series --in <run.csv>  --out <png>
 *   render tvv    --in <sweep.csv> --out <png> [--entity name]
 *
 * Exit codes: 0 success, 1 usage/validation error, 2 runtime error.
 */

import { CsvSchemaError } from "./csv.js";
import { renderSlice } from "./slice.js";
import { renderTimeseries } from "./series.js";
import { renderTempVsVoltage } from "./tvv.js";
import { DumpFormatError } from "./vtk.js";

const USAGE = `usage: render slice|series|tvv --in <file> --out <png> [--axis z --index N] [--vmin C --vmax C] [--entity name]`;

interface Flags {
  [key: string]: string;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new UsageError(`bad argument: ${key}`);
    }
    flags[key.slice(2)] = argv[i + 1];
  }
  return flags;
}

class UsageError extends Error {}

function requireFlag(flags: Flags, name: string): string {
  const v = flags[name];
  if (v === undefined) throw new UsageError(`missing --${name}`);
  return v;
}

export function main(argv: string[]): number {
  try {
    if (argv[0] !== "render" || argv.length < 2) {
      throw new UsageError("expected: render slice|series|tvv ...");
    }
    const mode = argv[1];
    const flags = parseFlags(argv.slice(2));
    const input = requireFlag(flags, "in");
    const output = requireFlag(flags, "out");
    if (mode === "slice") {
      const axis = (flags["axis"] ?? "z") as "x" | "y" | "z";
      if (!["x", "y", "z"].includes(axis)) {
        throw new UsageError(`bad --axis ${axis}`);
      }
      const index = Number(flags["index"] ?? "0");
      if (!Number.isInteger(index)) throw new UsageError("--index must be an integer");
      renderSlice(input, {
        axis,
        index,
        vmin: flags["vmin"] !== undefined ? Number(flags["vmin"]) : undefined,
        vmax: flags["vmax"] !== undefined ? Number(flags["vmax"]) : undefined,
      }, output);
    } else if (mode === "series") {
      renderTimeseries(input, output);
    } else if (mode === "tvv") {
      renderTempVsVoltage(input, output, flags["entity"] ?? "pem");
    } else {
      throw new UsageError(`unknown mode ${mode}`);
    }
    console.log(output);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(USAGE);
      console.error(`error: ${err.message}`);
      return 1;
    }
    if (err instanceof DumpFormatError || err instanceof CsvSchemaError
      || err instanceof RangeError) {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    console.error(`runtime error: ${(err as Error).message}`);
    return 2;
  }
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
