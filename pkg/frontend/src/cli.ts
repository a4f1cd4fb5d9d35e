#!/usr/bin/env node
/**
 * figkit: render lab CSVs into deterministic SVG figures.
 *
 *   figkit render fig1    --in scan.csv --out fig1.svg [--slices 0,0.05,0.1,0.2]
 *   figkit render scaling --in mc.csv   --out scaling.svg
 *
 * fig1 writes two files: the surface at --out and the slice figure at the
 * same path with a `.slices` suffix before the extension.
 *
 * Exit codes: 0 success, 2 usage/data error.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { CsvError } from "./csv.js";
import { DEFAULT_SLICE_PHI2, renderFig1 } from "./fig1.js";
import { renderScaling } from "./scaling.js";

interface Args {
  figure: string;
  input: string;
  output: string;
  slices: number[];
}

function usageError(message: string): never {
  throw new CsvError(message);
}

function parseArgs(argv: string[]): Args {
  if (argv[0] !== "render") {
    usageError("usage: figkit render <fig1|scaling> --in <csv> --out <svg>");
  }
  const figure = argv[1];
  if (figure !== "fig1" && figure !== "scaling") {
    usageError(`unknown figure '${figure}': expected fig1 or scaling`);
  }
  let input = "";
  let output = "";
  let slices = DEFAULT_SLICE_PHI2;
  for (let k = 2; k < argv.length; k += 2) {
    const key = argv[k];
    const value = argv[k + 1];
    if (value === undefined) usageError(`missing value for ${key}`);
    if (key === "--in") input = value;
    else if (key === "--out") output = value;
    else if (key === "--slices") {
      slices = value.split(",").map((s) => {
        const v = Number(s);
        if (Number.isNaN(v)) usageError(`bad slice value '${s}'`);
        return v;
      });
    } else usageError(`unknown option ${key}`);
  }
  if (!input || !output) usageError("both --in and --out are required");
  return { figure, input, output, slices };
}

function slicesPath(out: string): string {
  const dot = out.lastIndexOf(".");
  return dot < 0 ? `${out}.slices` : `${out.slice(0, dot)}.slices${out.slice(dot)}`;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    const text = readFileSync(args.input, "utf-8");
    if (args.figure === "fig1") {
      const result = renderFig1(text, args.slices);
      writeFileSync(args.output, result.surfaceSvg);
      const extra = slicesPath(args.output);
      writeFileSync(extra, result.slicesSvg);
      console.log(`${args.output}\n${extra}\n${result.peakLabel}`);
    } else {
      const result = renderScaling(text);
      writeFileSync(args.output, result.svg);
      for (const w of result.warnings) console.error(`warning: ${w}`);
      const slope = result.slopePhi1;
      console.log(
        `${args.output}\nfit slope (phi1) = ${slope === null ? "n/a" : slope.toFixed(4)}`,
      );
    }
    return 0;
  } catch (err) {
    if (err instanceof CsvError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

import { pathToFileURL } from "node:url";

if (
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exit(main(process.argv.slice(2)));
}
