#!/usr/bin/env node
/**
 * Train the six baseline classifiers on a labeled flow CSV and export
 * probability scores + recall weights for the fusion toolchain.
 *
 *   node dist/cli.js --input flows.csv --out exports/ [--seed 42]
 *       [--test-fraction 0.25] [--systems A,B,F] [--forest-trees 25]
 *       [--max-tree-depth N]
 */

import { trainAndExport, type ExportOptions } from "./export.js";

function usage(message?: string): never {
  if (message) console.error(`error: ${message}`);
  console.error(
    "usage: cli --input <flows.csv> --out <dir> [--seed N] [--test-fraction F]" +
      " [--systems A,B,...] [--forest-trees N] [--max-tree-depth N]",
  );
  process.exit(2);
}

function parseArgs(argv: string[]): ExportOptions {
  const options: Partial<ExportOptions> = {};
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      const value = argv[++i];
      if (value === undefined) usage(`${flag} needs a value`);
      return value;
    };
    switch (flag) {
      case "--input":
        options.input = next();
        break;
      case "--out":
        options.outDir = next();
        break;
      case "--seed":
        options.seed = Number.parseInt(next(), 10);
        break;
      case "--test-fraction":
        options.testFraction = Number.parseFloat(next());
        break;
      case "--systems":
        options.systems = next().split(",").map((s) => s.trim()).filter(Boolean);
        break;
      case "--forest-trees":
        options.forestTrees = Number.parseInt(next(), 10);
        break;
      case "--max-tree-depth":
        options.maxTreeDepth = Number.parseInt(next(), 10);
        break;
      case "--help":
      case "-h":
        usage();
        break;
      default:
        usage(`unknown flag ${flag}`);
    }
  }
  if (!options.input) usage("--input is required");
  if (!options.outDir) usage("--out is required");
  return options as ExportOptions;
}

function main(): number {
  const options = parseArgs(process.argv.slice(2));
  try {
    const manifest = trainAndExport(options);
    console.log(
      JSON.stringify(
        {
          ok: true,
          train: manifest.totals.train,
          test: manifest.totals.test,
          scores: manifest.outputs.scores,
          weights: manifest.outputs.weights,
          warnings: manifest.warnings,
        },
        null,
        2,
      ),
    );
    return 0;
  } catch (err) {
    console.error(JSON.stringify({ ok: false, error: String(err) }));
    return 1;
  }
}

process.exit(main());
