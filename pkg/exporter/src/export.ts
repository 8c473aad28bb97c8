import { mkdirSync, readFileSync, renameSync, writeFileSync } from "node:fs";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

import { toCsv } from "./csv.js";
import { loadDataset, type Dataset } from "./dataset.js";
import { stratifiedSplit, type SplitResult } from "./split.js";
import { childSeed } from "./rng.js";
import { RandomForest } from "./models/forest.js";
import { KNearestNeighbors } from "./models/knn.js";
import { LinearDiscriminant } from "./models/lda.js";
import { LogisticRegression } from "./models/logistic.js";
import { GaussianNaiveBayes } from "./models/naivebayes.js";
import { DecisionTree } from "./models/tree.js";
import { argmaxRow, type Classifier } from "./models/types.js";

/**
 * Trains the six baseline scoring systems on the train partition and
 * exports, for the test partition:
 *
 *   scores.csv   item_id,label,A:<code>,...,F:<code>  (class probabilities)
 *   weights.csv  system,class_code,recall             (per-model recalls)
 *   manifest.json  split counts, feature columns, timings, version pins
 *
 * The CSV formats are exactly what the fusion toolchain ingests.
 */

export interface ExportOptions {
  input: string;
  outDir: string;
  seed?: number;
  testFraction?: number;
  /** Restrict to a subset of system names (A..F); all six by default. */
  systems?: string[];
  /** Smaller forests / capped trees for quick runs. */
  forestTrees?: number;
  maxTreeDepth?: number;
}

export interface ModelRun {
  system: string;
  model: string;
  trainMs: number;
  predictMs: number;
}

export interface Manifest {
  dataset: string;
  seed: number;
  testFraction: number;
  totals: { train: number; test: number };
  perClass: { code: number; name: string; train: number; test: number }[];
  warnings: string[];
  featureColumns: string[];
  droppedColumns: string[];
  imputedCells: number;
  idSource: string;
  models: ModelRun[];
  outputs: { scores: string; weights: string };
  versions: Record<string, string>;
}

type ModelFactory = (seed: number, opts: ExportOptions) => Classifier;

export const SYSTEM_MODELS: ReadonlyMap<string, ModelFactory> = new Map<string, ModelFactory>([
  ["A", () => new LinearDiscriminant()],
  ["B", () => new GaussianNaiveBayes()],
  ["C", () => new LogisticRegression()],
  ["D", () => new KNearestNeighbors(5)],
  ["E", (_seed, opts) => new DecisionTree({ maxDepth: opts.maxTreeDepth })],
  [
    "F",
    (seed, opts) =>
      new RandomForest(opts.forestTrees ?? 25, childSeed(seed, "forest"), opts.maxTreeDepth),
  ],
]);

const ROW_SUM_TOLERANCE = 1e-6;

function numberCell(value: number): string {
  // Number#toString is shortest-round-trip, so values survive re-parsing.
  return String(value);
}

function atomicWrite(path: string, text: string): void {
  const tmp = join(dirname(path), `.${Date.now()}-${Math.random().toString(36).slice(2)}.tmp`);
  writeFileSync(tmp, text, "utf-8");
  renameSync(tmp, path);
}

function gather<T>(source: T[], indices: number[]): T[] {
  return indices.map((i) => source[i]);
}

function recallByClass(
  predictions: number[],
  labels: number[],
  numClasses: number,
): number[] {
  const hits = new Array(numClasses).fill(0);
  const support = new Array(numClasses).fill(0);
  for (let i = 0; i < labels.length; i++) {
    support[labels[i]]++;
    if (predictions[i] === labels[i]) hits[labels[i]]++;
  }
  return hits.map((h, c) => (support[c] > 0 ? h / support[c] : 0));
}

function packageVersions(): Record<string, string> {
  const versions: Record<string, string> = { node: process.version };
  try {
    const here = dirname(fileURLToPath(import.meta.url));
    const pkg = JSON.parse(
      readFileSync(resolve(here, "..", "..", "package.json"), "utf-8"),
    );
    versions["flow-model-exporter"] = pkg.version ?? "unknown";
    for (const [name, pin] of Object.entries(pkg.devDependencies ?? {})) {
      versions[name] = String(pin);
    }
  } catch {
    // running from a bundled context; node version alone still pins the run
  }
  return versions;
}

export function splitDataset(
  dataset: Dataset,
  seed: number,
  testFraction = 0.25,
): SplitResult {
  return stratifiedSplit(dataset.labels, seed, testFraction);
}

export function trainAndExport(options: ExportOptions): Manifest {
  const seed = options.seed ?? 42;
  const testFraction = options.testFraction ?? 0.25;
  const systems = options.systems ?? [...SYSTEM_MODELS.keys()];
  for (const system of systems) {
    if (!SYSTEM_MODELS.has(system)) {
      throw new Error(`unknown system ${JSON.stringify(system)}; expected one of A..F`);
    }
  }

  const dataset = loadDataset(options.input);
  const split = splitDataset(dataset, seed, testFraction);
  const trainX = gather(dataset.features, split.trainIdx);
  const trainLabels = gather(dataset.labels, split.trainIdx);
  const testX = gather(dataset.features, split.testIdx);
  const testLabels = gather(dataset.labels, split.testIdx);
  const testIds = gather(dataset.ids, split.testIdx);

  // class codes -> contiguous indices for the models
  const codes = dataset.classCodes;
  const indexOf = new Map(codes.map((code, i) => [code, i]));
  const trainY = trainLabels.map((code) => indexOf.get(code)!);
  const testY = testLabels.map((code) => indexOf.get(code)!);

  const runs: ModelRun[] = [];
  const probsBySystem = new Map<string, number[][]>();
  const recallsBySystem = new Map<string, number[]>();
  for (const system of systems) {
    const factory = SYSTEM_MODELS.get(system)!;
    const model = factory(childSeed(seed, `system-${system}`), options);
    const t0 = performance.now();
    try {
      model.fit(trainX, trainY, codes.length);
    } catch (err) {
      throw new Error(`training failed for system ${system} (${model.name}): ${String(err)}`);
    }
    const t1 = performance.now();
    const probs = model.predictProba(testX);
    const t2 = performance.now();

    probs.forEach((row, i) => {
      let sum = 0;
      for (const v of row) sum += v;
      if (Math.abs(sum - 1) > ROW_SUM_TOLERANCE) {
        throw new Error(
          `system ${system} produced a probability row summing to ${sum} (item ${testIds[i]})`,
        );
      }
    });
    const predictions = probs.map(argmaxRow);
    recallsBySystem.set(system, recallByClass(predictions, testY, codes.length));
    probsBySystem.set(system, probs);
    runs.push({
      system,
      model: model.name,
      trainMs: Math.round(t1 - t0),
      predictMs: Math.round(t2 - t1),
    });
  }

  mkdirSync(options.outDir, { recursive: true });
  const scoresPath = join(options.outDir, "scores.csv");
  const weightsPath = join(options.outDir, "weights.csv");

  const header: (string | number)[] = ["item_id", "label"];
  for (const system of systems) {
    for (const code of codes) header.push(`${system}:${code}`);
  }
  const scoreRows: (string | number)[][] = [header];
  for (let i = 0; i < testIds.length; i++) {
    const row: (string | number)[] = [testIds[i], testLabels[i]];
    for (const system of systems) {
      const probs = probsBySystem.get(system)!;
      for (const p of probs[i]) row.push(numberCell(p));
    }
    scoreRows.push(row);
  }
  atomicWrite(scoresPath, toCsv(scoreRows));

  const weightRows: (string | number)[][] = [["system", "class_code", "recall"]];
  for (const system of systems) {
    const recalls = recallsBySystem.get(system)!;
    codes.forEach((code, c) => {
      weightRows.push([system, code, numberCell(recalls[c])]);
    });
  }
  atomicWrite(weightsPath, toCsv(weightRows));

  const manifest: Manifest = {
    dataset: resolve(options.input),
    seed,
    testFraction,
    totals: { train: split.trainIdx.length, test: split.testIdx.length },
    perClass: split.perClass.map((entry) => ({
      code: entry.code,
      name: dataset.labelNames.get(entry.code) ?? `class ${entry.code}`,
      train: entry.train,
      test: entry.test,
    })),
    warnings: split.warnings,
    featureColumns: dataset.featureNames,
    droppedColumns: dataset.droppedColumns,
    imputedCells: dataset.imputedCells,
    idSource: dataset.idColumn ?? "generated",
    models: runs,
    outputs: { scores: scoresPath, weights: weightsPath },
    versions: packageVersions(),
  };
  atomicWrite(join(options.outDir, "manifest.json"), JSON.stringify(manifest, null, 2) + "\n");
  return manifest;
}
