import { childSeed, mulberry32, shuffle } from "./rng.js";

/**
 * Stratified train/test split. Per class, the test set takes
 * floor(testFraction * n) rows (so a 9-row class splits 7/2 and a
 * 12-row class splits 9/3 at the default 25%); membership is a seeded
 * shuffle, reproducible run to run.
 */

export interface ClassSplit {
  code: number;
  total: number;
  train: number;
  test: number;
}

export interface SplitResult {
  trainIdx: number[];
  testIdx: number[];
  perClass: ClassSplit[];
  warnings: string[];
  seed: number;
  testFraction: number;
}

export function stratifiedSplit(
  labels: number[],
  seed: number,
  testFraction = 0.25,
): SplitResult {
  if (labels.length === 0) throw new Error("cannot split an empty dataset");
  if (!(testFraction > 0 && testFraction < 1)) {
    throw new Error(`test fraction ${testFraction} must lie in (0, 1)`);
  }
  const byClass = new Map<number, number[]>();
  labels.forEach((code, i) => {
    const bucket = byClass.get(code);
    if (bucket) bucket.push(i);
    else byClass.set(code, [i]);
  });

  const trainIdx: number[] = [];
  const testIdx: number[] = [];
  const perClass: ClassSplit[] = [];
  const warnings: string[] = [];
  for (const code of [...byClass.keys()].sort((a, b) => a - b)) {
    const members = byClass.get(code)!;
    const rng = mulberry32(childSeed(seed, `class-${code}`));
    shuffle(members, rng);
    let testCount = Math.floor(testFraction * members.length);
    if (members.length < 2) {
      testCount = 0;
      warnings.push(
        `class ${code} has ${members.length} row(s); cannot stratify, kept train-only`,
      );
    }
    const trainCount = members.length - testCount;
    for (let i = 0; i < members.length; i++) {
      (i < trainCount ? trainIdx : testIdx).push(members[i]);
    }
    perClass.push({ code, total: members.length, train: trainCount, test: testCount });
  }
  trainIdx.sort((a, b) => a - b);
  testIdx.sort((a, b) => a - b);
  return { trainIdx, testIdx, perClass, warnings, seed, testFraction };
}
