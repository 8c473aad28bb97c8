/**
 * Common classifier contract. Labels are contiguous class indices
 * 0..numClasses-1 (the exporter maps dataset class codes to indices).
 * predictProba rows sum to 1.
 */

export interface Classifier {
  readonly name: string;
  fit(x: number[][], y: number[], numClasses: number): void;
  predictProba(x: number[][]): number[][];
}

export function argmaxRow(row: number[]): number {
  let best = 0;
  for (let i = 1; i < row.length; i++) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

/** Class frequencies as a probability vector. */
export function classDistribution(y: number[], numClasses: number): number[] {
  const counts = new Array(numClasses).fill(0);
  for (const label of y) counts[label]++;
  return counts.map((c) => c / y.length);
}
