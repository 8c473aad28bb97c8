import {
  applyStandardizer,
  fitStandardizer,
  type Standardizer,
} from "../linalg.js";
import type { Classifier } from "./types.js";

/**
 * k-nearest-neighbour voting on standardized features (Euclidean).
 * Probabilities are neighbour vote shares; distance ties break by
 * training index so predictions are deterministic.
 */
export class KNearestNeighbors implements Classifier {
  readonly name = "k_nearest_neighbors";

  constructor(private readonly k = 5) {}

  private standardizer: Standardizer | null = null;
  private train: number[][] = [];
  private labels: number[] = [];
  private numClasses = 0;

  fit(x: number[][], y: number[], numClasses: number): void {
    this.standardizer = fitStandardizer(x);
    this.train = applyStandardizer(this.standardizer, x);
    this.labels = y.slice();
    this.numClasses = numClasses;
  }

  predictProba(x: number[][]): number[][] {
    if (!this.standardizer) throw new Error("model not fitted");
    const xs = applyStandardizer(this.standardizer, x);
    const k = Math.min(this.k, this.train.length);
    return xs.map((row) => {
      // fixed-size selection of the k smallest (distance, index) pairs;
      // iteration in index order means equal distances keep the earlier
      // training point.
      const bestDist = new Array<number>(k).fill(Infinity);
      const bestIdx = new Array<number>(k).fill(-1);
      for (let i = 0; i < this.train.length; i++) {
        const t = this.train[i];
        let dist = 0;
        let pruned = false;
        for (let j = 0; j < row.length; j++) {
          const diff = row[j] - t[j];
          dist += diff * diff;
          if (dist >= bestDist[k - 1]) {
            // partial sums only grow: this candidate cannot qualify
            pruned = true;
            break;
          }
        }
        if (pruned) continue;
        let pos = k - 1;
        while (pos > 0 && dist < bestDist[pos - 1]) {
          bestDist[pos] = bestDist[pos - 1];
          bestIdx[pos] = bestIdx[pos - 1];
          pos--;
        }
        bestDist[pos] = dist;
        bestIdx[pos] = i;
      }
      const votes = new Array(this.numClasses).fill(0);
      let used = 0;
      for (const idx of bestIdx) {
        if (idx >= 0) {
          votes[this.labels[idx]]++;
          used++;
        }
      }
      return votes.map((v) => v / used);
    });
  }
}
