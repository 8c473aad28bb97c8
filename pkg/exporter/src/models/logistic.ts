import {
  applyStandardizer,
  fitStandardizer,
  softmax,
  type Standardizer,
} from "../linalg.js";
import type { Classifier } from "./types.js";

/**
 * Multinomial logistic regression trained with full-batch gradient
 * descent on standardized features. Zero initialization and a fixed
 * iteration count keep training deterministic.
 */
export class LogisticRegression implements Classifier {
  readonly name = "logistic_regression";

  constructor(
    private readonly iterations = 300,
    private readonly learningRate = 0.5,
    private readonly l2 = 1e-4,
  ) {}

  private standardizer: Standardizer | null = null;
  private weights: number[][] = []; // [class][feature + bias]

  fit(x: number[][], y: number[], numClasses: number): void {
    this.standardizer = fitStandardizer(x);
    const xs = applyStandardizer(this.standardizer, x);
    const n = xs.length;
    const d = xs[0].length;
    const w: number[][] = Array.from({ length: numClasses }, () =>
      new Array(d + 1).fill(0),
    );

    for (let iter = 0; iter < this.iterations; iter++) {
      const grad: number[][] = Array.from({ length: numClasses }, () =>
        new Array(d + 1).fill(0),
      );
      for (let i = 0; i < n; i++) {
        const row = xs[i];
        const logits = w.map((wc) => {
          let v = wc[d]; // bias
          for (let j = 0; j < d; j++) v += wc[j] * row[j];
          return v;
        });
        const p = softmax(logits);
        for (let c = 0; c < numClasses; c++) {
          const err = p[c] - (y[i] === c ? 1 : 0);
          if (err === 0) continue;
          const gc = grad[c];
          for (let j = 0; j < d; j++) gc[j] += err * row[j];
          gc[d] += err;
        }
      }
      for (let c = 0; c < numClasses; c++) {
        const wc = w[c];
        const gc = grad[c];
        for (let j = 0; j <= d; j++) {
          const reg = j < d ? this.l2 * wc[j] : 0; // bias unregularized
          wc[j] -= this.learningRate * (gc[j] / n + reg);
        }
      }
    }
    this.weights = w;
  }

  predictProba(x: number[][]): number[][] {
    if (!this.standardizer) throw new Error("model not fitted");
    const xs = applyStandardizer(this.standardizer, x);
    const d = xs[0]?.length ?? 0;
    return xs.map((row) => {
      const logits = this.weights.map((wc) => {
        let v = wc[d];
        for (let j = 0; j < d; j++) v += wc[j] * row[j];
        return v;
      });
      return softmax(logits);
    });
  }
}
