import { softmax } from "../linalg.js";
import type { Classifier } from "./types.js";

const LOG_2PI = Math.log(2 * Math.PI);

/**
 * Gaussian naive Bayes: per-class per-feature normal likelihoods with
 * shared variance smoothing (1e-9 of the largest feature variance).
 */
export class GaussianNaiveBayes implements Classifier {
  readonly name = "gaussian_naive_bayes";

  private means: number[][] = [];
  private variances: number[][] = [];
  private logPriors: number[] = [];

  fit(x: number[][], y: number[], numClasses: number): void {
    const n = x.length;
    const d = x[0].length;

    const globalMean = new Array(d).fill(0);
    for (const row of x) for (let j = 0; j < d; j++) globalMean[j] += row[j] / n;
    let maxVar = 0;
    for (let j = 0; j < d; j++) {
      let v = 0;
      for (const row of x) v += (row[j] - globalMean[j]) ** 2;
      maxVar = Math.max(maxVar, v / n);
    }
    const smoothing = 1e-9 * (maxVar > 0 ? maxVar : 1);

    this.means = [];
    this.variances = [];
    this.logPriors = [];
    for (let c = 0; c < numClasses; c++) {
      const rows = [];
      for (let i = 0; i < n; i++) if (y[i] === c) rows.push(x[i]);
      const count = rows.length;
      const mean = new Array(d).fill(0);
      const variance = new Array(d).fill(0);
      if (count > 0) {
        for (const row of rows) for (let j = 0; j < d; j++) mean[j] += row[j] / count;
        for (const row of rows) {
          for (let j = 0; j < d; j++) variance[j] += (row[j] - mean[j]) ** 2 / count;
        }
      }
      for (let j = 0; j < d; j++) variance[j] += smoothing;
      this.means.push(mean);
      this.variances.push(variance);
      this.logPriors.push(count > 0 ? Math.log(count / n) : -1e9);
    }
  }

  predictProba(x: number[][]): number[][] {
    return x.map((row) => {
      const logits = this.logPriors.map((prior, c) => {
        let ll = prior;
        const mean = this.means[c];
        const variance = this.variances[c];
        for (let j = 0; j < row.length; j++) {
          const diff = row[j] - mean[j];
          ll -= 0.5 * (LOG_2PI + Math.log(variance[j]) + (diff * diff) / variance[j]);
        }
        return ll;
      });
      return softmax(logits);
    });
  }
}
