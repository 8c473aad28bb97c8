import { cholesky, choleskySolve, dot, softmax } from "../linalg.js";
import type { Classifier } from "./types.js";

/**
 * Linear discriminant analysis with a pooled within-class covariance.
 * delta_c(x) = x . a_c - 0.5 mu_c . a_c + log pi_c, with a_c the solution
 * of Sigma a_c = mu_c; probabilities are the softmax of the deltas.
 * A small ridge keeps the covariance factorizable on degenerate features.
 */
export class LinearDiscriminant implements Classifier {
  readonly name = "linear_discriminant";

  private coefs: number[][] = [];
  private intercepts: number[] = [];

  fit(x: number[][], y: number[], numClasses: number): void {
    const n = x.length;
    const d = x[0].length;

    const counts = new Array(numClasses).fill(0);
    const means: number[][] = Array.from({ length: numClasses }, () =>
      new Array(d).fill(0),
    );
    for (let i = 0; i < n; i++) {
      counts[y[i]]++;
      const mean = means[y[i]];
      for (let j = 0; j < d; j++) mean[j] += x[i][j];
    }
    for (let c = 0; c < numClasses; c++) {
      if (counts[c] > 0) for (let j = 0; j < d; j++) means[c][j] /= counts[c];
    }

    const cov: number[][] = Array.from({ length: d }, () => new Array(d).fill(0));
    for (let i = 0; i < n; i++) {
      const mean = means[y[i]];
      const centered = new Array(d);
      for (let j = 0; j < d; j++) centered[j] = x[i][j] - mean[j];
      for (let a = 0; a < d; a++) {
        const va = centered[a];
        if (va === 0) continue;
        const rowA = cov[a];
        for (let b = a; b < d; b++) rowA[b] += va * centered[b];
      }
    }
    const denom = Math.max(1, n - numClasses);
    let trace = 0;
    for (let a = 0; a < d; a++) {
      for (let b = a; b < d; b++) {
        const v = cov[a][b] / denom;
        cov[a][b] = v;
        cov[b][a] = v;
      }
      trace += cov[a][a];
    }
    const ridge = Math.max(1e-8, 1e-6 * (trace / d || 1));
    for (let a = 0; a < d; a++) cov[a][a] += ridge;

    const factor = cholesky(cov);
    this.coefs = [];
    this.intercepts = [];
    for (let c = 0; c < numClasses; c++) {
      const coef = choleskySolve(factor, means[c]);
      this.coefs.push(coef);
      const prior = counts[c] > 0 ? Math.log(counts[c] / n) : -1e9;
      this.intercepts.push(prior - 0.5 * dot(means[c], coef));
    }
  }

  predictProba(x: number[][]): number[][] {
    return x.map((row) => {
      const logits = this.coefs.map((coef, c) => dot(row, coef) + this.intercepts[c]);
      return softmax(logits);
    });
  }
}
