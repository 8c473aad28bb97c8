/**
 * Small dense linear-algebra helpers (enough for LDA's pooled-covariance
 * discriminant). Matrices are row-major number[][].
 */

/** Cholesky factorization A = L L^T for symmetric positive-definite A. */
export function cholesky(a: number[][]): number[][] {
  const n = a.length;
  const l: number[][] = Array.from({ length: n }, () => new Array(n).fill(0));
  for (let i = 0; i < n; i++) {
    for (let j = 0; j <= i; j++) {
      let sum = a[i][j];
      for (let k = 0; k < j; k++) sum -= l[i][k] * l[j][k];
      if (i === j) {
        if (sum <= 0) {
          throw new Error(`matrix not positive definite at pivot ${i} (ridge too small)`);
        }
        l[i][j] = Math.sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  return l;
}

/** Solve A x = b given the Cholesky factor L of A. */
export function choleskySolve(l: number[][], b: number[]): number[] {
  const n = l.length;
  const y = new Array(n).fill(0);
  for (let i = 0; i < n; i++) {
    let sum = b[i];
    for (let k = 0; k < i; k++) sum -= l[i][k] * y[k];
    y[i] = sum / l[i][i];
  }
  const x = new Array(n).fill(0);
  for (let i = n - 1; i >= 0; i--) {
    let sum = y[i];
    for (let k = i + 1; k < n; k++) sum -= l[k][i] * x[k];
    x[i] = sum / l[i][i];
  }
  return x;
}

export function dot(a: number[], b: number[]): number {
  let s = 0;
  for (let i = 0; i < a.length; i++) s += a[i] * b[i];
  return s;
}

/** Numerically stable softmax. */
export function softmax(logits: number[]): number[] {
  let max = -Infinity;
  for (const v of logits) if (v > max) max = v;
  let total = 0;
  const out = logits.map((v) => {
    const e = Math.exp(v - max);
    total += e;
    return e;
  });
  return out.map((e) => e / total);
}

export interface Standardizer {
  mean: number[];
  scale: number[];
}

/** Per-feature mean/std (std 0 becomes 1 so constants map to 0). */
export function fitStandardizer(x: number[][]): Standardizer {
  const n = x.length;
  const d = x[0].length;
  const mean = new Array(d).fill(0);
  for (const row of x) for (let j = 0; j < d; j++) mean[j] += row[j];
  for (let j = 0; j < d; j++) mean[j] /= n;
  const variance = new Array(d).fill(0);
  for (const row of x) {
    for (let j = 0; j < d; j++) {
      const diff = row[j] - mean[j];
      variance[j] += diff * diff;
    }
  }
  const scale = variance.map((v) => {
    const std = Math.sqrt(v / n);
    return std > 0 ? std : 1;
  });
  return { mean, scale };
}

export function applyStandardizer(s: Standardizer, x: number[][]): number[][] {
  return x.map((row) => row.map((v, j) => (v - s.mean[j]) / s.scale[j]));
}
