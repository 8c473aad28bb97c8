import { childSeed, mulberry32 } from "../rng.js";
import { DecisionTree } from "./tree.js";
import type { Classifier } from "./types.js";

/**
 * Random forest: bootstrap-sampled CART trees with sqrt(d) features per
 * split, probabilities averaged across trees. Fully seed-pinned.
 */
export class RandomForest implements Classifier {
  readonly name = "random_forest";

  constructor(
    private readonly numTrees = 25,
    private readonly seed = 7,
    private readonly maxDepth?: number,
  ) {}

  private trees: DecisionTree[] = [];

  fit(x: number[][], y: number[], numClasses: number): void {
    const n = x.length;
    const d = x[0].length;
    const featuresPerSplit = Math.max(1, Math.round(Math.sqrt(d)));
    this.trees = [];
    for (let t = 0; t < this.numTrees; t++) {
      const rng = mulberry32(childSeed(this.seed, `tree-${t}`));
      const sampleX: number[][] = new Array(n);
      const sampleY: number[] = new Array(n);
      for (let i = 0; i < n; i++) {
        const pick = Math.floor(rng() * n);
        sampleX[i] = x[pick];
        sampleY[i] = y[pick];
      }
      const tree = new DecisionTree({
        featuresPerSplit,
        seed: childSeed(this.seed, `split-${t}`),
        maxDepth: this.maxDepth,
      });
      tree.fit(sampleX, sampleY, numClasses);
      this.trees.push(tree);
    }
  }

  predictProba(x: number[][]): number[][] {
    if (this.trees.length === 0) throw new Error("model not fitted");
    const out: number[][] = x.map(() => []);
    const perTree = this.trees.map((tree) => tree.predictProba(x));
    for (let i = 0; i < x.length; i++) {
      const numClasses = perTree[0][i].length;
      const mean = new Array(numClasses).fill(0);
      for (const predictions of perTree) {
        const p = predictions[i];
        for (let c = 0; c < numClasses; c++) mean[c] += p[c];
      }
      out[i] = mean.map((v) => v / this.trees.length);
    }
    return out;
  }
}
