import { mulberry32, type Rng } from "../rng.js";
import type { Classifier } from "./types.js";

interface LeafNode {
  kind: "leaf";
  distribution: number[];
}

interface SplitNode {
  kind: "split";
  feature: number;
  threshold: number; // go left when value <= threshold
  left: TreeNode;
  right: TreeNode;
}

type TreeNode = LeafNode | SplitNode;

export interface TreeOptions {
  maxDepth?: number;
  minSamplesSplit?: number;
  /** Features considered per split; all when undefined (plain CART). */
  featuresPerSplit?: number;
  seed?: number;
}

function gini(counts: number[], total: number): number {
  if (total === 0) return 0;
  let sumSq = 0;
  for (const c of counts) sumSq += c * c;
  return 1 - sumSq / (total * total);
}

/**
 * CART with Gini impurity. Split thresholds are midpoints between
 * consecutive distinct feature values; the best (feature, threshold) pair
 * wins with first-seen tie-breaking, so a fixed seed fixes the tree.
 */
export class DecisionTree implements Classifier {
  readonly name = "decision_tree";

  private root: TreeNode | null = null;
  private numClasses = 0;
  private readonly maxDepth: number;
  private readonly minSamplesSplit: number;
  private readonly featuresPerSplit?: number;
  private readonly rng: Rng;

  constructor(options: TreeOptions = {}) {
    this.maxDepth = options.maxDepth ?? Number.POSITIVE_INFINITY;
    this.minSamplesSplit = options.minSamplesSplit ?? 2;
    this.featuresPerSplit = options.featuresPerSplit;
    this.rng = mulberry32(options.seed ?? 1);
  }

  fit(x: number[][], y: number[], numClasses: number): void {
    this.numClasses = numClasses;
    const indices = Array.from({ length: x.length }, (_, i) => i);
    this.root = this.build(x, y, indices, 0);
  }

  private leaf(y: number[], indices: number[]): LeafNode {
    const counts = new Array(this.numClasses).fill(0);
    for (const i of indices) counts[y[i]]++;
    return { kind: "leaf", distribution: counts.map((c) => c / indices.length) };
  }

  private candidateFeatures(d: number): number[] {
    if (this.featuresPerSplit === undefined || this.featuresPerSplit >= d) {
      return Array.from({ length: d }, (_, j) => j);
    }
    // sample without replacement
    const pool = Array.from({ length: d }, (_, j) => j);
    const chosen: number[] = [];
    for (let i = 0; i < this.featuresPerSplit; i++) {
      const at = i + Math.floor(this.rng() * (d - i));
      [pool[i], pool[at]] = [pool[at], pool[i]];
      chosen.push(pool[i]);
    }
    return chosen.sort((a, b) => a - b);
  }

  private build(x: number[][], y: number[], indices: number[], depth: number): TreeNode {
    const total = indices.length;
    const counts = new Array(this.numClasses).fill(0);
    for (const i of indices) counts[y[i]]++;
    const impurity = gini(counts, total);
    if (
      impurity === 0 ||
      total < this.minSamplesSplit ||
      depth >= this.maxDepth
    ) {
      return { kind: "leaf", distribution: counts.map((c) => c / total) };
    }

    let bestGain = 0;
    let bestFeature = -1;
    let bestThreshold = 0;
    const leftCounts = new Array(this.numClasses).fill(0);

    for (const feature of this.candidateFeatures(x[0].length)) {
      const order = indices
        .slice()
        .sort((a, b) => x[a][feature] - x[b][feature] || a - b);
      leftCounts.fill(0);
      let leftTotal = 0;
      for (let pos = 0; pos < total - 1; pos++) {
        const i = order[pos];
        leftCounts[y[i]]++;
        leftTotal++;
        const here = x[i][feature];
        const next = x[order[pos + 1]][feature];
        if (here === next) continue;
        const rightTotal = total - leftTotal;
        let rightSumSq = 0;
        let leftSumSq = 0;
        for (let c = 0; c < this.numClasses; c++) {
          leftSumSq += leftCounts[c] * leftCounts[c];
          const rc = counts[c] - leftCounts[c];
          rightSumSq += rc * rc;
        }
        const giniLeft = 1 - leftSumSq / (leftTotal * leftTotal);
        const giniRight = 1 - rightSumSq / (rightTotal * rightTotal);
        const weighted = (leftTotal * giniLeft + rightTotal * giniRight) / total;
        const gain = impurity - weighted;
        if (gain > bestGain + 1e-15) {
          bestGain = gain;
          bestFeature = feature;
          bestThreshold = here + (next - here) / 2;
        }
      }
    }

    if (bestFeature < 0) {
      return { kind: "leaf", distribution: counts.map((c) => c / total) };
    }
    const left: number[] = [];
    const right: number[] = [];
    for (const i of indices) {
      (x[i][bestFeature] <= bestThreshold ? left : right).push(i);
    }
    if (left.length === 0 || right.length === 0) {
      return { kind: "leaf", distribution: counts.map((c) => c / total) };
    }
    return {
      kind: "split",
      feature: bestFeature,
      threshold: bestThreshold,
      left: this.build(x, y, left, depth + 1),
      right: this.build(x, y, right, depth + 1),
    };
  }

  predictProba(x: number[][]): number[][] {
    if (!this.root) throw new Error("model not fitted");
    return x.map((row) => {
      let node = this.root as TreeNode;
      while (node.kind === "split") {
        node = row[node.feature] <= node.threshold ? node.left : node.right;
      }
      return node.distribution.slice();
    });
  }
}
