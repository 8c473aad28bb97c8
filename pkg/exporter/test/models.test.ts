import { describe, expect, it } from "vitest";

import { RandomForest } from "../src/models/forest.js";
import { KNearestNeighbors } from "../src/models/knn.js";
import { LinearDiscriminant } from "../src/models/lda.js";
import { LogisticRegression } from "../src/models/logistic.js";
import { GaussianNaiveBayes } from "../src/models/naivebayes.js";
import { DecisionTree } from "../src/models/tree.js";
import { argmaxRow, type Classifier } from "../src/models/types.js";
import { makeBlobData } from "./util.js";

const TRAIN = makeBlobData(
  [
    { label: 0, count: 80, center: [0, 0, 0, 0] },
    { label: 1, count: 80, center: [6, 6, 0, 0] },
    { label: 2, count: 80, center: [0, 6, 6, 0] },
  ],
  11,
);
const TEST = makeBlobData(
  [
    { label: 0, count: 30, center: [0, 0, 0, 0] },
    { label: 1, count: 30, center: [6, 6, 0, 0] },
    { label: 2, count: 30, center: [0, 6, 6, 0] },
  ],
  12,
);

function accuracy(model: Classifier): number {
  model.fit(TRAIN.features, TRAIN.labels, 3);
  const probs = model.predictProba(TEST.features);
  let hits = 0;
  probs.forEach((row, i) => {
    expect(row).toHaveLength(3);
    const sum = row.reduce((a, b) => a + b, 0);
    expect(Math.abs(sum - 1)).toBeLessThan(1e-9);
    for (const p of row) {
      expect(p).toBeGreaterThanOrEqual(0);
      expect(p).toBeLessThanOrEqual(1);
    }
    if (argmaxRow(row) === TEST.labels[i]) hits++;
  });
  return hits / TEST.labels.length;
}

const FAMILIES: [string, () => Classifier][] = [
  ["linear discriminant", () => new LinearDiscriminant()],
  ["gaussian naive bayes", () => new GaussianNaiveBayes()],
  ["logistic regression", () => new LogisticRegression()],
  ["k nearest neighbors", () => new KNearestNeighbors(5)],
  ["decision tree", () => new DecisionTree()],
  ["random forest", () => new RandomForest(15, 3)],
];

describe("model families", () => {
  for (const [name, build] of FAMILIES) {
    it(`${name}: valid probabilities and sane accuracy on separable blobs`, () => {
      expect(accuracy(build())).toBeGreaterThan(0.85);
    });

    it(`${name}: deterministic across refits`, () => {
      const a = build();
      const b = build();
      a.fit(TRAIN.features, TRAIN.labels, 3);
      b.fit(TRAIN.features, TRAIN.labels, 3);
      expect(a.predictProba(TEST.features)).toEqual(b.predictProba(TEST.features));
    });
  }

  it("decision tree fits a non-axis-aligned rule the blobs need", () => {
    const tree = new DecisionTree();
    tree.fit(TRAIN.features, TRAIN.labels, 3);
    const onTrain = tree.predictProba(TRAIN.features);
    let hits = 0;
    onTrain.forEach((row, i) => {
      if (argmaxRow(row) === TRAIN.labels[i]) hits++;
    });
    // unpruned CART memorizes its training set
    expect(hits).toBe(TRAIN.labels.length);
  });

  it("knn handles a degenerate constant feature", () => {
    const x = [
      [1, 0],
      [1, 0.1],
      [1, 5],
      [1, 5.1],
    ];
    const y = [0, 0, 1, 1];
    const knn = new KNearestNeighbors(1);
    knn.fit(x, y, 2);
    expect(knn.predictProba([[1, 0.05]])[0][0]).toBe(1);
    expect(knn.predictProba([[1, 5.05]])[0][1]).toBe(1);
  });

  it("naive bayes survives zero-variance features", () => {
    const x = [
      [2, 1],
      [2, 1.2],
      [2, 8],
      [2, 8.4],
    ];
    const y = [0, 0, 1, 1];
    const nb = new GaussianNaiveBayes();
    nb.fit(x, y, 2);
    const probs = nb.predictProba([[2, 1.1]]);
    expect(probs[0][0]).toBeGreaterThan(0.9);
  });
});
