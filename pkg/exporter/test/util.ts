import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { mulberry32, type Rng } from "../src/rng.js";

/** Gaussian sample via Box-Muller. */
export function gaussian(rng: Rng): number {
  const u = Math.max(rng(), 1e-12);
  const v = rng();
  return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
}

export interface BlobSpec {
  label: number | string;
  count: number;
  center: number[];
  spread?: number;
}

/**
 * Synthetic "flow" table: one Gaussian blob per class, far enough apart
 * that every model family can separate them reasonably well.
 */
export function makeBlobData(specs: BlobSpec[], seed = 9): {
  features: number[][];
  labels: number[];
  rows: string[][];
  header: string[];
} {
  const rng = mulberry32(seed);
  const dims = specs[0].center.length;
  const header = [
    "flow_id",
    ...Array.from({ length: dims }, (_, j) => `f${j}`),
    "label",
  ];
  const features: number[][] = [];
  const labels: number[] = [];
  const rows: string[][] = [];
  let idx = 0;
  for (const spec of specs) {
    for (let i = 0; i < spec.count; i++) {
      const vec = spec.center.map(
        (c) => c + (spec.spread ?? 1) * gaussian(rng),
      );
      features.push(vec);
      labels.push(typeof spec.label === "number" ? spec.label : NaN);
      rows.push([
        `flow-${idx++}`,
        ...vec.map((v) => v.toFixed(6)),
        String(spec.label),
      ]);
    }
  }
  return { features, labels, rows, header };
}

export function writeCsv(header: string[], rows: string[][], name = "flows.csv"): string {
  const dir = mkdtempSync(join(tmpdir(), "exporter-test-"));
  const path = join(dir, name);
  const text = [header.join(","), ...rows.map((r) => r.join(","))].join("\n") + "\n";
  writeFileSync(path, text, "utf-8");
  return path;
}

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "exporter-out-"));
}
