import { readFileSync } from "node:fs";
import { parseCsv } from "./csv.js";

/**
 * Labeled flow table: whatever numeric feature columns the file carries,
 * plus a `label` column holding either integer class codes or traffic
 * names (mapped through the standard LYCOS-IDS encoding).
 */

export interface Dataset {
  ids: string[];
  idColumn: string | null;
  features: number[][];
  labels: number[];
  featureNames: string[];
  droppedColumns: string[];
  imputedCells: number;
  classCodes: number[];
  labelNames: Map<number, string>;
}

export const LABEL_ENCODING: ReadonlyMap<string, number> = new Map([
  ["benign", 0],
  ["bot", 1],
  ["ddos", 2],
  ["dosgoldeneye", 3],
  ["doshulk", 4],
  ["dosslowhttptest", 5],
  ["dosslowloris", 6],
  ["ftppatator", 7],
  ["heartbleed", 8],
  ["portscan", 9],
  ["sshpatator", 10],
  ["webattackbruteforce", 11],
  ["webattacksqlinjection", 12],
  ["webattackxss", 13],
]);

export const LABEL_NAMES: ReadonlyMap<number, string> = new Map([
  [0, "Benign"],
  [1, "Bot"],
  [2, "DDoS"],
  [3, "DoS Goldeneye"],
  [4, "DoS Hulk"],
  [5, "DoS Slowhttptest"],
  [6, "DoS Slowloris"],
  [7, "FTP Patator"],
  [8, "Heartbleed"],
  [9, "Portscan"],
  [10, "SSH Patator"],
  [11, "Webattack Bruteforce"],
  [12, "Webattack Sql Injection"],
  [13, "Webattack XSS"],
]);

const ID_COLUMNS = new Set(["id", "flow_id", "item_id"]);

function normalizeLabelText(raw: string): string {
  return raw.toLowerCase().replace(/[^a-z0-9]/g, "");
}

export function parseLabel(raw: string): number {
  const text = raw.trim();
  if (/^-?\d+$/.test(text)) return Number.parseInt(text, 10);
  const code = LABEL_ENCODING.get(normalizeLabelText(text));
  if (code === undefined) {
    throw new Error(`unknown traffic label ${JSON.stringify(raw)}`);
  }
  return code;
}

export function loadDataset(path: string): Dataset {
  const rows = parseCsv(readFileSync(path, "utf-8"));
  if (rows.length < 2) throw new Error(`${path}: no data rows`);
  const header = rows[0].map((h) => h.trim());
  const labelCol = header.findIndex((h) => h.toLowerCase() === "label");
  if (labelCol < 0) throw new Error(`${path}: missing label column`);
  const idCol = header.findIndex((h) => ID_COLUMNS.has(h.toLowerCase()));

  const candidateCols: number[] = [];
  for (let j = 0; j < header.length; j++) {
    if (j !== labelCol && j !== idCol) candidateCols.push(j);
  }

  // A column is a feature when every cell parses as a number
  // (non-finite values count as parseable and are imputed to 0).
  const numericOk = candidateCols.map(() => true);
  for (let r = 1; r < rows.length; r++) {
    const row = rows[r];
    for (let c = 0; c < candidateCols.length; c++) {
      if (!numericOk[c]) continue;
      const cell = row[candidateCols[c]];
      if (cell === undefined || cell.trim() === "") continue; // missing -> impute
      const value = Number(cell);
      if (Number.isNaN(value) && !/^(nan|[-+]?(inf|infinity))$/i.test(cell.trim())) {
        numericOk[c] = false;
      }
    }
  }
  const featureCols = candidateCols.filter((_, c) => numericOk[c]);
  const droppedColumns = candidateCols
    .filter((_, c) => !numericOk[c])
    .map((j) => header[j]);
  if (featureCols.length === 0) throw new Error(`${path}: no numeric feature columns`);

  const ids: string[] = [];
  const features: number[][] = [];
  const labels: number[] = [];
  let imputedCells = 0;
  for (let r = 1; r < rows.length; r++) {
    const row = rows[r];
    if (row.length !== header.length) {
      throw new Error(`${path}: row ${r + 1} has ${row.length} cells, expected ${header.length}`);
    }
    labels.push(parseLabel(row[labelCol]));
    ids.push(idCol >= 0 ? row[idCol] : `t${String(r - 1).padStart(6, "0")}`);
    const vec = new Array<number>(featureCols.length);
    for (let c = 0; c < featureCols.length; c++) {
      const cell = row[featureCols[c]];
      let value = cell === undefined || cell.trim() === "" ? NaN : Number(cell);
      if (!Number.isFinite(value)) {
        value = 0;
        imputedCells++;
      }
      vec[c] = value;
    }
    features.push(vec);
  }

  const classCodes = [...new Set(labels)].sort((a, b) => a - b);
  const labelNames = new Map<number, string>();
  for (const code of classCodes) {
    labelNames.set(code, LABEL_NAMES.get(code) ?? `class ${code}`);
  }
  return {
    ids,
    idColumn: idCol >= 0 ? header[idCol] : null,
    features,
    labels,
    featureNames: featureCols.map((j) => header[j]),
    droppedColumns,
    imputedCells,
    classCodes,
    labelNames,
  };
}
