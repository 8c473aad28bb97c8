/**
 * Minimal CSV reading/writing (RFC 4180 quoting, LF output).
 */

export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let cell = "";
  let inQuotes = false;
  let i = 0;
  const push = () => {
    row.push(cell);
    cell = "";
  };
  const endRow = () => {
    push();
    // skip blank trailing lines
    if (row.length > 1 || row[0] !== "") rows.push(row);
    row = [];
  };
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          cell += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i++;
        continue;
      }
      cell += ch;
      i++;
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
      i++;
    } else if (ch === ",") {
      push();
      i++;
    } else if (ch === "\n") {
      endRow();
      i++;
    } else if (ch === "\r") {
      i++; // tolerate CRLF input
    } else {
      cell += ch;
      i++;
    }
  }
  if (cell !== "" || row.length > 0) endRow();
  return rows;
}

function escapeCell(value: string): string {
  if (/[",\n]/.test(value)) {
    return '"' + value.replace(/"/g, '""') + '"';
  }
  return value;
}

export function toCsv(rows: (string | number)[][]): string {
  return (
    rows
      .map((row) => row.map((cell) => escapeCell(String(cell))).join(","))
      .join("\n") + "\n"
  );
}
