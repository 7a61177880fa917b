import { writeFileSync } from "node:fs";

import type { EmbeddedRecord, InterchangeRecord } from "./types.js";

/**
 * Serialize embedded records as the JSON-Lines interchange file molfuse
 * reads: one record per fragment, sorted by fragment_key, keys in sorted
 * order, floats in JS shortest-round-trip notation (bit-exact on re-read).
 */
export function interchangeLines(records: EmbeddedRecord[]): string {
  const sorted = [...records].sort((a, b) =>
    a.fragmentKey < b.fragmentKey ? -1 : a.fragmentKey > b.fragmentKey ? 1 : 0,
  );
  const lines = sorted.map((record) => {
    const row: InterchangeRecord = {
      fragment_key: record.fragmentKey,
      description: record.description,
      tokens: record.tokens,
      sections: record.tokenSections,
      embeddings: record.embeddings,
      d_text: record.dText,
      encoder: record.encoder,
    };
    // stable key order (alphabetical, matching the reader's writer twin)
    return JSON.stringify(row, Object.keys(row).sort());
  });
  return lines.length ? lines.join("\n") + "\n" : "";
}

export function exportStore(records: EmbeddedRecord[], outPath: string): void {
  writeFileSync(outPath, interchangeLines(records), "utf8");
}

/** Review CSV supporting the manual accuracy audit of descriptions. */
export function reviewCsv(records: EmbeddedRecord[]): string {
  const escape = (value: string) => `"${value.replaceAll('"', '""')}"`;
  const lines = ["fragment_key,fragment_smiles,description"];
  for (const record of [...records].sort((a, b) =>
    a.fragmentKey < b.fragmentKey ? -1 : 1,
  )) {
    lines.push(
      [record.fragmentKey, record.fragmentSmiles, record.description]
        .map(escape)
        .join(","),
    );
  }
  return lines.join("\n") + "\n";
}
