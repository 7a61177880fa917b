import { createHash } from "node:crypto";
import { mkdirSync, readFileSync, writeFileSync, renameSync } from "node:fs";
import { join } from "node:path";

import type { EmbeddedRecord } from "./types.js";

/**
 * Disk cache of embedded description records, partitioned by prompt hash
 * so a prompt change invalidates everything. A hit returns the prior
 * record byte-identically (it is stored as the serialized record itself).
 */
export class DescriptionCache {
  constructor(
    private readonly root: string,
    private readonly promptHash: string,
    private readonly encoderId: string,
  ) {}

  private pathFor(fragmentKey: string): string {
    const name = createHash("sha256")
      .update(`${this.encoderId}\n${fragmentKey}`, "utf8")
      .digest("hex");
    return join(this.root, this.promptHash, `${name}.json`);
  }

  get(fragmentKey: string): EmbeddedRecord | undefined {
    try {
      const raw = readFileSync(this.pathFor(fragmentKey), "utf8");
      return JSON.parse(raw) as EmbeddedRecord;
    } catch {
      return undefined;
    }
  }

  put(record: EmbeddedRecord): void {
    const path = this.pathFor(record.fragmentKey);
    mkdirSync(join(this.root, this.promptHash), { recursive: true });
    // write-then-rename keeps concurrent readers from seeing partial files
    const tmp = `${path}.tmp`;
    writeFileSync(tmp, JSON.stringify(record));
    renameSync(tmp, path);
  }
}
