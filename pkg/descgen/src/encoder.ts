import { createHash } from "node:crypto";

import { sectionAt } from "./sections.js";
import {
  EmptyDescriptionError,
  EncoderError,
  type DescriptionRecord,
  type EmbeddedRecord,
  type SectionLabel,
} from "./types.js";

export interface EncoderConfig {
  /** "hash" for the built-in deterministic embedder, or a URL of a
   * remote encoder endpoint accepting {"texts": [...]} */
  kind: "hash" | "remote";
  id: string;
  dText: number;
  url?: string;
}

export function resolveEncoder(spec: string, dText: number): EncoderConfig {
  if (spec.startsWith("http://") || spec.startsWith("https://")) {
    return { kind: "remote", id: spec, dText, url: spec };
  }
  return { kind: "hash", id: `${spec}-d${dText}`, dText };
}

export interface Token {
  text: string;
  start: number;
}

/** Word-level tokenizer keeping character offsets (for section labels). */
export function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  const pattern = /\S+/g;
  let match: RegExpExecArray | null;
  while ((match = pattern.exec(text)) !== null) {
    tokens.push({ text: match[0], start: match.index });
  }
  return tokens;
}

/**
 * Deterministic per-token embedding: 8 bytes of sha256(token) seed a
 * splitmix64 stream mapped into [-1, 1]. The same token always gets the
 * same row, so identical descriptions embed identically byte for byte.
 */
export function hashEmbedToken(token: string, dText: number): number[] {
  const digest = createHash("sha256").update(token.toLowerCase(), "utf8").digest();
  let state = digest.readBigUInt64LE(0);
  const row = new Array<number>(dText);
  for (let i = 0; i < dText; i++) {
    state = (state + 0x9e3779b97f4a7c15n) & 0xffffffffffffffffn;
    let z = state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & 0xffffffffffffffffn;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & 0xffffffffffffffffn;
    z = z ^ (z >> 31n);
    // 53 significant bits -> exact double in [0, 1)
    const unit = Number(z >> 11n) / 2 ** 53;
    row[i] = 2.0 * unit - 1.0;
  }
  return row;
}

async function remoteEmbed(texts: string[], config: EncoderConfig): Promise<number[][]> {
  const response = await fetch(config.url!, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ texts }),
  });
  if (!response.ok) {
    throw new EncoderError(`encoder endpoint returned ${response.status}`);
  }
  const payload = (await response.json()) as { embeddings?: number[][] };
  if (!payload.embeddings || payload.embeddings.length !== texts.length) {
    throw new EncoderError("encoder response shape mismatch");
  }
  return payload.embeddings;
}

/** Token embeddings plus per-token section labels for one description. */
export async function embedDescription(
  record: DescriptionRecord,
  config: EncoderConfig,
): Promise<EmbeddedRecord> {
  if (!record.description.trim()) {
    throw new EmptyDescriptionError(
      `empty description for ${record.fragmentKey}`,
    );
  }
  const tokens = tokenize(record.description);
  const sections: SectionLabel[] = tokens.map((t) =>
    sectionAt(record.spans, t.start),
  );
  let rows: number[][];
  if (config.kind === "hash") {
    rows = tokens.map((t) => hashEmbedToken(t.text, config.dText));
  } else {
    rows = await remoteEmbed(tokens.map((t) => t.text), config);
    if (rows.some((r) => r.length !== config.dText)) {
      throw new EncoderError("encoder returned rows of unexpected width");
    }
  }
  return {
    ...record,
    tokens: tokens.map((t) => t.text),
    tokenSections: sections,
    embeddings: rows,
    dText: config.dText,
    encoder: config.id,
  };
}
