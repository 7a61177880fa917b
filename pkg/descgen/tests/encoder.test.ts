import { describe, expect, it } from "vitest";

import { embedDescription, hashEmbedToken, resolveEncoder, tokenize } from "../src/encoder.js";
import { detectSections } from "../src/sections.js";
import { EmptyDescriptionError, type DescriptionRecord } from "../src/types.js";
import { describeSmiles } from "./stub_server.js";

function recordFor(description: string): DescriptionRecord {
  const { spans, failed } = detectSections(description);
  return {
    fragmentKey: "k",
    fragmentSmiles: "CC(*)",
    description,
    spans,
    sectionDetectionFailed: failed,
    meta: { model: "m", promptHash: "p", timestamp: "t", fromCache: false },
  };
}

const encoder = resolveEncoder("hash-v1", 16);

describe("hash encoder", () => {
  it("identical text embeds identically, bit for bit", async () => {
    const text = describeSmiles("CC(*)");
    const a = await embedDescription(recordFor(text), encoder);
    const b = await embedDescription(recordFor(text), encoder);
    expect(a.embeddings).toEqual(b.embeddings);
    expect(a.tokens).toEqual(b.tokens);
  });

  it("one embedding row per tokenizer token", async () => {
    const text = describeSmiles("c1ccsc1(*)");
    const out = await embedDescription(recordFor(text), encoder);
    expect(out.tokens.length).toBe(tokenize(text).length);
    expect(out.embeddings.length).toBe(out.tokens.length);
    expect(out.embeddings.every((row) => row.length === 16)).toBe(true);
    expect(out.dText).toBe(16);
  });

  it("near-identical descriptions have cosine similarity > 0.95", async () => {
    const base = describeSmiles("CC(*)");
    const tweaked = base.replace("moderate solubility", "limited solubility");
    const a = await embedDescription(recordFor(base), encoder);
    const b = await embedDescription(recordFor(tweaked), encoder);
    const mean = (rows: number[][]) => {
      const out = new Array(rows[0].length).fill(0);
      for (const row of rows) row.forEach((v, i) => (out[i] += v / rows.length));
      return out;
    };
    const ma = mean(a.embeddings);
    const mb = mean(b.embeddings);
    const dot = ma.reduce((acc, v, i) => acc + v * mb[i], 0);
    const na = Math.hypot(...ma);
    const nb = Math.hypot(...mb);
    expect(dot / (na * nb)).toBeGreaterThan(0.95);
  });

  it("section labels partition the tokens", async () => {
    const out = await embedDescription(recordFor(describeSmiles("CC(*)")), encoder);
    expect(out.tokenSections.length).toBe(out.tokens.length);
    expect(out.sectionDetectionFailed).toBe(false);
    expect(out.tokenSections).not.toContain("unknown");
    expect(new Set(out.tokenSections)).toEqual(
      new Set(["structural", "physical", "chemical", "photovoltaic"]),
    );
  });

  it("unknown labels appear only on section-detection failure", async () => {
    const out = await embedDescription(recordFor("just one blurb"), encoder);
    expect(out.sectionDetectionFailed).toBe(true);
    expect(new Set(out.tokenSections)).toEqual(new Set(["unknown"]));
  });

  it("rejects empty descriptions", async () => {
    await expect(embedDescription(recordFor("   "), encoder)).rejects.toThrow(
      EmptyDescriptionError,
    );
  });

  it("token hash rows are stable values in [-1, 1]", () => {
    const row = hashEmbedToken("thiophene", 8);
    expect(row).toEqual(hashEmbedToken("Thiophene", 8)); // case-folded
    expect(row.every((v) => v >= -1 && v <= 1)).toBe(true);
  });
});
