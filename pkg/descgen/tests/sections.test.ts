import { describe, expect, it } from "vitest";

import { detectSections, sectionAt } from "../src/sections.js";

describe("detectSections", () => {
  it("labels four heading-style sections", () => {
    const text = [
      "Structural properties: a fused aromatic core.",
      "Physical properties: solid, melting point above 200 C.",
      "Chemical properties: electron rich, oxidatively stable.",
      "Photovoltaic properties: good charge transport.",
    ].join("\n");
    const { spans, failed } = detectSections(text);
    expect(failed).toBe(false);
    expect(spans.map((s) => s.section)).toEqual([
      "structural", "physical", "chemical", "photovoltaic",
    ]);
    // spans are non-overlapping, ordered, and cover the text
    expect(spans[0].start).toBe(0);
    for (let i = 1; i < spans.length; i++) {
      expect(spans[i].start).toBe(spans[i - 1].end);
    }
    expect(spans.at(-1)!.end).toBe(text.length);
  });

  it("handles markdown-style numbered headings", () => {
    const text = [
      "1. **Structural**: planar thiophene ring.",
      "2. **Physical**: low molecular weight.",
      "3. **Chemical**: reactive alpha positions.",
      "4. **Photovoltaic**: donor character.",
    ].join("\n");
    const { spans, failed } = detectSections(text);
    expect(failed).toBe(false);
    expect(spans).toHaveLength(4);
  });

  it("falls back to four paragraphs in prompt order", () => {
    const text = [
      "It is a ring system with side chains.",
      "The material is solid at room temperature.",
      "It resists oxidation under ambient conditions.",
      "Devices using it show high fill factors.",
    ].join("\n\n");
    const { spans, failed } = detectSections(text);
    expect(failed).toBe(false);
    expect(spans.map((s) => s.section)).toEqual([
      "structural", "physical", "chemical", "photovoltaic",
    ]);
  });

  it("marks undetectable sections as unknown and keeps the text", () => {
    const text = "A single short blurb with no discernible sections.";
    const { spans, failed } = detectSections(text);
    expect(failed).toBe(true);
    expect(spans).toEqual([
      { section: "unknown", start: 0, end: text.length },
    ]);
  });

  it("sectionAt maps offsets to labels", () => {
    const spans = [
      { section: "structural" as const, start: 0, end: 10 },
      { section: "chemical" as const, start: 10, end: 20 },
    ];
    expect(sectionAt(spans, 0)).toBe("structural");
    expect(sectionAt(spans, 15)).toBe("chemical");
    expect(sectionAt(spans, 25)).toBe("unknown");
  });
});
