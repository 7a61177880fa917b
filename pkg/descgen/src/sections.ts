import { SECTIONS, type SectionLabel, type SectionSpan } from "./types.js";

/**
 * Locate the four property sections inside a generated description.
 *
 * Primary strategy: find the section keywords used as headings
 * ("Structural properties:", "**Chemical**", "2. Photovoltaic ...").
 * Fallback: exactly four paragraphs map to the four sections in prompt
 * order. If neither works the description is kept and every span is
 * labeled "unknown" (section detection failure).
 */
export function detectSections(description: string): {
  spans: SectionSpan[];
  failed: boolean;
} {
  const text = description;
  if (!text.trim()) {
    return { spans: [], failed: true };
  }

  const headings: { section: SectionLabel; start: number }[] = [];
  for (const section of SECTIONS) {
    // heading-like occurrence: start of line, optional list/emphasis
    // markers, the keyword, then more words or a colon
    const pattern = new RegExp(
      String.raw`^[^\S\n]*(?:[-*#\d.)\s]*)\*{0,2}${section}\b`,
      "im",
    );
    const match = pattern.exec(text);
    if (match) {
      headings.push({ section, start: match.index });
    }
  }
  headings.sort((a, b) => a.start - b.start);

  if (headings.length === SECTIONS.length) {
    const spans: SectionSpan[] = headings.map((h, i) => ({
      section: h.section,
      start: i === 0 ? 0 : h.start,
      end: i + 1 < headings.length ? headings[i + 1].start : text.length,
    }));
    return { spans, failed: false };
  }

  // paragraph fallback: 4 blocks separated by blank lines, prompt order
  const paragraphs: { start: number; end: number }[] = [];
  const blockPattern = /[^\n]+(?:\n(?!\s*\n)[^\n]*)*/g;
  let block: RegExpExecArray | null;
  while ((block = blockPattern.exec(text)) !== null) {
    if (block[0].trim()) {
      paragraphs.push({ start: block.index, end: block.index + block[0].length });
    }
  }
  if (paragraphs.length === SECTIONS.length) {
    const spans: SectionSpan[] = paragraphs.map((p, i) => ({
      section: SECTIONS[i],
      start: i === 0 ? 0 : p.start,
      end: i + 1 < paragraphs.length ? paragraphs[i + 1].start : text.length,
    }));
    return { spans, failed: false };
  }

  return {
    spans: [{ section: "unknown", start: 0, end: text.length }],
    failed: true,
  };
}

/** Label for a character offset; "unknown" when outside every span. */
export function sectionAt(spans: SectionSpan[], offset: number): SectionLabel {
  for (const span of spans) {
    if (offset >= span.start && offset < span.end) {
      return span.section;
    }
  }
  return "unknown";
}
