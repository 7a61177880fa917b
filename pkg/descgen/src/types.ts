/** Shared types for the description-generation pipeline. */

export const SECTIONS = ["structural", "physical", "chemical", "photovoltaic"] as const;
export type SectionName = (typeof SECTIONS)[number];
export type SectionLabel = SectionName | "unknown";

/** Character range [start, end) of one property section inside a description. */
export interface SectionSpan {
  section: SectionLabel;
  start: number;
  end: number;
}

export interface GenerationMeta {
  model: string;
  promptHash: string;
  timestamp: string;
  fromCache: boolean;
}

export interface DescriptionRecord {
  fragmentKey: string;
  fragmentSmiles: string;
  description: string;
  spans: SectionSpan[];
  sectionDetectionFailed: boolean;
  meta: GenerationMeta;
}

export interface EmbeddedRecord extends DescriptionRecord {
  tokens: string[];
  tokenSections: SectionLabel[];
  /** one row per token, row length = dText */
  embeddings: number[][];
  dText: number;
  encoder: string;
}

/** One line of the JSON-Lines interchange file consumed by molfuse. */
export interface InterchangeRecord {
  fragment_key: string;
  description: string;
  tokens: string[];
  sections: string[];
  embeddings: number[][];
  d_text: number;
  encoder: string;
}

export class ProviderError extends Error {
  constructor(
    message: string,
    readonly status?: number,
  ) {
    super(message);
    this.name = "ProviderError";
  }
}

export class EncoderError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EncoderError";
  }
}

export class EmptyDescriptionError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EmptyDescriptionError";
  }
}
