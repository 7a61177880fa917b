export { DescriptionCache } from "./cache.js";
export {
  embedDescription,
  hashEmbedToken,
  resolveEncoder,
  tokenize,
  type EncoderConfig,
} from "./encoder.js";
export {
  generateDescription,
  parseFragmentFile,
  runPipeline,
  type FragmentInput,
  type PipelineOptions,
  type PipelineResult,
} from "./pipeline.js";
export { DEFAULT_PROMPT_TEMPLATE, promptHash, renderPrompt } from "./prompt.js";
export { generateText, mapBounded, type ProviderConfig } from "./provider.js";
export { detectSections, sectionAt } from "./sections.js";
export { exportStore, interchangeLines, reviewCsv } from "./store.js";
export {
  EmptyDescriptionError,
  EncoderError,
  ProviderError,
  SECTIONS,
  type DescriptionRecord,
  type EmbeddedRecord,
  type InterchangeRecord,
  type SectionLabel,
  type SectionSpan,
} from "./types.js";
