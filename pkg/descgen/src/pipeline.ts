import { DescriptionCache } from "./cache.js";
import { embedDescription, type EncoderConfig } from "./encoder.js";
import { DEFAULT_PROMPT_TEMPLATE, promptHash, renderPrompt } from "./prompt.js";
import { generateText, mapBounded, type ProviderConfig } from "./provider.js";
import { detectSections } from "./sections.js";
import type { DescriptionRecord, EmbeddedRecord } from "./types.js";

export interface FragmentInput {
  key: string;
  smiles: string;
}

/** Parse the JSON-Lines output of `molfuse fragment` into unique fragments. */
export function parseFragmentFile(content: string): FragmentInput[] {
  const seen = new Map<string, FragmentInput>();
  for (const [lineNo, line] of content.split("\n").entries()) {
    if (!line.trim()) continue;
    let obj: { fragments?: { key?: string; smiles?: string }[] };
    try {
      obj = JSON.parse(line);
    } catch (error) {
      throw new Error(`fragment file line ${lineNo + 1}: invalid JSON (${error})`);
    }
    for (const frag of obj.fragments ?? []) {
      if (typeof frag.key !== "string" || typeof frag.smiles !== "string") {
        throw new Error(`fragment file line ${lineNo + 1}: malformed fragment entry`);
      }
      if (!seen.has(frag.key)) {
        seen.set(frag.key, { key: frag.key, smiles: frag.smiles });
      }
    }
  }
  return [...seen.values()];
}

export async function generateDescription(
  fragment: FragmentInput,
  template: string,
  provider: ProviderConfig,
): Promise<DescriptionRecord> {
  const prompt = renderPrompt(template, fragment.smiles);
  const text = await generateText(prompt, provider);
  const { spans, failed } = detectSections(text);
  return {
    fragmentKey: fragment.key,
    fragmentSmiles: fragment.smiles,
    description: text,
    spans,
    sectionDetectionFailed: failed,
    meta: {
      model: provider.model,
      promptHash: promptHash(template),
      timestamp: new Date().toISOString(),
      fromCache: false,
    },
  };
}

export interface PipelineOptions {
  provider?: ProviderConfig;
  encoder: EncoderConfig;
  cacheDir: string;
  template?: string;
  concurrency?: number;
  log?: (message: string) => void;
}

export interface PipelineResult {
  records: EmbeddedRecord[];
  providerCalls: number;
  cacheHits: number;
  sectionFailures: number;
}

/** Generate + embed every fragment, consulting the disk cache first. */
export async function runPipeline(
  fragments: FragmentInput[],
  options: PipelineOptions,
): Promise<PipelineResult> {
  const template = options.template ?? DEFAULT_PROMPT_TEMPLATE;
  const cache = new DescriptionCache(
    options.cacheDir,
    promptHash(template),
    options.encoder.id,
  );
  let providerCalls = 0;
  let cacheHits = 0;
  const records = await mapBounded(
    fragments,
    options.concurrency ?? 4,
    async (fragment) => {
      const hit = cache.get(fragment.key);
      if (hit) {
        cacheHits += 1;
        return hit;
      }
      if (!options.provider) {
        throw new Error(
          `fragment ${fragment.key} is not cached and no --provider-url was given`,
        );
      }
      providerCalls += 1;
      const described = await generateDescription(fragment, template, options.provider);
      const embedded = await embedDescription(described, options.encoder);
      cache.put(embedded);
      options.log?.(`described ${fragment.key} (${embedded.tokens.length} tokens)`);
      return embedded;
    },
  );
  const sectionFailures = records.filter((r) => r.sectionDetectionFailed).length;
  return { records, providerCalls, cacheHits, sectionFailures };
}
