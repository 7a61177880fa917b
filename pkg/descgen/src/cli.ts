#!/usr/bin/env node
/**
 * descgen generate --fragments frag.jsonl --out store.jsonl \
 *     --provider-url https://... --model gpt-4o-mini --encoder hash-v1
 *
 * Reads the JSON-Lines output of `molfuse fragment`, generates one
 * description per unique fragment (disk-cached), embeds the tokens, and
 * writes the embedding interchange file. The API key comes from the
 * DESCGEN_API_KEY environment variable.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { resolveEncoder } from "./encoder.js";
import { parseFragmentFile, runPipeline } from "./pipeline.js";
import { exportStore, reviewCsv } from "./store.js";

interface CliOptions {
  fragments: string;
  out: string;
  providerUrl?: string;
  model: string;
  encoder: string;
  dText: number;
  cacheDir: string;
  concurrency: number;
  reviewCsv?: string;
  promptFile?: string;
  maxAttempts: number;
  backoffMs: number;
}

function parseArgs(argv: string[]): CliOptions {
  if (argv[0] !== "generate") {
    throw new Error("usage: descgen generate --fragments FILE --out FILE [options]");
  }
  const options: CliOptions = {
    fragments: "",
    out: "store.jsonl",
    model: "gpt-3.5-turbo",
    encoder: "hash-v1",
    dText: 768,
    cacheDir: ".descgen-cache",
    concurrency: 4,
    maxAttempts: 3,
    backoffMs: 500,
  };
  const args = argv.slice(1);
  for (let i = 0; i < args.length; i += 2) {
    const flag = args[i];
    const value = args[i + 1];
    if (value === undefined) throw new Error(`missing value for ${flag}`);
    switch (flag) {
      case "--fragments": options.fragments = value; break;
      case "--out": options.out = value; break;
      case "--provider-url": options.providerUrl = value; break;
      case "--model": options.model = value; break;
      case "--encoder": options.encoder = value; break;
      case "--d-text": options.dText = Number(value); break;
      case "--cache-dir": options.cacheDir = value; break;
      case "--concurrency": options.concurrency = Number(value); break;
      case "--review-csv": options.reviewCsv = value; break;
      case "--prompt-file": options.promptFile = value; break;
      case "--max-attempts": options.maxAttempts = Number(value); break;
      case "--backoff-ms": options.backoffMs = Number(value); break;
      default: throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!options.fragments) throw new Error("--fragments is required");
  return options;
}

export async function main(argv: string[]): Promise<number> {
  let options: CliOptions;
  try {
    options = parseArgs(argv);
  } catch (error) {
    console.error(String(error instanceof Error ? error.message : error));
    return 2;
  }
  try {
    const content =
      options.fragments === "-"
        ? readFileSync(0, "utf8")
        : readFileSync(options.fragments, "utf8");
    const fragments = parseFragmentFile(content);
    console.error(`loaded ${fragments.length} unique fragment(s)`);
    const result = await runPipeline(fragments, {
      provider: options.providerUrl
        ? {
            url: options.providerUrl,
            model: options.model,
            apiKey: process.env.DESCGEN_API_KEY,
            maxAttempts: options.maxAttempts,
            backoffMs: options.backoffMs,
          }
        : undefined,
      encoder: resolveEncoder(options.encoder, options.dText),
      cacheDir: options.cacheDir,
      template: options.promptFile
        ? readFileSync(options.promptFile, "utf8").trim()
        : undefined,
      concurrency: options.concurrency,
      log: (message) => console.error(message),
    });
    exportStore(result.records, options.out);
    if (options.reviewCsv) {
      writeFileSync(options.reviewCsv, reviewCsv(result.records), "utf8");
    }
    console.error(
      `wrote ${result.records.length} record(s) to ${options.out} ` +
        `(${result.providerCalls} provider call(s), ${result.cacheHits} cache ` +
        `hit(s), ${result.sectionFailures} section-detection failure(s))`,
    );
    return 0;
  } catch (error) {
    console.error(String(error instanceof Error ? error.message : error));
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
