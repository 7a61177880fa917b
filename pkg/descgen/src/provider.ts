import { ProviderError } from "./types.js";

/**
 * Provider-agnostic chat-completion client (OpenAI-style wire format).
 * The endpoint comes from --provider-url; the key from DESCGEN_API_KEY.
 * Transient failures (HTTP 5xx/429, network errors) are retried with
 * exponential backoff; other HTTP errors fail immediately.
 */
export interface ProviderConfig {
  url: string;
  model: string;
  apiKey?: string;
  maxAttempts?: number;
  backoffMs?: number;
  temperature?: number;
}

export async function generateText(
  prompt: string,
  config: ProviderConfig,
): Promise<string> {
  const maxAttempts = config.maxAttempts ?? 3;
  const backoffMs = config.backoffMs ?? 500;
  let lastError: unknown;
  for (let attempt = 0; attempt < maxAttempts; attempt++) {
    if (attempt > 0) {
      await sleep(backoffMs * 2 ** (attempt - 1));
    }
    try {
      const response = await fetch(config.url, {
        method: "POST",
        headers: {
          "content-type": "application/json",
          ...(config.apiKey ? { authorization: `Bearer ${config.apiKey}` } : {}),
        },
        body: JSON.stringify({
          model: config.model,
          temperature: config.temperature ?? 0.2,
          messages: [{ role: "user", content: prompt }],
        }),
      });
      if (response.status >= 500 || response.status === 429) {
        lastError = new ProviderError(
          `provider returned ${response.status}`,
          response.status,
        );
        continue;
      }
      if (!response.ok) {
        throw new ProviderError(
          `provider returned ${response.status}: ${await response.text()}`,
          response.status,
        );
      }
      const payload = (await response.json()) as {
        choices?: { message?: { content?: string } }[];
      };
      const content = payload.choices?.[0]?.message?.content;
      if (typeof content !== "string" || !content.trim()) {
        throw new ProviderError("provider response has no message content");
      }
      return content;
    } catch (error) {
      if (error instanceof ProviderError && error.status !== undefined
          && error.status < 500 && error.status !== 429) {
        throw error;
      }
      lastError = error;
    }
  }
  const detail = lastError instanceof Error ? lastError.message : String(lastError);
  throw new ProviderError(
    `provider failed after ${maxAttempts} attempt(s): ${detail}`,
  );
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Minimal promise pool: run tasks with at most `limit` in flight. */
export async function mapBounded<T, R>(
  items: T[],
  limit: number,
  fn: (item: T, index: number) => Promise<R>,
): Promise<R[]> {
  const results = new Array<R>(items.length);
  let next = 0;
  async function worker(): Promise<void> {
    while (next < items.length) {
      const index = next++;
      results[index] = await fn(items[index], index);
    }
  }
  const workers = Array.from(
    { length: Math.max(1, Math.min(limit, items.length)) },
    () => worker(),
  );
  await Promise.all(workers);
  return results;
}
