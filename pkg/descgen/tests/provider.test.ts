import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { generateText, mapBounded } from "../src/provider.js";
import { ProviderError } from "../src/types.js";
import { startStubProvider, type StubProvider } from "./stub_server.js";

let stub: StubProvider;

beforeEach(async () => {
  stub = await startStubProvider();
});

afterEach(async () => {
  await stub.close();
});

const fast = { model: "stub-model", maxAttempts: 3, backoffMs: 1 };

describe("generateText", () => {
  it("returns the message content", async () => {
    const text = await generateText(
      "Generate descriptions of this molecular fragment: CC(*) focusing on x",
      { url: stub.url, ...fast },
    );
    expect(text).toContain("CC(*)");
    expect(stub.calls()).toBe(1);
  });

  it("retries transient 5xx then succeeds", async () => {
    stub.failNext(2, 503);
    const text = await generateText(
      "molecular fragment: c1ccccc1(*) focusing", { url: stub.url, ...fast },
    );
    expect(text).toContain("c1ccccc1(*)");
    expect(stub.calls()).toBe(3);
  });

  it("three straight 5xx exhaust retries with ProviderError", async () => {
    stub.failNext(3, 500);
    await expect(
      generateText("molecular fragment: CC focusing", { url: stub.url, ...fast }),
    ).rejects.toThrow(ProviderError);
    expect(stub.calls()).toBe(3);
  });

  it("does not retry client errors", async () => {
    stub.failNext(1, 400);
    await expect(
      generateText("molecular fragment: CC focusing", { url: stub.url, ...fast }),
    ).rejects.toThrow(ProviderError);
    expect(stub.calls()).toBe(1);
  });
});

describe("mapBounded", () => {
  it("honors the concurrency limit and preserves order", async () => {
    let inFlight = 0;
    let peak = 0;
    const items = Array.from({ length: 12 }, (_, i) => i);
    const out = await mapBounded(items, 4, async (item) => {
      inFlight += 1;
      peak = Math.max(peak, inFlight);
      await new Promise((resolve) => setTimeout(resolve, 5));
      inFlight -= 1;
      return item * 2;
    });
    expect(out).toEqual(items.map((i) => i * 2));
    expect(peak).toBeLessThanOrEqual(4);
    expect(peak).toBeGreaterThan(1);
  });
});
