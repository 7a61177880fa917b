import { createServer, type Server } from "node:http";
import type { AddressInfo } from "node:net";

/** OpenAI-style stub provider with programmable failures. */
export interface StubProvider {
  url: string;
  calls: () => number;
  failNext: (count: number, status?: number) => void;
  close: () => Promise<void>;
}

export function describeSmiles(smiles: string): string {
  return [
    `Structural properties: the fragment ${smiles} is a conjugated unit.`,
    `Physical properties: it is a solid with moderate solubility.`,
    `Chemical properties: it is stable and weakly electron donating.`,
    `Photovoltaic properties: it supports charge transport in OPV blends.`,
  ].join("\n\n");
}

export async function startStubProvider(): Promise<StubProvider> {
  let callCount = 0;
  let failures = 0;
  let failStatus = 500;
  const server: Server = createServer((req, res) => {
    let body = "";
    req.on("data", (chunk) => (body += chunk));
    req.on("end", () => {
      callCount += 1;
      if (failures > 0) {
        failures -= 1;
        res.writeHead(failStatus, { "content-type": "application/json" });
        res.end(JSON.stringify({ error: "injected failure" }));
        return;
      }
      const payload = JSON.parse(body) as {
        messages: { content: string }[];
      };
      const prompt = payload.messages[0].content;
      const match = /molecular fragment: (\S+) focusing/.exec(prompt);
      const smiles = match ? match[1] : "UNKNOWN";
      res.writeHead(200, { "content-type": "application/json" });
      res.end(
        JSON.stringify({
          choices: [{ message: { content: describeSmiles(smiles) } }],
        }),
      );
    });
  });
  await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
  const address = server.address() as AddressInfo;
  return {
    url: `http://127.0.0.1:${address.port}/v1/chat/completions`,
    calls: () => callCount,
    failNext: (count, status = 500) => {
      failures = count;
      failStatus = status;
    },
    close: () => new Promise((resolve) => server.close(() => resolve())),
  };
}
