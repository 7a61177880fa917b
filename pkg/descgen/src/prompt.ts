import { createHash } from "node:crypto";

/**
 * Default prompt asking for the four property sections of one fragment.
 * `{smiles}` is replaced with the fragment's SMILES text.
 */
export const DEFAULT_PROMPT_TEMPLATE =
  "Generate descriptions of this molecular fragment: {smiles} focusing on " +
  "its structural, physical, chemical, and photovoltaic properties. " +
  "Descriptions should be specific and tailored for organic photovoltaic " +
  "(OPV) material research. Avoid neutral information.";

export function renderPrompt(template: string, smiles: string): string {
  if (!template.includes("{smiles}")) {
    throw new Error("prompt template must contain {smiles}");
  }
  return template.replaceAll("{smiles}", smiles);
}

/** Stable hash identifying a prompt template (cache partitioning key). */
export function promptHash(template: string): string {
  return createHash("sha256").update(template, "utf8").digest("hex").slice(0, 16);
}
