// The UI is a pure client of the documented REST API: every endpoint the
// client can call must exist, with the right verb, in the recorded
// service spec. A Python-side test keeps the recording in sync with the
// live service, so drift fails on whichever side moved.

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { USED_ENDPOINTS } from "../src/api.js";

const spec = JSON.parse(
  readFileSync(fileURLToPath(new URL("./fixtures/openapi.json", import.meta.url)), "utf-8"),
) as { paths: Record<string, Record<string, unknown>> };

describe("API contract", () => {
  it("uses only documented endpoints", () => {
    for (const [method, path] of USED_ENDPOINTS) {
      const entry = spec.paths[path];
      expect(entry, `undocumented path ${path}`).toBeDefined();
      expect(Object.keys(entry), `missing ${method} on ${path}`).toContain(method);
    }
  });

  it("covers every client method with an endpoint declaration", () => {
    // api.ts methods map 1:1 onto USED_ENDPOINTS entries
    const source = readFileSync(
      fileURLToPath(new URL("../src/api.ts", import.meta.url)),
      "utf-8",
    );
    const fetchPaths = [...source.matchAll(/this\.url\(\s*[`"]([^`"]+)[`"]/g)].map((m) => m[1]);
    for (const raw of fetchPaths) {
      const template = raw
        .replace(/\$\{sid\}/g, "{sid}")
        .replace(/\$\{revision\}/g, "{revision}")
        .replace(/\$\{n\}\.\$\{ext\}/g, "{n}.{ext}");
      const normalized = template.replace("{n}.{ext}", "{frame}.png");
      const known = USED_ENDPOINTS.some(([, p]) =>
        p === normalized || p === normalized.replace(".png", ".ppm"),
      );
      expect(known, `client path ${raw} not declared in USED_ENDPOINTS`).toBe(true);
    }
  });
});
