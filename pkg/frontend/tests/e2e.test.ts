// @vitest-environment jsdom
//
// End-to-end workspace flow against the real service in mock-LLM mode:
// create session -> prompt -> reply + badges -> looping frames -> toggle a
// ui_in pin and observe a changed frame -> export and verify the bundle's
// manifest digests against the files the service wrote.

import { createHash } from "node:crypto";
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { App } from "../src/app.js";

// vitest runs with cwd=frontend/; jsdom rewrites import.meta.url, so
// resolve the repo root from the working directory instead
const REPO = resolve(process.cwd(), "..");
const PORT = 8931 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;
let dataDir: string;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForService(): Promise<void> {
  for (let i = 0; i < 120; i++) {
    try {
      const resp = await fetch(`${BASE}/api/sessions`);
      if (resp.ok) return;
    } catch {
      /* not up yet */
    }
    await sleep(250);
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  const work = mkdtempSync(join(tmpdir(), "chipchat-e2e-"));
  dataDir = join(work, "data");
  const sprite = readFileSync(
    join(REPO, "src/chipchat/agent/data/examples/button_sprite.v"),
    "utf-8",
  );
  const script = join(work, "script.json");
  writeFileSync(
    script,
    JSON.stringify({
      replies: [
        "Here is a sprite you can move with the switches.\n```verilog\n" + sprite + "\n```",
      ],
    }),
  );
  service = spawn(
    "python3",
    ["-m", "chipchat.cli", "serve", "--listen", `127.0.0.1:${PORT}`,
     "--data-dir", dataDir, "--mock", script],
    { cwd: REPO, stdio: ["ignore", "pipe", "pipe"] },
  );
  service.stderr?.on("data", () => undefined);
  await waitForService();
}, 60_000);

afterAll(() => {
  service?.kill();
});

function sha256(data: Buffer | Uint8Array): string {
  return createHash("sha256").update(data).digest("hex");
}

function mountDom(): void {
  document.body.innerHTML = `
    <span id="status"></span>
    <div id="transcript"></div>
    <form id="chat-form"><input id="chat-input"><button type="submit">send</button></form>
    <div id="toast" hidden></div>
    <div id="badges"></div>
    <div id="frame-box" hidden>
      <img id="frame-view" width="640" height="480">
      <div id="sync-stats"></div>
      <input id="rate" type="number" value="100">
    </div>
    <div id="diagnosis" hidden></div>
    <div id="pins"></div>
    <button id="export-btn" disabled></button>
    <a id="archive-link" hidden></a>
    <button id="copy-btn"></button>
    <pre id="code-view"></pre>
  `;
}

describe("workspace end to end (mock LLM)", () => {
  it("runs the full idea-to-bundle loop", async () => {
    mountDom();
    const app = new App(document, BASE);
    await app.start();
    expect(app.state.sessionId).toBeTruthy();

    // 1. prompt -> reply with code, both badges green
    await app.sendMessage("a sprite I can move with the switches");
    expect(app.state.report?.functional_ok).toBe(true);
    expect(app.state.report?.tapeout_ok).toBe(true);
    const badges = document.querySelectorAll("#badges .badge-ok");
    expect(badges.length).toBe(2);
    const agentTurns = app.state.transcript.filter((t) => t.role === "agent");
    expect(agentTurns.length).toBe(1);
    expect(document.querySelector("#code-view")?.textContent).toContain("module tt_um_button_sprite");

    // 2. looping frames: three of them, cycling through the <img>
    expect(app.state.frames?.urls.length).toBe(3);
    const img = document.querySelector<HTMLImageElement>("#frame-view")!;
    const first = img.src;
    await sleep(950);
    expect(img.src).not.toBe(first); // the player advanced
    const baseDigests = [...app.state.frames!.digests];

    // 3. toggle ui_in[0]: the sprite moves, the frame digest changes
    const pin0 = document.querySelector<HTMLInputElement>('#pins input[data-pin="0"]')!;
    expect(pin0.disabled).toBe(false);
    pin0.checked = true;
    pin0.dispatchEvent(new Event("change"));
    for (let i = 0; i < 200 && app.state.busy; i++) await sleep(100);
    expect(app.state.frames!.digests[0]).not.toBe(baseDigests[0]);

    // frame bytes really differ too
    const poked = await fetch(BASE + app.state.frames!.urls[0].replace(".png", ".ppm"));
    const pokedBytes = Buffer.from(await poked.arrayBuffer());
    const payload = pokedBytes.subarray(pokedBytes.indexOf(10, pokedBytes.indexOf(10, pokedBytes.indexOf(10) + 1) + 1) + 1);
    expect(sha256(payload)).toBe(app.state.frames!.digests[0]);

    // 4. export: enabled, produces a manifest whose digests verify
    const exportBtn = document.querySelector<HTMLButtonElement>("#export-btn")!;
    expect(app.state.status).toBe("ExportReady");
    expect(exportBtn.disabled).toBe(false);
    await app.exportBundle();
    const link = document.querySelector<HTMLAnchorElement>("#archive-link")!;
    expect(link.hidden).toBe(false);

    const exported = await app.client.exportSession(app.state.sessionId!);
    const bundleDir = join(dataDir, "exports", app.state.sessionId!);
    for (const [rel, digest] of Object.entries(exported.manifest.files)) {
      const bytes = readFileSync(join(bundleDir, rel));
      expect(sha256(bytes), rel).toBe(digest);
    }
    const archive = await fetch(BASE + exported.archive);
    expect(archive.status).toBe(200);
    expect((await archive.arrayBuffer()).byteLength).toBeGreaterThan(1000);
  }, 60_000);

  it("keeps the frame strip hidden for a failed revision", async () => {
    // stateless probe: a design with a lint error validates but never simulates
    const resp = await fetch(`${BASE}/api/validate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ source: "module tt_um_x(input clk); initial clk; endmodule", depth: "quick" }),
    });
    const report = (await resp.json()) as { sim_ok: boolean | null; tapeout_ok: boolean };
    expect(report.sim_ok).toBeNull();
    expect(report.tapeout_ok).toBe(false);
  });
});
