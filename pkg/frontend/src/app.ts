// DOM wiring for the workspace: chat panel, code view, frame viewer,
// validation badges, pin toggles, and export.

import { ApiError, ChipchatClient, type TurnView, type ValidationReport } from "./api.js";
import { FramePlayer } from "./frames.js";
import {
  applyMessageResponse,
  applyRender,
  applyUserTurn,
  exportEnabled,
  failingGate,
  initialState,
  pinsValue,
  type UiSessionState,
} from "./state.js";

function el<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
}

export class App {
  readonly state: UiSessionState = initialState();
  readonly client: ChipchatClient;
  private player: FramePlayer;

  constructor(
    private root: ParentNode,
    base = "",
  ) {
    this.client = new ChipchatClient(base);
    this.player = new FramePlayer(el<HTMLImageElement>(root, "#frame-view"));
    el<HTMLFormElement>(root, "#chat-form").addEventListener("submit", (e) => {
      e.preventDefault();
      void this.sendCurrentMessage();
    });
    el<HTMLButtonElement>(root, "#export-btn").addEventListener("click", () => {
      void this.exportBundle();
    });
    el<HTMLButtonElement>(root, "#copy-btn").addEventListener("click", () => {
      void navigator.clipboard?.writeText(this.state.source);
    });
    el<HTMLInputElement>(root, "#rate").addEventListener("change", (e) => {
      this.player.setRate(Number((e.target as HTMLInputElement).value));
    });
    const pinsBox = el<HTMLDivElement>(root, "#pins");
    for (let i = 0; i < 8; i++) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.dataset.pin = String(i);
      box.addEventListener("change", () => {
        this.state.pins[i] = box.checked;
        void this.rerender();
      });
      label.append(box, document.createTextNode(`ui_in[${i}]`));
      pinsBox.append(label);
    }
    this.render();
  }

  async start(): Promise<void> {
    this.state.sessionId = await this.client.createSession();
    this.render();
  }

  async sendCurrentMessage(): Promise<void> {
    const input = el<HTMLInputElement>(this.root, "#chat-input");
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    await this.sendMessage(text);
  }

  async sendMessage(text: string): Promise<void> {
    if (!this.state.sessionId || this.state.busy) return;
    this.state.busy = true;
    applyUserTurn(this.state, text);
    this.render();
    try {
      const before = this.state.transcript.length;
      const resp = await this.client.sendMessage(this.state.sessionId, text);
      // repair-loop validator turns are part of the session transcript;
      // refresh them from the server so the teaching moment is visible
      const session = await this.client.getSession(this.state.sessionId);
      const validatorTurns: TurnView[] = session.turns
        .slice(before)
        .filter((t) => t.role === "validator");
      applyMessageResponse(this.state, resp, validatorTurns);
      if (resp.report) this.state.source = this.sourceOf(session, resp.revision!);
      this.player.load(this.state.frames?.urls ?? []);
    } catch (err) {
      this.toast(err);
    } finally {
      this.state.busy = false;
      this.render();
    }
  }

  private sourceOf(session: { revisions: { revision: number; source: string }[] }, revision: number): string {
    const rev = session.revisions.find((r) => r.revision === revision);
    return rev ? rev.source : "";
  }

  async rerender(): Promise<void> {
    if (!this.state.sessionId || this.state.revision === null || this.state.busy) return;
    if (!this.state.report?.sim_ok) return;
    this.state.busy = true;
    this.render();
    try {
      const resp = await this.client.render(this.state.sessionId, this.state.revision, [
        { cycle: 0, name: "ui_in", value: pinsValue(this.state.pins) },
      ]);
      applyRender(this.state, resp);
      this.player.load(resp.frames);
    } catch (err) {
      this.toast(err);
    } finally {
      this.state.busy = false;
      this.render();
    }
  }

  async exportBundle(): Promise<void> {
    if (!this.state.sessionId || !exportEnabled(this.state) || this.state.busy) return;
    this.state.busy = true;
    this.render();
    try {
      const resp = await this.client.exportSession(this.state.sessionId);
      const link = el<HTMLAnchorElement>(this.root, "#archive-link");
      link.href = resp.archive;
      link.textContent = `download bundle (${Object.keys(resp.manifest.files).length} files, tiles ${resp.manifest.tiles})`;
      link.hidden = false;
    } catch (err) {
      this.toast(err);
    } finally {
      this.state.busy = false;
      this.render();
    }
  }

  private toast(err: unknown): void {
    const box = el<HTMLDivElement>(this.root, "#toast");
    if (err instanceof ApiError) {
      box.textContent = err.retryGuidance
        ? `${err.message} — ${err.retryGuidance}`
        : err.diagnosis ?? err.message;
    } else {
      box.textContent = String(err);
    }
    box.hidden = false;
  }

  render(): void {
    const s = this.state;
    const transcript = el<HTMLDivElement>(this.root, "#transcript");
    transcript.replaceChildren(
      ...s.transcript.map((t) => {
        const div = document.createElement("div");
        div.className = `turn turn-${t.role}`;
        div.textContent = t.text;
        return div;
      }),
    );

    el<HTMLPreElement>(this.root, "#code-view").textContent = s.source;

    const badges = el<HTMLDivElement>(this.root, "#badges");
    badges.replaceChildren(
      this.badge("functional", s.report?.functional_ok ?? null),
      this.badge("tapeout-ready", s.report?.tapeout_ok ?? null),
    );

    const frameBox = el<HTMLDivElement>(this.root, "#frame-box");
    const diagnosisBox = el<HTMLDivElement>(this.root, "#diagnosis");
    if (s.frames) {
      frameBox.hidden = false;
      diagnosisBox.hidden = true;
    } else {
      frameBox.hidden = s.revision === null;
      diagnosisBox.hidden = !s.diagnosis;
      diagnosisBox.textContent = s.diagnosis ?? "";
    }

    const stats = el<HTMLDivElement>(this.root, "#sync-stats");
    stats.textContent = s.report?.sim_ok
      ? `frames: ${s.frames?.urls.length ?? 0} · digests: ${s.frames?.digests.map((d) => d.slice(0, 8)).join(" ") ?? ""}`
      : "";

    const exportBtn = el<HTMLButtonElement>(this.root, "#export-btn");
    exportBtn.disabled = !exportEnabled(s) || s.busy;
    const gate = failingGate(s.report);
    exportBtn.title = exportEnabled(s)
      ? "package the design for tapeout"
      : `not ready: ${gate ?? "waiting for a full validation"}`;

    for (const box of this.root.querySelectorAll<HTMLInputElement>("#pins input")) {
      box.disabled = s.busy || !s.report?.sim_ok;
      box.checked = s.pins[Number(box.dataset.pin)];
    }

    el<HTMLSpanElement>(this.root, "#status").textContent =
      (s.sessionId ? `session ${s.sessionId} · ` : "") + s.status + (s.busy ? " · working…" : "");
  }

  private badge(label: string, ok: boolean | null): HTMLSpanElement {
    const span = document.createElement("span");
    span.className = "badge " + (ok === null ? "badge-none" : ok ? "badge-ok" : "badge-fail");
    span.textContent = `${label}: ${ok === null ? "–" : ok ? "pass" : "fail"}`;
    return span;
  }
}

export async function boot(root: ParentNode = document): Promise<App> {
  const app = new App(root);
  await app.start();
  return app;
}
