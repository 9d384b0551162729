// UI session state and the invariants the panels render from:
// the shown report always belongs to the shown revision, and the frame
// strip is never populated for a revision that failed simulation.

import type { MessageResponse, RenderResponse, TurnView, ValidationReport } from "./api.js";

export interface FrameStrip {
  urls: string[];
  digests: string[];
}

export interface UiSessionState {
  sessionId: string | null;
  status: "Drafting" | "Valid" | "ExportReady";
  transcript: TurnView[];
  revision: number | null;
  source: string;
  report: ValidationReport | null;
  frames: FrameStrip | null;
  diagnosis: string | null;
  pins: boolean[]; // the eight ui_in switches
  busy: boolean;
}

export function initialState(): UiSessionState {
  return {
    sessionId: null,
    status: "Drafting",
    transcript: [],
    revision: null,
    source: "",
    report: null,
    frames: null,
    diagnosis: null,
    pins: new Array(8).fill(false),
    busy: false,
  };
}

export function pinsValue(pins: boolean[]): number {
  return pins.reduce((acc, on, i) => acc | (on ? 1 << i : 0), 0);
}

export function applyUserTurn(state: UiSessionState, text: string): void {
  state.transcript.push({ role: "user", text });
}

export function applyMessageResponse(
  state: UiSessionState,
  resp: MessageResponse,
  validatorTurns: TurnView[],
): void {
  for (const t of validatorTurns) state.transcript.push(t);
  state.transcript.push({ role: "agent", text: resp.reply });
  state.status = resp.status;
  if (resp.report && typeof resp.revision === "number") {
    state.revision = resp.revision;
    state.report = resp.report;
    if (resp.report.sim_ok && resp.frames?.length) {
      state.frames = { urls: resp.frames, digests: resp.report.frame_digests };
      state.diagnosis = null;
    } else {
      state.frames = null; // never show stale frames for a failed revision
      state.diagnosis = failureSummary(resp.report);
    }
  }
}

export function applyRender(state: UiSessionState, resp: RenderResponse): void {
  state.frames = { urls: resp.frames, digests: resp.digests };
  state.diagnosis = null;
}

export function failureSummary(report: ValidationReport): string {
  if (!report.parse_ok) {
    const first = report.parse_errors[0];
    return first ? `line ${first.line}: ${first.message}` : "the design does not parse";
  }
  if (report.sim_error) return report.sim_error;
  const lintErrors = report.lint?.findings.filter((f) => f.severity === "Error") ?? [];
  if (lintErrors.length) return lintErrors.map((f) => `[${f.code}] ${f.message}`).join("\n");
  const iface = report.interface?.findings ?? [];
  if (iface.length) return iface.map((f) => `[${f.code}] ${f.message}`).join("\n");
  return "validation failed";
}

export function failingGate(report: ValidationReport | null): string | null {
  if (!report) return "no design yet";
  if (!report.parse_ok) return "parse";
  if (!report.interface?.interface_ok) return "interface";
  if (report.lint && !report.lint.synthesizable) return "lint";
  if (!report.sim_ok) return "simulation";
  if (report.area && !report.area.fits_supported_tiles) return "area";
  return null;
}

export function exportEnabled(state: UiSessionState): boolean {
  return state.status === "ExportReady";
}
