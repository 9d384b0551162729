// Typed client for the chipchat service. Every endpoint used anywhere in
// the UI lives here; the API-contract test checks this list against the
// recorded service spec.

export interface LintFinding {
  code: string;
  severity: "Error" | "Warning" | "Info";
  message: string;
  line: number;
  col: number;
}

export interface AreaEstimate {
  cell_units: number;
  tiles: string;
  utilization: number;
  fits_supported_tiles: boolean;
}

export interface ValidationReport {
  depth: "quick" | "full";
  parse_ok: boolean;
  parse_errors: { kind: string; message: string; line: number; col: number }[];
  interface: { interface_ok: boolean; detected_top: string | null; findings: { code: string; message: string }[] } | null;
  lint: { synthesizable: boolean; findings: LintFinding[] } | null;
  sim_ok: boolean | null;
  sim_error: string | null;
  frame_digests: string[];
  area: AreaEstimate | null;
  sloc: number | null;
  functional_ok: boolean;
  tapeout_ok: boolean;
}

export interface TurnView {
  role: "user" | "agent" | "validator";
  text: string;
  failed?: boolean;
}

export interface RevisionView {
  revision: number;
  report: ValidationReport;
  source: string;
}

export interface SessionView {
  session_id: string;
  status: "Drafting" | "Valid" | "ExportReady";
  turns: TurnView[];
  revisions: RevisionView[];
}

export interface MessageResponse {
  reply: string;
  status: SessionView["status"];
  report?: ValidationReport;
  revision?: number;
  frames?: string[];
}

export interface RenderResponse {
  variant: string;
  digests: string[];
  frames: string[];
}

export interface ExportResponse {
  manifest: { top: string; tiles: string; revision: number; files: Record<string, string> };
  archive: string;
  status: SessionView["status"];
}

export interface Poke {
  cycle: number;
  name: string;
  value: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: Record<string, unknown>,
  ) {
    super(String(body.error ?? `HTTP ${status}`));
  }

  get retryGuidance(): string | undefined {
    return typeof this.body.retry === "string" ? this.body.retry : undefined;
  }

  get diagnosis(): string | undefined {
    return typeof this.body.diagnosis === "string" ? this.body.diagnosis : undefined;
  }
}

async function decode<T>(resp: Response): Promise<T> {
  const body = (await resp.json().catch(() => ({}))) as Record<string, unknown>;
  if (!resp.ok) throw new ApiError(resp.status, body);
  return body as T;
}

export class ChipchatClient {
  constructor(private base: string = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  async createSession(): Promise<string> {
    const body = await decode<{ session_id: string }>(
      await fetch(this.url("/api/sessions"), { method: "POST" }),
    );
    return body.session_id;
  }

  async getSession(sid: string): Promise<SessionView> {
    return decode(await fetch(this.url(`/api/sessions/${sid}`)));
  }

  async sendMessage(sid: string, text: string): Promise<MessageResponse> {
    return decode(
      await fetch(this.url(`/api/sessions/${sid}/messages`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ text }),
      }),
    );
  }

  async validate(source: string, depth: "quick" | "full" = "quick"): Promise<ValidationReport> {
    return decode(
      await fetch(this.url("/api/validate"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ source, depth }),
      }),
    );
  }

  frameUrl(sid: string, revision: number, n: number, ext: "png" | "ppm" = "png"): string {
    return this.url(`/api/sessions/${sid}/frames/${revision}/${n}.${ext}`);
  }

  async fetchFrame(sid: string, revision: number, n: number, ext: "png" | "ppm" = "png"): Promise<ArrayBuffer> {
    const resp = await fetch(this.frameUrl(sid, revision, n, ext));
    if (!resp.ok) throw new ApiError(resp.status, (await resp.json().catch(() => ({}))) as Record<string, unknown>);
    return resp.arrayBuffer();
  }

  async render(sid: string, revision: number, pokes: Poke[], frames = 3): Promise<RenderResponse> {
    return decode(
      await fetch(this.url(`/api/sessions/${sid}/revisions/${revision}/render`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ pokes, frames }),
      }),
    );
  }

  async exportSession(sid: string): Promise<ExportResponse> {
    return decode(await fetch(this.url(`/api/sessions/${sid}/export`), { method: "POST" }));
  }

  archiveUrl(sid: string): string {
    return this.url(`/api/sessions/${sid}/export/archive`);
  }
}

// method + path template for every call the client can make, for the
// API-contract test
export const USED_ENDPOINTS: [string, string][] = [
  ["post", "/api/sessions"],
  ["get", "/api/sessions/{sid}"],
  ["post", "/api/sessions/{sid}/messages"],
  ["post", "/api/validate"],
  ["get", "/api/sessions/{sid}/frames/{revision}/{frame}.png"],
  ["get", "/api/sessions/{sid}/frames/{revision}/{frame}.ppm"],
  ["get", "/api/sessions/{sid}/frames/{revision}/{variant}/{frame}.png"],
  ["post", "/api/sessions/{sid}/revisions/{revision}/render"],
  ["post", "/api/sessions/{sid}/export"],
  ["get", "/api/sessions/{sid}/export/archive"],
];
