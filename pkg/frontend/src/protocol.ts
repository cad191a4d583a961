// Typed client for the lab server.  All rewriting happens server-side;
// this module only moves JSON.  The WebSocket constructor is injectable
// so tests can run outside a browser.

import type {
  CreateSessionRequest,
  LibraryEntry,
  QuineProfile,
  QuineVerdict,
  Snapshot,
  StreamEvent,
} from "./types.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((data: string) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => Promise<SocketLike>;

const browserSocketFactory: SocketFactory = (url) =>
  new Promise((resolve, reject) => {
    const ws = new WebSocket(url);
    const like: SocketLike = {
      send: (data) => ws.send(data),
      close: () => ws.close(),
      onmessage: null,
      onclose: null,
    };
    ws.onmessage = (ev) => like.onmessage?.(String(ev.data));
    ws.onclose = () => like.onclose?.();
    ws.onopen = () => resolve(like);
    ws.onerror = () => reject(new Error(`websocket failed: ${url}`));
  });

export class ServerError extends Error {
  constructor(public code: string, message: string) {
    super(`${code}: ${message}`);
  }
}

export class LabClient {
  session: string | null = null;

  constructor(
    readonly baseUrl: string,
    private socketFactory: SocketFactory = browserSocketFactory,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    if (!response.ok) {
      try {
        const payload = JSON.parse(text);
        throw new ServerError(payload.error.code, payload.error.message);
      } catch (err) {
        if (err instanceof ServerError) throw err;
        throw new ServerError("Http" + response.status, text.slice(0, 200));
      }
    }
    const kind = response.headers.get("content-type") ?? "";
    return (kind.includes("application/json") ? JSON.parse(text) : text) as T;
  }

  // -- library -------------------------------------------------------------

  async library(): Promise<LibraryEntry[]> {
    const out = await this.request<{ entries: LibraryEntry[] }>("GET", "/api/library");
    return out.entries;
  }

  libraryEntry(id: string): Promise<LibraryEntry> {
    return this.request("GET", `/api/library/${id}`);
  }

  // -- sessions ------------------------------------------------------------

  async createSession(body: CreateSessionRequest): Promise<Snapshot> {
    const snap = await this.request<Snapshot>("POST", "/api/session", body);
    this.session = snap.session;
    return snap;
  }

  private sessionPath(op: string): string {
    if (!this.session) throw new ServerError("NoSession", "create a session first");
    return `/api/session/${this.session}/${op}`;
  }

  step(n = 1): Promise<Snapshot> {
    return this.request("POST", this.sessionPath("step"), { n });
  }

  run(steps?: number, delay = 0.02): Promise<Snapshot> {
    return this.request("POST", this.sessionPath("run"), { steps, delay });
  }

  pause(): Promise<Snapshot> {
    return this.request("POST", this.sessionPath("pause"), {});
  }

  setWeights(weights: Record<string, number>): Promise<Snapshot> {
    return this.request("POST", this.sessionPath("weights"), { weights });
  }

  fire(match: string): Promise<Snapshot> {
    return this.request("POST", this.sessionPath("fire"), { match });
  }

  snapshot(): Promise<Snapshot> {
    return this.request("GET", this.sessionPath("snapshot"));
  }

  trace(): Promise<string> {
    return this.request("GET", this.sessionPath("trace"));
  }

  async waitStopped(timeoutMs = 30000): Promise<Snapshot> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const snap = await this.snapshot();
      if (!snap.running) return snap;
      if (Date.now() > deadline) throw new ServerError("Timeout", "still running");
      await new Promise((r) => setTimeout(r, 20));
    }
  }

  // -- one-shot tools --------------------------------------------------------

  quineExact(body: CreateSessionRequest & { limit?: number }): Promise<QuineVerdict> {
    return this.request("POST", "/api/quine", { ...body, exact: true });
  }

  quineEmpirical(
    body: CreateSessionRequest & { trials?: number; steps?: number },
  ): Promise<QuineProfile> {
    return this.request("POST", "/api/quine", { ...body, exact: false });
  }

  async egg(types: string[], chem: string, seed: number, count = 1): Promise<string[]> {
    const out = await this.request<{ mols: string[] }>("POST", "/api/egg", {
      types,
      chem,
      seed,
      count,
    });
    return out.mols;
  }

  async lambda2mol(term: string, fanout = "FO"): Promise<string> {
    const out = await this.request<{ mol: string }>("POST", "/api/lambda2mol", {
      term,
      fanout,
    });
    return out.mol;
  }

  // -- streaming -------------------------------------------------------------

  async openStream(
    onEvent: (event: StreamEvent) => void,
  ): Promise<{ send(command: object): void; close(): void }> {
    if (!this.session) throw new ServerError("NoSession", "create a session first");
    const wsUrl =
      this.baseUrl.replace(/^http/, "ws") + `/ws/session/${this.session}`;
    const socket = await this.socketFactory(wsUrl);
    socket.onmessage = (data) => onEvent(JSON.parse(data) as StreamEvent);
    return {
      send: (command) => socket.send(JSON.stringify(command)),
      close: () => socket.close(),
    };
  }
}

// A seeded command script, the same shape the CLI `chemgraph script`
// command consumes.  Driving it through this client is the "UI path".
export type ScriptCommand =
  | ({ op: "create" } & CreateSessionRequest)
  | { op: "step"; n?: number }
  | { op: "run"; steps?: number; delay?: number }
  | { op: "pause" }
  | { op: "weights"; weights: Record<string, number> }
  | { op: "fire"; match: string };

export async function runScript(
  client: LabClient,
  commands: ScriptCommand[],
): Promise<string> {
  for (const command of commands) {
    if (command.op === "create") {
      const { op, ...body } = command;
      await client.createSession(body);
    } else if (command.op === "step") {
      await client.step(command.n ?? 1);
    } else if (command.op === "run") {
      await client.run(command.steps, command.delay ?? 0.02);
      await client.waitStopped();
    } else if (command.op === "pause") {
      await client.pause();
    } else if (command.op === "weights") {
      await client.setWeights(command.weights);
    } else {
      await client.fire(command.match);
    }
  }
  return client.trace();
}
