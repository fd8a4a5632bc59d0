// WebSocket chat channel: one connection per tab, monotone seq numbers,
// outgoing-frame validation, and reconnect that resumes with the same
// session token (the server supersedes the stale connection).

import { ClientFrame, ServerFrame, WireSchema } from "./protocol.js";

export interface WebSocketLike {
  onopen: ((event?: unknown) => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: ((event?: unknown) => void) | null;
  onerror: ((event?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => WebSocketLike;

export interface ChannelOptions {
  baseUrl: string; // e.g. "ws://localhost:8000"
  sessionId: string;
  role: "participant" | "wizard";
  token: string;
  schema: WireSchema;
  socketFactory: SocketFactory;
  reconnectDelayMs?: number;
  maxReconnects?: number;
}

type Handler = (frame: ServerFrame) => void;

export class ChatChannel {
  private socket: WebSocketLike | null = null;
  private seq = 0;
  private reconnects = 0;
  private closedByUs = false;
  private handlers = new Map<string, Set<Handler>>();
  private pending: string[] = [];

  constructor(private readonly options: ChannelOptions) {}

  url(): string {
    const { baseUrl, sessionId, role, token } = this.options;
    return `${baseUrl}/sessions/${sessionId}/chat?role=${role}&token=${encodeURIComponent(token)}`;
  }

  connect(): void {
    this.closedByUs = false;
    const socket = this.options.socketFactory(this.url());
    this.socket = socket;

    socket.onopen = () => {
      this.reconnects = 0;
      for (const raw of this.pending.splice(0)) socket.send(raw);
    };
    socket.onmessage = (event) => {
      let frame: ServerFrame;
      try {
        frame = JSON.parse(String(event.data));
      } catch {
        return; // not JSON: ignore rather than crash the tab
      }
      this.dispatch(frame);
    };
    socket.onerror = () => {
      // onclose follows; reconnect is handled there
    };
    socket.onclose = () => {
      if (this.socket !== socket) return; // superseded by a newer connect
      this.socket = null;
      if (this.closedByUs) return;
      const max = this.options.maxReconnects ?? 10;
      if (this.reconnects >= max) return;
      this.reconnects += 1;
      setTimeout(() => this.connect(), this.options.reconnectDelayMs ?? 1000);
    };
  }

  close(): void {
    this.closedByUs = true;
    this.socket?.close();
    this.socket = null;
  }

  on(type: ServerFrame["type"] | "*", handler: Handler): void {
    if (!this.handlers.has(type)) this.handlers.set(type, new Set());
    this.handlers.get(type)!.add(handler);
  }

  private dispatch(frame: ServerFrame): void {
    for (const handler of this.handlers.get(frame.type) ?? []) handler(frame);
    for (const handler of this.handlers.get("*") ?? []) handler(frame);
  }

  /** Validate against the shared schema, stamp seq, send. Returns the seq. */
  send(frame: ClientFrame): number {
    const seq = ++this.seq;
    const stamped = { ...frame, seq, session_id: this.options.sessionId };
    this.options.schema.assertValid(stamped as Record<string, unknown>, "client");
    const raw = JSON.stringify(stamped);
    if (this.socket) {
      this.socket.send(raw);
    } else {
      this.pending.push(raw); // flushed on (re)connect
    }
    return seq;
  }
}

// ---------------------------------------------------------------------------
// Session HTTP endpoints
// ---------------------------------------------------------------------------

export interface CreatedSession {
  session_id: string;
  wizard_token: string;
  participant_token: string;
}

export interface QuestionnairePayload {
  good_reasons: number;
  intellect: [number, number, number];
  morality: [number, number, number];
}

export class SessionApi {
  constructor(
    private readonly httpBase: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async post(path: string, body: unknown): Promise<any> {
    const response = await this.fetchFn(`${this.httpBase}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new Error(`${path} failed (${response.status}): ${payload.detail ?? payload.error}`);
    }
    return payload;
  }

  createSession(topic: string, mode: string): Promise<CreatedSession> {
    return this.post("/sessions", { topic, mode });
  }

  submitPre(
    sessionId: string,
    token: string,
    stance: string,
    response: QuestionnairePayload,
  ): Promise<{ phase: string }> {
    return this.post(
      `/sessions/${sessionId}/pre?token=${encodeURIComponent(token)}`,
      { stance, response },
    );
  }

  submitPost(
    sessionId: string,
    token: string,
    response: QuestionnairePayload,
    experience: Record<string, number> | null,
  ): Promise<{ phase: string }> {
    return this.post(
      `/sessions/${sessionId}/post?token=${encodeURIComponent(token)}`,
      { response, experience },
    );
  }

  async exportSession(sessionId: string): Promise<any> {
    const response = await this.fetchFn(`${this.httpBase}/sessions/${sessionId}/export`);
    if (!response.ok) throw new Error(`export failed (${response.status})`);
    return response.json();
  }
}
