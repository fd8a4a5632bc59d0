// ChatChannel behavior against a scripted fake socket: seq stamping,
// outgoing validation, reconnect with pending-frame flush.

import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import { describe, expect, it, vi } from "vitest";

import { ChatChannel, WebSocketLike } from "../src/channel.js";
import { WireSchema } from "../src/protocol.js";

const schema = new WireSchema(
  JSON.parse(
    readFileSync(resolve(__dirname, "../../schema/wire_schema.json"), "utf-8"),
  ),
);

class FakeSocket implements WebSocketLike {
  onopen: ((event?: unknown) => void) | null = null;
  onmessage: ((event: { data: unknown }) => void) | null = null;
  onclose: ((event?: unknown) => void) | null = null;
  onerror: ((event?: unknown) => void) | null = null;
  sent: string[] = [];
  closed = false;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
  }

  open(): void {
    this.onopen?.();
  }

  pushFrame(frame: unknown): void {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }
}

function makeChannel() {
  const sockets: FakeSocket[] = [];
  const channel = new ChatChannel({
    baseUrl: "ws://test",
    sessionId: "s1",
    role: "wizard",
    token: "tok",
    schema,
    socketFactory: () => {
      const socket = new FakeSocket();
      sockets.push(socket);
      return socket;
    },
    reconnectDelayMs: 1,
  });
  return { channel, sockets };
}

describe("ChatChannel", () => {
  it("stamps monotone seq numbers and the session id", () => {
    const { channel, sockets } = makeChannel();
    channel.connect();
    sockets[0].open();
    const first = channel.send({ type: "search", terms: ["x"] });
    const second = channel.send({ type: "filter", stance: "pro" });
    expect([first, second]).toEqual([1, 2]);
    const frames = sockets[0].sent.map((raw) => JSON.parse(raw));
    expect(frames[0]).toMatchObject({ type: "search", seq: 1, session_id: "s1" });
    expect(frames[1]).toMatchObject({ type: "filter", seq: 2 });
  });

  it("refuses frames the shared schema rejects", () => {
    const { channel, sockets } = makeChannel();
    channel.connect();
    sockets[0].open();
    expect(() => channel.send({ type: "utterance", text: "" })).toThrow(/invalid client frame/);
    expect(sockets[0].sent).toHaveLength(0);
  });

  it("dispatches frames by type", () => {
    const { channel, sockets } = makeChannel();
    const seen: string[] = [];
    channel.on("suggestions", (frame) => seen.push(frame.type));
    channel.on("*", (frame) => seen.push(`*${frame.type}`));
    channel.connect();
    sockets[0].open();
    sockets[0].pushFrame({ type: "suggestions", items: [] });
    expect(seen).toEqual(["suggestions", "*suggestions"]);
  });

  it("reconnects after a drop and flushes frames queued meanwhile", async () => {
    vi.useFakeTimers();
    try {
      const { channel, sockets } = makeChannel();
      channel.connect();
      sockets[0].open();
      sockets[0].onclose?.(); // server drop, not closedByUs
      channel.send({ type: "filter", stance: "con" }); // queued while offline
      await vi.advanceTimersByTimeAsync(5);
      expect(sockets).toHaveLength(2);
      sockets[1].open();
      expect(sockets[1].sent.map((raw) => JSON.parse(raw).type)).toEqual(["filter"]);
    } finally {
      vi.useRealTimers();
    }
  });

  it("does not reconnect after an intentional close", async () => {
    vi.useFakeTimers();
    try {
      const { channel, sockets } = makeChannel();
      channel.connect();
      sockets[0].open();
      channel.close();
      sockets[0].onclose?.();
      await vi.advanceTimersByTimeAsync(10);
      expect(sockets).toHaveLength(1);
    } finally {
      vi.useRealTimers();
    }
  });
});
