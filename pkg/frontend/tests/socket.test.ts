import { describe, expect, it } from "vitest";

import { GatewayConnection, SocketLike } from "../src/socket.js";
import type { ServerMessage } from "../src/protocol.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.onclose?.();
  }

  serverSays(obj: unknown): void {
    this.onmessage?.({ data: JSON.stringify(obj) });
  }
}

function harness() {
  const sockets: FakeSocket[] = [];
  const messages: ServerMessage[] = [];
  const states: string[] = [];
  const timers: (() => void)[] = [];
  const conn = new GatewayConnection("ws://test/ws", {
    makeSocket: () => {
      const s = new FakeSocket();
      sockets.push(s);
      return s;
    },
    onMessage: (m) => messages.push(m),
    onState: (s) => states.push(s),
    reconnectDelayMs: 1,
    setTimer: (fn) => {
      timers.push(fn);
      return 0;
    },
  });
  return { conn, sockets, messages, states, timers };
}

describe("gateway connection", () => {
  it("sends hello on open and adopts the granted role", () => {
    const { conn, sockets, states } = harness();
    conn.connect();
    const ws = sockets[0];
    ws.onopen?.();
    expect(JSON.parse(ws.sent[0]).type).toBe("hello");
    ws.serverSays({ type: "hello", seq: 1, role: "operator", version: "x" });
    expect(states).toContain("operator");
  });

  it("refuses to send while disconnected", () => {
    const { conn } = harness();
    expect(conn.sendKeyDown("6")).toBe(false);
  });

  it("queues a synthetic key_up for the reconnect after a mid-hold drop", () => {
    const { conn, sockets, timers } = harness();
    conn.connect();
    const first = sockets[0];
    first.onopen?.();
    first.serverSays({ type: "hello", seq: 1, role: "operator", version: "x" });
    expect(conn.sendKeyDown("6")).toBe(true);

    conn.markHeld("6"); // the app notices the drop mid-hold
    first.onclose?.();
    expect(timers.length).toBe(1);
    timers[0](); // reconnect fires
    const second = sockets[1];
    second.onopen?.();
    const types = second.sent.map((raw) => JSON.parse(raw));
    expect(types[0].type).toBe("hello");
    expect(types[1]).toMatchObject({ type: "key_up", key: "6" });
  });

  it("sequence numbers keep rising across reconnects", () => {
    const { conn, sockets, timers } = harness();
    conn.connect();
    sockets[0].onopen?.();
    sockets[0].onclose?.();
    timers[0]();
    sockets[1].onopen?.();
    const all = [...sockets[0].sent, ...sockets[1].sent].map(
      (raw) => JSON.parse(raw).seq,
    );
    const sorted = [...all].sort((a, b) => a - b);
    expect(all).toEqual(sorted);
    expect(new Set(all).size).toBe(all.length);
  });

  it("close() stops the reconnect loop", () => {
    const { conn, sockets, timers } = harness();
    conn.connect();
    sockets[0].onopen?.();
    conn.close();
    expect(timers.length).toBe(0);
  });

  it("passes errors and telemetry through to the app", () => {
    const { conn, sockets, messages } = harness();
    conn.connect();
    const ws = sockets[0];
    ws.onopen?.();
    ws.serverSays({ type: "error", seq: 1, message: "observer may not command" });
    ws.serverSays({ type: "wat", seq: 2 });
    expect(messages).toEqual([
      { kind: "error", message: "observer may not command" },
    ]);
  });
});
