// Gateway connection: hello handshake, reconnect with backoff, and the
// synthetic key_up queued when the link drops mid-hold.

import { MessageWriter, parseServerMessage, ServerMessage } from "./protocol.js";

export type ConnectionState = "disconnected" | "observer" | "operator";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
}

export interface GatewayOptions {
  makeSocket: (url: string) => SocketLike;
  onMessage: (msg: ServerMessage) => void;
  onState: (state: ConnectionState) => void;
  reconnectDelayMs?: number;
  setTimer?: (fn: () => void, ms: number) => unknown;
}

export class GatewayConnection {
  state: ConnectionState = "disconnected";
  private socket: SocketLike | null = null;
  private writer = new MessageWriter();
  private pendingRelease: string | null = null;
  private closed = false;

  constructor(private url: string, private opts: GatewayOptions) {}

  connect(): void {
    this.closed = false;
    const ws = this.opts.makeSocket(this.url);
    this.socket = ws;
    ws.onopen = () => {
      ws.send(this.writer.hello());
      if (this.pendingRelease !== null) {
        // the previous connection dropped mid-hold; balance the ledger
        ws.send(this.writer.keyUp(this.pendingRelease));
        this.pendingRelease = null;
      }
    };
    ws.onmessage = (ev) => {
      const msg = parseServerMessage(ev.data);
      if (msg === null || msg.kind === "ignored") return;
      if (msg.kind === "hello") {
        this.state = msg.hello.role;
        this.opts.onState(this.state);
      }
      this.opts.onMessage(msg);
    };
    ws.onclose = () => {
      this.state = "disconnected";
      this.opts.onState(this.state);
      this.socket = null;
      if (!this.closed) {
        const delay = this.opts.reconnectDelayMs ?? 1000;
        const timer = this.opts.setTimer ?? setTimeout;
        timer(() => this.connect(), delay);
      }
    };
  }

  /** Note a key that went down on this link but never came back up. */
  markHeld(key: string | null): void {
    this.pendingRelease = key;
  }

  sendKeyDown(key: string): boolean {
    return this.send(this.writer.keyDown(key));
  }

  sendKeyUp(key: string): boolean {
    return this.send(this.writer.keyUp(key));
  }

  sendDial(): boolean {
    return this.send(this.writer.dial());
  }

  sendHangup(): boolean {
    return this.send(this.writer.hangup());
  }

  private send(data: string): boolean {
    if (this.socket === null || this.state === "disconnected") return false;
    this.socket.send(data);
    return true;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
