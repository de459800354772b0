// Wire protocol: JSON text frames over the gateway websocket.
// Unknown fields are ignored on both sides for forward compatibility.

export type KeySymbol = string;

export interface Telemetry {
  t: number;
  session: string;
  est: boolean;
  stdEdge: boolean;
  latched: string | null; // MSB-first bits, e.g. "0110"
  left: string;
  right: string;
  motion: string;
  leftVolts: number;
  rightVolts: number;
  x: number;
  y: number;
  theta: number;
}

export interface Hello {
  role: "operator" | "observer";
  version: string;
  config: unknown;
}

export type ServerMessage =
  | { kind: "hello"; hello: Hello }
  | { kind: "telemetry"; telemetry: Telemetry }
  | { kind: "error"; message: string }
  | { kind: "config"; config: unknown }
  | { kind: "ignored" };

export function parseServerMessage(raw: string): ServerMessage | null {
  let msg: Record<string, unknown>;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null) return null;
  switch (msg.type) {
    case "hello":
      return {
        kind: "hello",
        hello: {
          role: msg.role === "operator" ? "operator" : "observer",
          version: String(msg.version ?? ""),
          config: msg.config,
        },
      };
    case "telemetry":
      return {
        kind: "telemetry",
        telemetry: {
          t: Number(msg.t),
          session: String(msg.session ?? ""),
          est: Boolean(msg.est),
          stdEdge: Boolean(msg.std_edge),
          latched: typeof msg.latched === "string" ? msg.latched : null,
          left: String(msg.left ?? "stop"),
          right: String(msg.right ?? "stop"),
          motion: String(msg.motion ?? "stop"),
          leftVolts: Number(msg.left_volts ?? 0),
          rightVolts: Number(msg.right_volts ?? 0),
          x: Number(msg.x ?? 0),
          y: Number(msg.y ?? 0),
          theta: Number(msg.theta ?? 0),
        },
      };
    case "error":
      return { kind: "error", message: String(msg.message ?? "unknown error") };
    case "config":
      return { kind: "config", config: msg.config };
    default:
      return { kind: "ignored" }; // unknown type: tolerated, not rendered
  }
}

/** Client -> server messages, each stamped with a monotonic sequence number. */
export class MessageWriter {
  private seq = 0;

  private stamp(body: Record<string, unknown>): string {
    this.seq += 1;
    return JSON.stringify({ ...body, seq: this.seq });
  }

  keyDown(key: KeySymbol): string {
    return this.stamp({ type: "key_down", key });
  }

  keyUp(key: KeySymbol): string {
    return this.stamp({ type: "key_up", key });
  }

  dial(): string {
    return this.stamp({ type: "dial" });
  }

  hangup(): string {
    return this.stamp({ type: "hangup" });
  }

  hello(): string {
    return this.stamp({ type: "hello" });
  }

  get lastSeq(): number {
    return this.seq;
  }
}
