// Client-side telemetry mirror. The UI derives nothing: every displayed
// value comes straight off the latest snapshot; this store only keeps the
// bounded pose trace and the staleness clock around it.

import type { Telemetry } from "./protocol.js";

export const TRACE_LIMIT = 2000;
export const STALE_AFTER_MS = 1000;

export interface TracePoint {
  x: number;
  y: number;
}

export class TelemetryStore {
  latest: Telemetry | null = null;
  trace: TracePoint[] = [];
  private lastUpdateMs = -Infinity;
  private stdFlashUntilMs = -Infinity;

  update(snapshot: Telemetry, nowMs: number): void {
    this.latest = snapshot;
    this.lastUpdateMs = nowMs;
    if (snapshot.stdEdge) this.stdFlashUntilMs = nowMs + 300;
    const last = this.trace[this.trace.length - 1];
    if (!last || last.x !== snapshot.x || last.y !== snapshot.y) {
      this.trace.push({ x: snapshot.x, y: snapshot.y });
      if (this.trace.length > TRACE_LIMIT) {
        this.trace.splice(0, this.trace.length - TRACE_LIMIT);
      }
    }
  }

  isStale(nowMs: number): boolean {
    return nowMs - this.lastUpdateMs > STALE_AFTER_MS;
  }

  stdFlashing(nowMs: number): boolean {
    return nowMs < this.stdFlashUntilMs;
  }

  clear(): void {
    this.latest = null;
    this.trace = [];
    this.lastUpdateMs = -Infinity;
    this.stdFlashUntilMs = -Infinity;
  }
}

export const MOTION_LABELS: Record<string, string> = {
  forward: "Forward",
  reverse: "Reverse",
  left: "Left",
  right: "Right",
  stop: "Stop",
  spin_left: "Spin left",
  spin_right: "Spin right",
  mixed: "Mixed",
};

/** "0110" -> [0, 1, 1, 0]; null -> all-null placeholders. */
export function latchedBits(latched: string | null): (0 | 1 | null)[] {
  if (latched === null || !/^[01]{4}$/.test(latched)) {
    return [null, null, null, null];
  }
  return latched.split("").map((b) => (b === "1" ? 1 : 0)) as (0 | 1)[];
}
