import { describe, expect, it } from "vitest";

import type { Telemetry } from "../src/protocol.js";
import {
  latchedBits,
  MOTION_LABELS,
  TelemetryStore,
  TRACE_LIMIT,
} from "../src/telemetry.js";

function snap(overrides: Partial<Telemetry> = {}): Telemetry {
  return {
    t: 0.02,
    session: "connected",
    est: false,
    stdEdge: false,
    latched: null,
    left: "stop",
    right: "stop",
    motion: "stop",
    leftVolts: 0.09,
    rightVolts: 0.09,
    x: 0,
    y: 0,
    theta: 0,
    ...overrides,
  };
}

describe("telemetry store", () => {
  it("mirrors the latest snapshot without recomputing anything", () => {
    const store = new TelemetryStore();
    const s = snap({ latched: "0110", motion: "forward" });
    store.update(s, 100);
    expect(store.latest).toBe(s);
  });

  it("appends moving poses to the trace and skips repeats", () => {
    const store = new TelemetryStore();
    store.update(snap({ x: 0, y: 0 }), 0);
    store.update(snap({ x: 0, y: 0 }), 20);
    store.update(snap({ x: 0.01, y: 0 }), 40);
    expect(store.trace.length).toBe(2);
  });

  it("bounds the trace", () => {
    const store = new TelemetryStore();
    for (let i = 0; i < TRACE_LIMIT + 500; i++) {
      store.update(snap({ x: i * 0.001 }), i);
    }
    expect(store.trace.length).toBe(TRACE_LIMIT);
    expect(store.trace[TRACE_LIMIT - 1].x).toBeCloseTo((TRACE_LIMIT + 499) * 0.001);
  });

  it("a halted vehicle stops growing the trace", () => {
    const store = new TelemetryStore();
    store.update(snap({ x: 0.1, motion: "forward" }), 0);
    const len = store.trace.length;
    for (let i = 1; i <= 10; i++) {
      store.update(snap({ x: 0.1, motion: "stop" }), i * 20);
    }
    expect(store.trace.length).toBe(len);
  });

  it("goes stale after a second without messages", () => {
    const store = new TelemetryStore();
    store.update(snap(), 1000);
    expect(store.isStale(1900)).toBe(false);
    expect(store.isStale(2001)).toBe(true);
  });

  it("fresh store is stale", () => {
    expect(new TelemetryStore().isStale(0)).toBe(true);
  });

  it("StD edge flashes briefly", () => {
    const store = new TelemetryStore();
    store.update(snap({ stdEdge: true }), 500);
    expect(store.stdFlashing(600)).toBe(true);
    expect(store.stdFlashing(900)).toBe(false);
  });
});

describe("panel helpers", () => {
  it("splits latched bits MSB first", () => {
    expect(latchedBits("0110")).toEqual([0, 1, 1, 0]);
    expect(latchedBits("1001")).toEqual([1, 0, 0, 1]);
  });

  it("placeholder bits when nothing latched", () => {
    expect(latchedBits(null)).toEqual([null, null, null, null]);
    expect(latchedBits("10")).toEqual([null, null, null, null]);
  });

  it("labels every motion the service can report", () => {
    for (const motion of [
      "forward", "reverse", "left", "right", "stop",
      "spin_left", "spin_right", "mixed",
    ]) {
      expect(MOTION_LABELS[motion]).toBeTruthy();
    }
    expect(MOTION_LABELS.forward).toBe("Forward");
  });
});
