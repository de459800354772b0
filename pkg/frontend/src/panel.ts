// Decoder-internals panel. Pure DOM updates from the latest snapshot;
// nothing here recomputes decoder state.

import { latchedBits, MOTION_LABELS, TelemetryStore } from "./telemetry.js";
import type { ConnectionState } from "./socket.js";

function text(id: string, value: string): void {
  const el = document.getElementById(id);
  if (el && el.textContent !== value) el.textContent = value;
}

function flag(id: string, on: boolean, cls = "on"): void {
  document.getElementById(id)?.classList.toggle(cls, on);
}

export function renderPanel(store: TelemetryStore, nowMs: number): void {
  const panel = document.getElementById("panel");
  if (!panel) return;
  panel.classList.toggle("stale", store.isStale(nowMs));
  const snap = store.latest;
  if (!snap) return;

  text("session-phase", snap.session);
  flag("est-lamp", snap.est);
  flag("std-lamp", store.stdFlashing(nowMs));

  const bits = latchedBits(snap.latched);
  bits.forEach((bit, i) => {
    text(`bit-${i}`, bit === null ? "-" : String(bit));
  });

  text("left-action", snap.left);
  text("right-action", snap.right);
  text("left-volts", `${snap.leftVolts.toFixed(2)} V`);
  text("right-volts", `${snap.rightVolts.toFixed(2)} V`);
  text("motion-label", MOTION_LABELS[snap.motion] ?? snap.motion);
  text(
    "pose-readout",
    `x ${snap.x.toFixed(2)} m   y ${snap.y.toFixed(2)} m   ` +
      `heading ${((snap.theta * 180) / Math.PI).toFixed(0)} deg`,
  );
}

export function renderConnection(state: ConnectionState): void {
  text("connection-state", state);
  const banner = document.getElementById("observer-banner");
  banner?.classList.toggle("hidden", state !== "observer");
  document.getElementById("app")?.classList.toggle(
    "disconnected", state === "disconnected",
  );
}

export function showError(message: string): void {
  const el = document.getElementById("error-banner");
  if (!el) return;
  el.textContent = message;
  el.classList.remove("hidden");
  setTimeout(() => el.classList.add("hidden"), 4000);
}
