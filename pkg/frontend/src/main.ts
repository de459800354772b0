// Wiring: socket <-> keypad <-> stores <-> render loop.

import { KeypadController, KEYPAD_LAYOUT, KeyEmission } from "./keypad.js";
import { renderConnection, renderPanel, showError } from "./panel.js";
import { GatewayConnection } from "./socket.js";
import { TelemetryStore } from "./telemetry.js";
import { drawViewport } from "./viewport.js";

const store = new TelemetryStore();
const keypad = new KeypadController();

function wsUrl(): string {
  const proto = location.protocol === "https:" ? "wss:" : "ws:";
  return `${proto}//${location.host}/ws`;
}

const gateway = new GatewayConnection(wsUrl(), {
  makeSocket: (url) => new WebSocket(url) as unknown as import("./socket.js").SocketLike,
  onMessage: (msg) => {
    if (msg.kind === "telemetry") {
      store.update(msg.telemetry, performance.now());
    } else if (msg.kind === "error") {
      showError(msg.message);
    }
  },
  onState: (state) => {
    renderConnection(state);
    if (state === "disconnected") {
      // pointer state survives a dropped link; queue the balancing key_up
      const pending = keypad.heldKey;
      for (const em of keypad.forceRelease()) void em;
      gateway.markHeld(pending);
      highlightHeld();
    }
  },
});

function emit(emissions: KeyEmission[]): void {
  for (const em of emissions) {
    const ok = em.kind === "down"
      ? gateway.sendKeyDown(em.key)
      : gateway.sendKeyUp(em.key);
    if (!ok && em.kind === "down") {
      // not sent (observer or dead link): undo the local hold
      keypad.forceRelease();
    }
  }
  highlightHeld();
}

function highlightHeld(): void {
  document.querySelectorAll<HTMLButtonElement>("#keypad button").forEach((b) => {
    b.classList.toggle("held", b.dataset.key === keypad.heldKey);
  });
}

function buildKeypad(): void {
  const host = document.getElementById("keypad");
  if (!host) return;
  for (const row of KEYPAD_LAYOUT) {
    for (const key of row) {
      const btn = document.createElement("button");
      btn.textContent = key;
      btn.dataset.key = key;
      btn.addEventListener("pointerdown", (ev) => {
        ev.preventDefault();
        btn.setPointerCapture(ev.pointerId);
        emit(keypad.press(key));
      });
      const release = () => emit(keypad.release(key));
      btn.addEventListener("pointerup", release);
      btn.addEventListener("pointercancel", release);
      host.appendChild(btn);
    }
  }
}

function bindKeyboard(): void {
  window.addEventListener("keydown", (ev) => {
    if (ev.repeat) return;
    if (/^[0-9]$/.test(ev.key)) emit(keypad.press(ev.key));
  });
  window.addEventListener("keyup", (ev) => {
    if (/^[0-9]$/.test(ev.key)) emit(keypad.release(ev.key));
  });
  window.addEventListener("blur", () => emit(keypad.forceRelease()));
}

function bindControls(): void {
  document.getElementById("dial-btn")?.addEventListener("click", () => {
    gateway.sendDial();
  });
  document.getElementById("hangup-btn")?.addEventListener("click", () => {
    emit(keypad.forceRelease());
    gateway.sendHangup();
  });
  const tap = document.getElementById("tap-latch") as HTMLInputElement | null;
  tap?.addEventListener("change", () => emit(keypad.setTapLatch(tap.checked)));
}

function renderLoop(): void {
  const canvas = document.getElementById("viewport") as HTMLCanvasElement | null;
  const ctx = canvas?.getContext("2d") ?? null;
  const frame = () => {
    const now = performance.now();
    renderPanel(store, now);
    if (canvas && ctx) {
      const rect = canvas.getBoundingClientRect();
      if (canvas.width !== rect.width || canvas.height !== rect.height) {
        canvas.width = rect.width;
        canvas.height = rect.height;
      }
      const pose = store.latest
        ? { x: store.latest.x, y: store.latest.y, theta: store.latest.theta }
        : null;
      drawViewport(ctx, canvas.width, canvas.height, store.trace, pose);
    }
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

buildKeypad();
bindKeyboard();
bindControls();
renderLoop();
gateway.connect();
