// Top-down viewport math: fit the trace bounding box into the canvas and
// map world meters to screen pixels (y up in world, y down on screen).

import type { TracePoint } from "./telemetry.js";

export interface Transform {
  scale: number; // pixels per meter
  offsetX: number;
  offsetY: number;
}

const MIN_SPAN_M = 1.0; // never zoom tighter than a 1 m window
const PADDING_PX = 24;

export function fitTransform(
  points: TracePoint[],
  widthPx: number,
  heightPx: number,
): Transform {
  let minX = 0, maxX = 0, minY = 0, maxY = 0;
  if (points.length > 0) {
    minX = Math.min(...points.map((p) => p.x));
    maxX = Math.max(...points.map((p) => p.x));
    minY = Math.min(...points.map((p) => p.y));
    maxY = Math.max(...points.map((p) => p.y));
  }
  const cx = (minX + maxX) / 2;
  const cy = (minY + maxY) / 2;
  const spanX = Math.max(maxX - minX, MIN_SPAN_M);
  const spanY = Math.max(maxY - minY, MIN_SPAN_M);
  const usableW = Math.max(widthPx - 2 * PADDING_PX, 1);
  const usableH = Math.max(heightPx - 2 * PADDING_PX, 1);
  const scale = Math.min(usableW / spanX, usableH / spanY);
  return {
    scale,
    offsetX: widthPx / 2 - cx * scale,
    offsetY: heightPx / 2 + cy * scale,
  };
}

export function worldToScreen(
  t: Transform, x: number, y: number,
): [number, number] {
  return [t.offsetX + x * t.scale, t.offsetY - y * t.scale];
}

/** Draw the trace, the vehicle body, and its heading arrow. */
export function drawViewport(
  ctx: CanvasRenderingContext2D,
  widthPx: number,
  heightPx: number,
  trace: TracePoint[],
  pose: { x: number; y: number; theta: number } | null,
): void {
  ctx.clearRect(0, 0, widthPx, heightPx);
  ctx.fillStyle = "#10141c";
  ctx.fillRect(0, 0, widthPx, heightPx);
  const t = fitTransform(trace, widthPx, heightPx);

  // grid, pitch doubled until the line count stays sane on long traces
  ctx.strokeStyle = "#1c2433";
  ctx.lineWidth = 1;
  const worldLeft = (0 - t.offsetX) / t.scale;
  const worldRight = (widthPx - t.offsetX) / t.scale;
  const worldTop = (t.offsetY - 0) / t.scale;
  const worldBottom = (t.offsetY - heightPx) / t.scale;
  let pitch = 1;
  while ((worldRight - worldLeft) / pitch > 24) pitch *= 2;
  for (
    let gx = Math.floor(worldLeft / pitch) * pitch;
    gx <= worldRight;
    gx += pitch
  ) {
    const [sx] = worldToScreen(t, gx, 0);
    ctx.beginPath();
    ctx.moveTo(sx, 0);
    ctx.lineTo(sx, heightPx);
    ctx.stroke();
  }
  for (
    let gy = Math.floor(worldBottom / pitch) * pitch;
    gy <= worldTop;
    gy += pitch
  ) {
    const [, sy] = worldToScreen(t, 0, gy);
    ctx.beginPath();
    ctx.moveTo(0, sy);
    ctx.lineTo(widthPx, sy);
    ctx.stroke();
  }

  if (trace.length > 1) {
    ctx.strokeStyle = "#3fa7ff";
    ctx.lineWidth = 2;
    ctx.beginPath();
    trace.forEach((p, i) => {
      const [sx, sy] = worldToScreen(t, p.x, p.y);
      if (i === 0) ctx.moveTo(sx, sy);
      else ctx.lineTo(sx, sy);
    });
    ctx.stroke();
  }

  if (pose) {
    const [sx, sy] = worldToScreen(t, pose.x, pose.y);
    const r = 10;
    ctx.save();
    ctx.translate(sx, sy);
    ctx.rotate(-pose.theta); // screen y is flipped
    ctx.fillStyle = "#ffd24d";
    ctx.beginPath();
    ctx.moveTo(r * 1.4, 0);
    ctx.lineTo(-r * 0.8, r * 0.8);
    ctx.lineTo(-r * 0.8, -r * 0.8);
    ctx.closePath();
    ctx.fill();
    ctx.restore();
  }
}
