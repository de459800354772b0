import { describe, expect, it } from "vitest";

import { fitTransform, worldToScreen } from "../src/viewport.js";

describe("viewport transform", () => {
  it("centers the origin in an empty scene", () => {
    const t = fitTransform([], 800, 600);
    expect(worldToScreen(t, 0, 0)).toEqual([400, 300]);
  });

  it("keeps a minimum zoom window so the start is not a point blowup", () => {
    const t = fitTransform([{ x: 0, y: 0 }], 800, 600);
    // 1 m window in 600-48 px of height
    expect(t.scale).toBeLessThanOrEqual(600 - 48);
    expect(t.scale).toBeGreaterThan(100);
  });

  it("fits the trace bounding box with padding", () => {
    const trace = [
      { x: -2, y: -1 },
      { x: 6, y: 3 },
    ];
    const t = fitTransform(trace, 800, 600);
    for (const p of trace) {
      const [sx, sy] = worldToScreen(t, p.x, p.y);
      expect(sx).toBeGreaterThanOrEqual(0);
      expect(sx).toBeLessThanOrEqual(800);
      expect(sy).toBeGreaterThanOrEqual(0);
      expect(sy).toBeLessThanOrEqual(600);
    }
  });

  it("world +y maps to screen up", () => {
    const t = fitTransform([], 800, 600);
    const [, atOrigin] = worldToScreen(t, 0, 0);
    const [, above] = worldToScreen(t, 0, 1);
    expect(above).toBeLessThan(atOrigin);
  });

  it("meters are square pixels", () => {
    const t = fitTransform([{ x: 0, y: 0 }, { x: 3, y: 2 }], 800, 600);
    const [x0] = worldToScreen(t, 0, 0);
    const [x1] = worldToScreen(t, 1, 0);
    const [, y0] = worldToScreen(t, 0, 0);
    const [, y1] = worldToScreen(t, 0, 1);
    expect(Math.abs(x1 - x0)).toBeCloseTo(Math.abs(y0 - y1));
  });
});
