import { describe, expect, it } from "vitest";

import {
  bodyBounds,
  dragDistanceToForce,
  fitViewport,
  MAX_TOUCH_FORCE_N,
  screenToWorld,
  worldToScreen,
} from "../src/transform.js";

describe("viewport", () => {
  const view = fitViewport({ minX: 0, minY: -20, maxX: 110, maxY: 20 }, 900, 600);

  it("round-trips world and screen coordinates", () => {
    for (const [x, y] of [
      [0, 0],
      [110, 20],
      [42.5, -13.75],
    ]) {
      const [sx, sy] = worldToScreen(view, x, y);
      const [wx, wy] = screenToWorld(view, sx, sy);
      expect(wx).toBeCloseTo(x, 9);
      expect(wy).toBeCloseTo(y, 9);
    }
  });

  it("flips the y axis (world up is screen up, so smaller pixel y)", () => {
    const [, syLow] = worldToScreen(view, 0, -10);
    const [, syHigh] = worldToScreen(view, 0, 10);
    expect(syHigh).toBeLessThan(syLow);
  });

  it("keeps the padded bounds inside the canvas", () => {
    for (const [x, y] of [
      [0, -20],
      [110, 20],
    ]) {
      const [sx, sy] = worldToScreen(view, x, y);
      expect(sx).toBeGreaterThanOrEqual(0);
      expect(sx).toBeLessThanOrEqual(900);
      expect(sy).toBeGreaterThanOrEqual(0);
      expect(sy).toBeLessThanOrEqual(600);
    }
  });

  it("computes bounds of a polyline", () => {
    expect(
      bodyBounds([
        [0, 0],
        [5, -3],
        [2, 7],
      ]),
    ).toEqual({ minX: 0, minY: -3, maxX: 5, maxY: 7 });
  });
});

describe("dragDistanceToForce", () => {
  it("maps drag distance linearly and clamps to the maximum", () => {
    expect(dragDistanceToForce(0)).toBe(0);
    expect(dragDistanceToForce(20)).toBeCloseTo(1.0);
    expect(dragDistanceToForce(100)).toBeCloseTo(5.0);
    expect(dragDistanceToForce(100000)).toBe(MAX_TOUCH_FORCE_N);
  });
});
