/**
 * World (cm, y up) to canvas (px, y down) mapping.
 *
 * The scale is fixed once per session from the first snapshot's body
 * bounding box, padded so the robot can grow and sweep without leaving the
 * view; later snapshots never rescale the scene under the user's cursor.
 */

export interface Viewport {
  scalePxPerCm: number;
  offsetXPx: number;
  offsetYPx: number;
}

export interface Box {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

export function bodyBounds(body: [number, number][]): Box {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const [x, y] of body) {
    minX = Math.min(minX, x);
    minY = Math.min(minY, y);
    maxX = Math.max(maxX, x);
    maxY = Math.max(maxY, y);
  }
  if (!Number.isFinite(minX)) {
    return { minX: 0, minY: 0, maxX: 1, maxY: 1 };
  }
  return { minX, minY, maxX, maxY };
}

export function fitViewport(
  bounds: Box,
  canvasWidthPx: number,
  canvasHeightPx: number,
  paddingCm = 60,
): Viewport {
  const minX = bounds.minX - paddingCm;
  const maxX = bounds.maxX + 2 * paddingCm; // growth is mostly forward
  const minY = bounds.minY - paddingCm;
  const maxY = bounds.maxY + paddingCm;
  const scale = Math.min(canvasWidthPx / (maxX - minX), canvasHeightPx / (maxY - minY));
  return {
    scalePxPerCm: scale,
    offsetXPx: -minX * scale,
    offsetYPx: maxY * scale,
  };
}

export function worldToScreen(view: Viewport, xCm: number, yCm: number): [number, number] {
  return [xCm * view.scalePxPerCm + view.offsetXPx, view.offsetYPx - yCm * view.scalePxPerCm];
}

export function screenToWorld(view: Viewport, xPx: number, yPx: number): [number, number] {
  return [
    (xPx - view.offsetXPx) / view.scalePxPerCm,
    (view.offsetYPx - yPx) / view.scalePxPerCm,
  ];
}

/** Drag distance to touch force: linear, 20 px per newton, capped at 10 N. */
export const MAX_TOUCH_FORCE_N = 10;
export const DRAG_PX_PER_NEWTON = 20;

export function dragDistanceToForce(distancePx: number): number {
  const force = distancePx / DRAG_PX_PER_NEWTON;
  return Math.min(Math.max(force, 0), MAX_TOUCH_FORCE_N);
}
