/**
 * Canvas drawing. Renders exactly what the scene derivation produced: body
 * polyline to scale, side-attached pocket capsules in their scene colors,
 * the state label/timer, counters, and the pending-command tray.
 */

import { UNEXPOSED_COLOR } from "./colorscale.js";
import { PendingCommand, Scene } from "./viewmodel.js";
import { Viewport, worldToScreen } from "./transform.js";

const BODY_COLOR = "#d8dee9";
const BODY_WIDTH_CM = 3.0;
const POCKET_WIDTH_CM = 2.2;
const POCKET_OFFSET_CM = 2.8; // capsule centerline offset from the body axis

function strokePolyline(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  points: [number, number][],
  color: string,
  widthPx: number,
): void {
  if (points.length < 2) return;
  ctx.beginPath();
  const [x0, y0] = worldToScreen(view, points[0][0], points[0][1]);
  ctx.moveTo(x0, y0);
  for (let i = 1; i < points.length; i += 1) {
    const [x, y] = worldToScreen(view, points[i][0], points[i][1]);
    ctx.lineTo(x, y);
  }
  ctx.strokeStyle = color;
  ctx.lineWidth = widthPx;
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  ctx.stroke();
}

/** Offset a run of body samples sideways to form a pocket capsule path. */
export function pocketPath(
  body: [number, number][],
  startIndex: number,
  endIndex: number,
  side: "left" | "right",
  offsetCm: number = POCKET_OFFSET_CM,
): [number, number][] {
  const sign = side === "left" ? 1 : -1;
  const path: [number, number][] = [];
  for (let i = startIndex; i <= endIndex && i < body.length; i += 1) {
    const prev = body[Math.max(i - 1, 0)];
    const next = body[Math.min(i + 1, body.length - 1)];
    const tx = next[0] - prev[0];
    const ty = next[1] - prev[1];
    const norm = Math.hypot(tx, ty) || 1;
    // left normal of the tangent, flipped for right-side pockets
    path.push([
      body[i][0] + (sign * -ty * offsetCm) / norm,
      body[i][1] + (sign * tx * offsetCm) / norm,
    ]);
  }
  return path;
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  scene: Scene,
  pending: PendingCommand[],
  banner: string | null,
  status: string,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#1b1f27";
  ctx.fillRect(0, 0, width, height);

  strokePolyline(ctx, view, scene.body, BODY_COLOR, BODY_WIDTH_CM * view.scalePxPerCm);

  for (const pocket of scene.pockets) {
    if (pocket.endIndex <= pocket.startIndex) continue;
    const path = pocketPath(scene.body, pocket.startIndex, pocket.endIndex, pocket.side);
    const color = pocket.exposedFraction > 0 ? pocket.color : UNEXPOSED_COLOR;
    strokePolyline(ctx, view, path, color, POCKET_WIDTH_CM * view.scalePxPerCm);
  }

  ctx.fillStyle = "#e5e9f0";
  ctx.font = "16px system-ui, sans-serif";
  ctx.fillText(`state: ${scene.stateLabel}  (${scene.stateSeconds.toFixed(1)} s)`, 12, 24);
  ctx.fillText(`t = ${scene.time.toFixed(2)} s`, 12, 44);
  ctx.fillText(
    `actuators L ${scene.actuators.left.toFixed(2)} / R ${scene.actuators.right.toFixed(2)}`,
    12,
    64,
  );
  ctx.fillText(
    `frames ${scene.counters.frames}  dropped ${scene.counters.dropped}  [${status}]`,
    12,
    84,
  );

  let y = 108;
  for (const cmd of pending.slice(-5)) {
    ctx.fillStyle =
      cmd.status === "acked" ? "#a3be8c" : cmd.status === "pending" ? "#ebcb8b" : "#bf616a";
    ctx.fillText(`${cmd.req}: ${cmd.status}${cmd.error ? ` (${cmd.error})` : ""}`, 12, y);
    y += 18;
  }

  if (banner) {
    ctx.fillStyle = "#bf616a";
    ctx.fillRect(0, height - 30, width, 30);
    ctx.fillStyle = "#eceff4";
    ctx.fillText(banner, 12, height - 10);
  }
}
