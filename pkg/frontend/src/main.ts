/**
 * Console wiring: connect to the gateway, render the snapshot stream, and
 * translate pointer input into touch commands.
 *
 * Click applies the slider force at the clicked world position; click and
 * drag scales the force with drag distance (readout follows the pointer).
 */

import { touchAt } from "./protocol.js";
import { ConsoleModel } from "./viewmodel.js";
import {
  bodyBounds,
  dragDistanceToForce,
  fitViewport,
  screenToWorld,
  Viewport,
} from "./transform.js";
import { connectGateway, GatewayLink } from "./net.js";
import { drawScene } from "./render.js";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const urlInput = document.getElementById("url") as HTMLInputElement;
const roleSelect = document.getElementById("role") as HTMLSelectElement;
const connectButton = document.getElementById("connect") as HTMLButtonElement;
const forceSlider = document.getElementById("force") as HTMLInputElement;
const forceReadout = document.getElementById("force-readout")!;
const statusLabel = document.getElementById("status")!;

const model = new ConsoleModel();
let link: GatewayLink | null = null;
let view: Viewport | null = null;
let drag: { startX: number; startY: number; force: number } | null = null;

function resizeCanvas(): void {
  canvas.width = canvas.clientWidth * devicePixelRatio;
  canvas.height = canvas.clientHeight * devicePixelRatio;
}
resizeCanvas();
addEventListener("resize", resizeCanvas);

function connect(): void {
  link?.close();
  view = null; // viewport is re-fixed from the next session's first snapshot
  link = connectGateway(
    urlInput.value,
    roleSelect.value === "owner" ? "owner" : "viewer",
    (record) => {
      if (record.kind === "snapshot" && view === null) {
        view = fitViewport(bodyBounds(record.snapshot.body), canvas.width, canvas.height);
      }
      model.applyServer(record);
    },
    (status) => {
      model.setStatus(status);
      statusLabel.textContent = status;
    },
  );
}
connectButton.addEventListener("click", connect);

function sendTouch(screenX: number, screenY: number, force: number): void {
  if (view === null) return;
  if (link === null || model.status !== "open") {
    model.banner = "not connected: touch not sent";
    return;
  }
  const [wx, wy] = screenToWorld(view, screenX * devicePixelRatio, screenY * devicePixelRatio);
  const command = touchAt(wx, wy, force);
  if (link.send(command)) {
    model.registerCommand(command.req, performance.now());
  } else {
    model.banner = "connection closed: touch not sent";
  }
}

canvas.addEventListener("pointerdown", (event) => {
  drag = {
    startX: event.offsetX,
    startY: event.offsetY,
    force: Number(forceSlider.value),
  };
});

canvas.addEventListener("pointermove", (event) => {
  if (drag === null) return;
  const distance = Math.hypot(event.offsetX - drag.startX, event.offsetY - drag.startY);
  if (distance > 4) {
    drag.force = dragDistanceToForce(distance);
  }
  forceReadout.textContent = `${drag.force.toFixed(1)} N`;
});

canvas.addEventListener("pointerup", () => {
  if (drag === null) return;
  sendTouch(drag.startX, drag.startY, drag.force);
  drag = null;
});

forceSlider.addEventListener("input", () => {
  forceReadout.textContent = `${Number(forceSlider.value).toFixed(1)} N`;
});

function frame(): void {
  model.expirePending(performance.now());
  const scene = model.scene();
  if (scene !== null && view !== null) {
    drawScene(ctx, view, scene, model.pendingCommands(), model.banner, model.status);
  }
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
connect();
