/**
 * Console acceptance against a recorded gateway trace.
 *
 * The fixture is the byte-exact snapshot stream of the shipped touch_demo
 * scenario (generated with `vinetouch demo --scenario touch_demo --headless`):
 * the robot sweeps right, a touch lands on the front-right pocket, and the
 * controller flips to growing_right once the pocket crosses the contact
 * threshold.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { pressureColor } from "../src/colorscale.js";
import { parseServerMessage, Snapshot } from "../src/protocol.js";
import { ConsoleModel, deriveScene } from "../src/viewmodel.js";

const FIXTURE = join(
  dirname(fileURLToPath(import.meta.url)),
  "fixtures",
  "touch_demo.trace.jsonl",
);
const CONTACT_THRESHOLD_KPA = 1.01;
const TOUCHED_POCKET = "R2";

function traceLines(): string[] {
  return readFileSync(FIXTURE, "utf-8").trim().split("\n");
}

describe("golden trace", () => {
  it("parses every recorded line as a snapshot", () => {
    const lines = traceLines();
    expect(lines.length).toBe(400);
    for (const line of lines) {
      expect(parseServerMessage(line).kind).toBe("snapshot");
    }
  });

  it("flips the rendered state label within two ticks of the pressure crossing", () => {
    const model = new ConsoleModel();
    const labels: string[] = [];
    let crossingIndex: number | null = null;
    let index = 0;
    for (const line of traceLines()) {
      const record = parseServerMessage(line);
      expect(record.kind).toBe("snapshot");
      if (record.kind !== "snapshot") continue;
      expect(record.snapshot.state).not.toBe("searching_left");
      model.applyServer(record);
      const scene = model.scene()!;
      labels.push(scene.stateLabel);
      const touched = record.snapshot.pockets.find((p) => p.pocket_id === TOUCHED_POCKET)!;
      if (crossingIndex === null && touched.gauge_pressure >= CONTACT_THRESHOLD_KPA) {
        crossingIndex = index;
        // the sweep was still searching right up to the crossing
        expect(labels[index - 1]).toBe("searching_right");
      }
      index += 1;
    }
    expect(crossingIndex).not.toBeNull();
    const after = labels.slice(crossingIndex!, crossingIndex! + 3);
    expect(after).toContain("growing_right");
  });

  it("colors every pocket bit-for-bit from the snapshot pressure", () => {
    const model = new ConsoleModel();
    for (const line of traceLines()) {
      const record = parseServerMessage(line);
      if (record.kind !== "snapshot") continue;
      model.applyServer(record);
      const scene = model.scene()!;
      for (const pocket of scene.pockets) {
        const source = record.snapshot.pockets.find((p) => p.pocket_id === pocket.pocketId)!;
        expect(pocket.color).toBe(pressureColor(source.gauge_pressure));
        expect(pocket.gaugePressure).toBe(source.gauge_pressure);
        expect(pocket.estimatedForce).toBe(source.estimated_force);
      }
    }
  });

  it("derives every rendered value from the latest snapshot alone", () => {
    const lines = traceLines();
    const mid = parseServerMessage(lines[200]);
    if (mid.kind !== "snapshot") throw new Error("fixture line 200 is not a snapshot");
    const snapshot: Snapshot = mid.snapshot;

    // same snapshot through the model and through the pure derivation
    const model = new ConsoleModel();
    model.applyServer(mid);
    const viaModel = model.scene()!;
    const direct = deriveScene(snapshot, snapshot.t);
    expect(viaModel.body).toEqual(direct.body);
    expect(viaModel.pockets).toEqual(direct.pockets);
    expect(viaModel.actuators).toEqual(direct.actuators);
    expect(viaModel.counters).toEqual(direct.counters);
    expect(viaModel.stateLabel).toBe(direct.stateLabel);

    // scene content is insensitive to everything except the snapshot
    model.registerCommand("noise", 123);
    model.banner = "unrelated";
    const again = model.scene()!;
    expect(again).toEqual(viaModel);
  });
});
