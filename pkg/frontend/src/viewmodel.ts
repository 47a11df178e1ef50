/**
 * Console state: the latest snapshot, pending command acknowledgments, and
 * connection status. There is no client-side simulation; every rendered
 * quantity is derived from the snapshot stream (the only fold kept across
 * snapshots is the sim time at which the state label last changed, for the
 * state timer).
 */

import { pressureColor } from "./colorscale.js";
import { ServerRecord, Snapshot } from "./protocol.js";

/** Pocket span along the robot in the demo preset; body samples are 1 cm. */
export const POCKET_LENGTH_CM = 27.5;

/** Unacknowledged commands become visibly timed out after this long. */
export const PENDING_TIMEOUT_MS = 1000;

export type ConnectionStatus = "connecting" | "open" | "closed";

export type PendingStatus = "pending" | "acked" | "failed" | "timed_out";

export interface PendingCommand {
  req: string;
  sentAtMs: number;
  status: PendingStatus;
  error?: string;
}

export interface PocketScene {
  pocketId: string;
  side: "left" | "right";
  color: string;
  exposedFraction: number;
  gaugePressure: number;
  estimatedForce: number;
  /** Index range into the body polyline covered by the exposed portion. */
  startIndex: number;
  endIndex: number;
}

export interface Scene {
  time: number;
  stateLabel: string;
  stateSeconds: number;
  body: [number, number][];
  pockets: PocketScene[];
  actuators: { left: number; right: number };
  counters: { frames: number; dropped: number };
}

/** Pure derivation of everything the renderer draws from one snapshot. */
export function deriveScene(snapshot: Snapshot, stateSince: number): Scene {
  const lastIndex = snapshot.body.length - 1;
  const pockets = snapshot.pockets.map((p) => {
    const index = Number.parseInt(p.pocket_id.slice(1), 10) || 0;
    const startCm = index * POCKET_LENGTH_CM;
    const endCm = startCm + p.exposed_fraction * POCKET_LENGTH_CM;
    return {
      pocketId: p.pocket_id,
      side: p.side,
      color: pressureColor(p.gauge_pressure),
      exposedFraction: p.exposed_fraction,
      gaugePressure: p.gauge_pressure,
      estimatedForce: p.estimated_force,
      startIndex: Math.min(Math.round(startCm), lastIndex),
      endIndex: Math.min(Math.round(endCm), lastIndex),
    };
  });
  return {
    time: snapshot.t,
    stateLabel: snapshot.state,
    stateSeconds: snapshot.t - stateSince,
    body: snapshot.body,
    pockets,
    actuators: snapshot.actuators,
    counters: snapshot.counters,
  };
}

export class ConsoleModel {
  latest: Snapshot | null = null;
  status: ConnectionStatus = "connecting";
  banner: string | null = null;
  droppedStale = 0;
  private stateSince = 0;
  private pending = new Map<string, PendingCommand>();

  /** Apply one server record; returns true when the scene changed. */
  applyServer(record: ServerRecord): boolean {
    switch (record.kind) {
      case "snapshot": {
        const snapshot = record.snapshot;
        if (this.latest !== null && snapshot.t <= this.latest.t) {
          this.droppedStale += 1; // stale frames never render
          return false;
        }
        if (this.latest === null || this.latest.state !== snapshot.state) {
          this.stateSince = snapshot.t;
        }
        this.latest = snapshot;
        return true;
      }
      case "ack": {
        const entry = this.pending.get(record.ack.req);
        if (entry && entry.status === "pending") {
          entry.status = "acked";
        }
        return true;
      }
      case "error": {
        if (record.error.req !== null) {
          const entry = this.pending.get(record.error.req);
          if (entry) {
            entry.status = "failed";
            entry.error = record.error.error;
          }
        }
        this.banner = record.error.detail ?? record.error.error;
        return true;
      }
      case "malformed":
        // keep the last good frame on screen and surface the problem
        this.banner = "malformed message from gateway";
        return true;
    }
  }

  registerCommand(req: string, nowMs: number): void {
    this.pending.set(req, { req, sentAtMs: nowMs, status: "pending" });
  }

  /** Mark pending commands older than the timeout; call before rendering. */
  expirePending(nowMs: number): void {
    for (const entry of this.pending.values()) {
      if (entry.status === "pending" && nowMs - entry.sentAtMs >= PENDING_TIMEOUT_MS) {
        entry.status = "timed_out";
      }
    }
  }

  pendingCommands(): PendingCommand[] {
    return [...this.pending.values()].sort((a, b) => a.sentAtMs - b.sentAtMs);
  }

  setStatus(status: ConnectionStatus): void {
    this.status = status;
    if (status === "open") {
      this.banner = null;
    }
  }

  scene(): Scene | null {
    return this.latest === null ? null : deriveScene(this.latest, this.stateSince);
  }
}
