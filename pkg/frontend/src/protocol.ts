/**
 * Gateway wire records. Every message is one JSON object per WebSocket text
 * frame: snapshots flow server->client, commands client->server, and each
 * command is answered with an ack {"req","ok"} or an error
 * {"req","error","detail"}.
 */

export interface PocketView {
  pocket_id: string;
  side: "left" | "right";
  exposed_fraction: number;
  gauge_pressure: number;
  estimated_force: number;
}

export interface Snapshot {
  t: number;
  state: string;
  body: [number, number][];
  pockets: PocketView[];
  actuators: { left: number; right: number };
  counters: { frames: number; dropped: number };
}

export interface Ack {
  req: string;
  ok: true;
}

export interface ErrorRecord {
  req: string | null;
  error: string;
  detail?: string;
}

export type ServerRecord =
  | { kind: "snapshot"; snapshot: Snapshot }
  | { kind: "ack"; ack: Ack }
  | { kind: "error"; error: ErrorRecord }
  | { kind: "malformed"; raw: string };

export interface TouchCommand {
  req: string;
  kind: "touch";
  x?: number;
  y?: number;
  pocket_id?: string;
  force: number;
  duration: number;
}

function isFiniteNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

function isPocketView(value: unknown): value is PocketView {
  if (typeof value !== "object" || value === null) return false;
  const p = value as Record<string, unknown>;
  return (
    typeof p.pocket_id === "string" &&
    (p.side === "left" || p.side === "right") &&
    isFiniteNumber(p.exposed_fraction) &&
    isFiniteNumber(p.gauge_pressure) &&
    isFiniteNumber(p.estimated_force)
  );
}

export function isSnapshot(value: unknown): value is Snapshot {
  if (typeof value !== "object" || value === null) return false;
  const s = value as Record<string, unknown>;
  if (!isFiniteNumber(s.t) || typeof s.state !== "string") return false;
  if (!Array.isArray(s.body)) return false;
  if (
    !s.body.every(
      (p) => Array.isArray(p) && p.length === 2 && isFiniteNumber(p[0]) && isFiniteNumber(p[1]),
    )
  ) {
    return false;
  }
  if (!Array.isArray(s.pockets) || !s.pockets.every(isPocketView)) return false;
  const actuators = s.actuators as Record<string, unknown> | undefined;
  if (!actuators || !isFiniteNumber(actuators.left) || !isFiniteNumber(actuators.right)) {
    return false;
  }
  const counters = s.counters as Record<string, unknown> | undefined;
  if (!counters || !isFiniteNumber(counters.frames) || !isFiniteNumber(counters.dropped)) {
    return false;
  }
  return true;
}

/** Classify one incoming text frame; never throws. */
export function parseServerMessage(text: string): ServerRecord {
  let value: unknown;
  try {
    value = JSON.parse(text);
  } catch {
    return { kind: "malformed", raw: text };
  }
  if (isSnapshot(value)) {
    return { kind: "snapshot", snapshot: value };
  }
  if (typeof value === "object" && value !== null) {
    const record = value as Record<string, unknown>;
    if (record.ok === true && typeof record.req === "string") {
      return { kind: "ack", ack: { req: record.req, ok: true } };
    }
    if (typeof record.error === "string") {
      return {
        kind: "error",
        error: {
          req: typeof record.req === "string" ? record.req : null,
          error: record.error,
          detail: typeof record.detail === "string" ? record.detail : undefined,
        },
      };
    }
  }
  return { kind: "malformed", raw: text };
}

let touchCounter = 0;

/** Build a touch command addressed by world position. */
export function touchAt(x: number, y: number, force: number, duration = 1.0): TouchCommand {
  touchCounter += 1;
  return {
    req: `touch-${touchCounter}`,
    kind: "touch",
    x,
    y,
    force,
    duration,
  };
}
