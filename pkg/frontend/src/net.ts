/**
 * Thin WebSocket wrapper: parses inbound records, queues outbound commands
 * until the socket opens, reports status changes.
 */

import { parseServerMessage, ServerRecord } from "./protocol.js";

export interface GatewayLink {
  send(command: object): boolean;
  close(): void;
}

export function connectGateway(
  url: string,
  role: "viewer" | "owner",
  onRecord: (record: ServerRecord) => void,
  onStatus: (status: "connecting" | "open" | "closed") => void,
): GatewayLink {
  const socket = new WebSocket(`${url}?role=${role}`);
  const outbound: string[] = [];
  onStatus("connecting");

  socket.onopen = () => {
    onStatus("open");
    while (outbound.length > 0) {
      socket.send(outbound.shift()!);
    }
  };
  socket.onmessage = (event: MessageEvent) => {
    onRecord(parseServerMessage(String(event.data)));
  };
  socket.onclose = () => onStatus("closed");
  socket.onerror = () => onStatus("closed");

  return {
    send(command: object): boolean {
      const text = JSON.stringify(command);
      if (socket.readyState === WebSocket.OPEN) {
        socket.send(text);
        return true;
      }
      if (socket.readyState === WebSocket.CONNECTING) {
        outbound.push(text);
        return true;
      }
      return false; // closed: caller surfaces a local error, nothing is sent
    },
    close() {
      socket.close();
    },
  };
}
