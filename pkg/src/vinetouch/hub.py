"""Multiplexed pressure-sensor array emulator.

Mirrors the addressing shape of the hardware readout chain: identical-address
gauge sensors sit behind bus multiplexer channels (8 channels each, up to 9
multiplexers) and a single reader polls every attached sensor once per cycle
in (multiplexer, channel) order. The electrical details are out of scope;
sensors here are just callables returning a gauge pressure.

Frames go on the wire as a decimal byte-length prefix line followed by one
JSON header line ``{"cycle", "n", "dropped"}`` and one JSON record per
reading ``{"id", "t", "seq", "p_kpa"}``. A stalled consumer never blocks the
poll loop: buffered frames are dropped oldest-first and counted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Protocol

HUB_CAPACITY = 64
MAX_MUX_COUNT = 9
CHANNELS_PER_MUX = 8
DEFAULT_POLL_RATE_HZ = 20.0
DEFAULT_BUFFER_FRAMES = 8


class AddressInUseError(ValueError):
    code = "ADDRESS_IN_USE"


class CapacityExceededError(ValueError):
    code = "CAPACITY_EXCEEDED"


class EmptyHubError(RuntimeError):
    code = "EMPTY_HUB"


class SinkClosedError(RuntimeError):
    """Raised by a sink to signal orderly close; terminates the stream cleanly."""

    code = "SINK_CLOSED"


@dataclass(frozen=True, order=True)
class SensorAddress:
    """Position of one sensor on the bus; ordering defines poll order."""

    mux_index: int
    channel: int
    logical_id: str

    def __post_init__(self) -> None:
        if not 0 <= self.mux_index < MAX_MUX_COUNT:
            raise ValueError(f"mux_index must be in [0, {MAX_MUX_COUNT - 1}]")
        if not 0 <= self.channel < CHANNELS_PER_MUX:
            raise ValueError(f"channel must be in [0, {CHANNELS_PER_MUX - 1}]")


@dataclass(frozen=True)
class SensorReading:
    logical_id: str
    gauge_pressure_kpa: float
    timestamp_s: float
    sequence: int


class FrameSink(Protocol):
    """Consumer of encoded frames.

    ``write`` returns True when the frame was accepted and False when the
    sink is stalled (frame not consumed); it raises :class:`SinkClosedError`
    once closed.
    """

    def write(self, frame: bytes) -> bool: ...


@dataclass
class StreamStats:
    cycles: int = 0
    frames_sent: int = 0
    frames_dropped: int = 0
    closed_by_sink: bool = False


def encode_frame(cycle: int, readings: list[SensorReading], dropped: int) -> bytes:
    """Length-prefixed frame: header line plus one record line per reading."""
    lines = [json.dumps({"cycle": cycle, "n": len(readings), "dropped": dropped})]
    lines += [
        json.dumps(
            {
                "id": r.logical_id,
                "t": r.timestamp_s,
                "seq": r.sequence,
                "p_kpa": r.gauge_pressure_kpa,
            }
        )
        for r in readings
    ]
    payload = ("\n".join(lines) + "\n").encode("utf-8")
    return f"{len(payload)}\n".encode("ascii") + payload


def decode_frames(data: bytes) -> list[tuple[dict, list[dict]]]:
    """Inverse of :func:`encode_frame` over a concatenated byte stream."""
    frames = []
    offset = 0
    while offset < len(data):
        newline = data.index(b"\n", offset)
        length = int(data[offset:newline])
        start = newline + 1
        payload = data[start : start + length].decode("utf-8")
        offset = start + length
        lines = payload.splitlines()
        header = json.loads(lines[0])
        records = [json.loads(line) for line in lines[1:]]
        if header["n"] != len(records):
            raise ValueError(f"frame {header['cycle']} header n={header['n']} but {len(records)} records")
        frames.append((header, records))
    return frames


class SensorHub:
    """Round-robin poller over attached sensors with framed streaming output."""

    def __init__(self, poll_rate_hz: float = DEFAULT_POLL_RATE_HZ):
        if poll_rate_hz <= 0:
            raise ValueError("poll_rate_hz must be > 0")
        self.poll_rate_hz = poll_rate_hz
        self._sources: dict[SensorAddress, Callable[[], float]] = {}
        self._sequences: dict[str, int] = {}
        self._order: list[SensorAddress] = []
        self._cycle_count = 0
        self._dropped = 0

    @property
    def sensor_count(self) -> int:
        return len(self._sources)

    @property
    def cycle_count(self) -> int:
        return self._cycle_count

    @property
    def dropped(self) -> int:
        return self._dropped

    @property
    def period_s(self) -> float:
        return 1.0 / self.poll_rate_hz

    def attach(self, address: SensorAddress, source: Callable[[], float]) -> None:
        """Register a sensor; it is polled from the next cycle on."""
        if len(self._sources) >= HUB_CAPACITY:
            raise CapacityExceededError(f"hub capacity is {HUB_CAPACITY} sensors")
        for existing in self._sources:
            if (existing.mux_index, existing.channel) == (address.mux_index, address.channel):
                raise AddressInUseError(
                    f"mux {address.mux_index} channel {address.channel} already attached"
                )
            if existing.logical_id == address.logical_id:
                raise AddressInUseError(f"logical id {address.logical_id!r} already attached")
        self._sources[address] = source
        self._sequences[address.logical_id] = 0
        self._order = sorted(self._sources)

    def detach(self, logical_id: str) -> None:
        for address in list(self._sources):
            if address.logical_id == logical_id:
                del self._sources[address]
                del self._sequences[logical_id]
                self._order = sorted(self._sources)
                return
        raise KeyError(logical_id)

    def poll_cycle(self, now_s: float) -> list[SensorReading]:
        """Read every attached sensor once, in (mux, channel) order."""
        if not self._sources:
            raise EmptyHubError("no sensors attached")
        readings = []
        for address in self._order:
            value = float(self._sources[address]())
            if not math.isfinite(value):
                raise ValueError(f"sensor {address.logical_id} produced non-finite pressure")
            seq = self._sequences[address.logical_id]
            self._sequences[address.logical_id] = seq + 1
            readings.append(
                SensorReading(
                    logical_id=address.logical_id,
                    gauge_pressure_kpa=value,
                    timestamp_s=now_s,
                    sequence=seq,
                )
            )
        self._cycle_count += 1
        return readings

    def stream_frames(
        self,
        sink: FrameSink,
        cycles: int,
        start_time_s: float = 0.0,
        buffer_frames: int = DEFAULT_BUFFER_FRAMES,
    ) -> StreamStats:
        """Poll for ``cycles`` cycles at the configured rate, framing to ``sink``.

        The hub clock is simulated: cycle k is stamped ``start + k * period``.
        When the sink stalls, finished frames queue in a bounded buffer and
        the oldest is discarded (counted in ``dropped``) rather than ever
        blocking the poll loop. A frame is written in one piece or not at all.
        """
        if buffer_frames < 1:
            raise ValueError("buffer_frames must be >= 1")
        stats = StreamStats()
        buffer: list[tuple[int, list[SensorReading]]] = []
        for k in range(cycles):
            now = start_time_s + k * self.period_s
            readings = self.poll_cycle(now)
            stats.cycles += 1
            if len(buffer) >= buffer_frames:
                buffer.pop(0)
                self._dropped += 1
                stats.frames_dropped += 1
            buffer.append((self._cycle_count - 1, readings))
            try:
                while buffer:
                    cycle, queued = buffer[0]
                    if not sink.write(encode_frame(cycle, queued, self._dropped)):
                        break
                    buffer.pop(0)
                    stats.frames_sent += 1
            except SinkClosedError:
                stats.closed_by_sink = True
                return stats
        return stats
