"""Planar constant-curvature arc chains.

The robot body is a chain of circular arcs (curvature 0 = straight), each
starting where the previous one ends with the same tangent, so the chain is
C1 by construction. Positive curvature bends left. All lengths in cm,
angles in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Curvatures this small are evaluated as straight lines: the position error
# over any desk-scale length is < 1e-6 cm, while the circle-center arithmetic
# at radii beyond 1e9 cm loses far more than that to cancellation.
KAPPA_EPS = 1e-9
LENGTH_EPS = 1e-9


@dataclass(frozen=True)
class Pose:
    x_cm: float
    y_cm: float
    heading_rad: float


@dataclass(frozen=True)
class ArcSegment:
    length_cm: float
    curvature_per_cm: float

    def __post_init__(self) -> None:
        if self.length_cm <= 0:
            raise ValueError("segment length must be > 0")


@dataclass(frozen=True)
class NearestPoint:
    """Closest point of an arc chain to a query point."""

    distance_cm: float
    arclength_cm: float
    x_cm: float
    y_cm: float
    tangent_rad: float


def advance_pose(pose: Pose, length_cm: float, curvature_per_cm: float) -> Pose:
    """Pose after travelling ``length_cm`` along an arc of given curvature."""
    theta = pose.heading_rad
    if abs(curvature_per_cm) < KAPPA_EPS:
        return Pose(
            pose.x_cm + length_cm * math.cos(theta),
            pose.y_cm + length_cm * math.sin(theta),
            theta,
        )
    theta1 = theta + curvature_per_cm * length_cm
    return Pose(
        pose.x_cm + (math.sin(theta1) - math.sin(theta)) / curvature_per_cm,
        pose.y_cm - (math.cos(theta1) - math.cos(theta)) / curvature_per_cm,
        theta1,
    )


def point_at(pose: Pose, curvature_per_cm: float, t_cm: float) -> tuple[float, float]:
    """Position ``t_cm`` along an arc starting at ``pose``."""
    theta = pose.heading_rad
    if abs(curvature_per_cm) < KAPPA_EPS:
        return pose.x_cm + t_cm * math.cos(theta), pose.y_cm + t_cm * math.sin(theta)
    theta1 = theta + curvature_per_cm * t_cm
    return (
        pose.x_cm + (math.sin(theta1) - math.sin(theta)) / curvature_per_cm,
        pose.y_cm - (math.cos(theta1) - math.cos(theta)) / curvature_per_cm,
    )


def chain_length(segments: Sequence[ArcSegment]) -> float:
    return sum(seg.length_cm for seg in segments)


def chain_poses(base: Pose, segments: Sequence[ArcSegment]) -> list[Pose]:
    """Start pose of each segment plus the final tip pose (length n + 1)."""
    poses = [base]
    for seg in segments:
        poses.append(advance_pose(poses[-1], seg.length_cm, seg.curvature_per_cm))
    return poses


def extend_chain(
    segments: tuple[ArcSegment, ...], length_cm: float, curvature_per_cm: float
) -> tuple[ArcSegment, ...]:
    """Lengthen the chain at the tip, merging when curvature is unchanged."""
    if length_cm <= 0:
        return segments
    if segments and math.isclose(
        segments[-1].curvature_per_cm, curvature_per_cm, rel_tol=0.0, abs_tol=KAPPA_EPS
    ):
        last = segments[-1]
        return segments[:-1] + (ArcSegment(last.length_cm + length_cm, last.curvature_per_cm),)
    return segments + (ArcSegment(length_cm, curvature_per_cm),)


def reshape_tail(
    segments: tuple[ArcSegment, ...], tail_length_cm: float, curvature_per_cm: float
) -> tuple[ArcSegment, ...]:
    """Replace the distal ``tail_length_cm`` of the chain with one arc.

    Arc length is preserved (inextensible bending); only curvature changes.
    A tail longer than the chain reshapes the whole chain.
    """
    total = chain_length(segments)
    if tail_length_cm <= 0 or total == 0:
        return segments
    tail = min(tail_length_cm, total)
    keep = total - tail
    kept: list[ArcSegment] = []
    acc = 0.0
    for seg in segments:
        if acc + seg.length_cm <= keep + LENGTH_EPS:
            kept.append(seg)
            acc += seg.length_cm
        else:
            head = keep - acc
            if head > LENGTH_EPS:
                kept.append(ArcSegment(head, seg.curvature_per_cm))
            break
    if kept and math.isclose(
        kept[-1].curvature_per_cm, curvature_per_cm, rel_tol=0.0, abs_tol=KAPPA_EPS
    ):
        last = kept.pop()
        return tuple(kept) + (ArcSegment(last.length_cm + tail, curvature_per_cm),)
    return tuple(kept) + (ArcSegment(tail, curvature_per_cm),)


def sample_polyline(
    base: Pose, segments: Sequence[ArcSegment], step_cm: float = 1.0
) -> np.ndarray:
    """Points along the chain every ``step_cm``, tip included; shape (n, 2)."""
    if step_cm <= 0:
        raise ValueError("step_cm must be > 0")
    total = chain_length(segments)
    if total == 0:
        return np.array([[base.x_cm, base.y_cm]])
    stations = np.arange(0.0, total, step_cm)
    if total - stations[-1] > LENGTH_EPS:
        stations = np.append(stations, total)
    points = np.empty((len(stations), 2))
    poses = chain_poses(base, segments)
    acc = 0.0
    idx = 0
    for seg, pose in zip(segments, poses):
        end = acc + seg.length_cm
        theta = pose.heading_rad
        while idx < len(stations) and stations[idx] <= end + LENGTH_EPS:
            t = stations[idx] - acc
            if abs(seg.curvature_per_cm) < KAPPA_EPS:
                points[idx] = (
                    pose.x_cm + t * math.cos(theta),
                    pose.y_cm + t * math.sin(theta),
                )
            else:
                theta1 = theta + seg.curvature_per_cm * t
                points[idx] = (
                    pose.x_cm + (math.sin(theta1) - math.sin(theta)) / seg.curvature_per_cm,
                    pose.y_cm - (math.cos(theta1) - math.cos(theta)) / seg.curvature_per_cm,
                )
            idx += 1
        acc = end
    return points


def _nearest_on_segment(
    start: Pose, seg: ArcSegment, px: float, py: float
) -> tuple[float, float]:
    """(distance, local arclength) of the closest point of one arc to (px, py)."""
    length = seg.length_cm
    kappa = seg.curvature_per_cm
    theta = start.heading_rad
    if abs(kappa) < KAPPA_EPS:
        ux, uy = math.cos(theta), math.sin(theta)
        t = (px - start.x_cm) * ux + (py - start.y_cm) * uy
        t = min(max(t, 0.0), length)
        nx, ny = start.x_cm + t * ux, start.y_cm + t * uy
        return math.hypot(px - nx, py - ny), t

    # Arc: candidate arclengths are the endpoints plus every point where the
    # ray from the arc's center through the query crosses the arc.
    radius_signed = 1.0 / kappa
    ox = start.x_cm - radius_signed * math.sin(theta)
    oy = start.y_cm + radius_signed * math.cos(theta)
    candidates = [0.0, length]
    vx, vy = px - ox, py - oy
    if math.hypot(vx, vy) > 1e-12:
        a0 = math.atan2(start.y_cm - oy, start.x_cm - ox)
        b = math.atan2(vy, vx)
        delta = (b - a0) % math.tau if kappa > 0 else -((a0 - b) % math.tau)
        t = delta / kappa
        period = math.tau / abs(kappa)
        while t <= length + LENGTH_EPS:
            if t >= -LENGTH_EPS:
                candidates.append(min(max(t, 0.0), length))
            t += period
    best_dist = math.inf
    best_t = 0.0
    for t in candidates:
        cx, cy = point_at(start, kappa, t)
        dist = math.hypot(px - cx, py - cy)
        if dist < best_dist:
            best_dist = dist
            best_t = t
    return best_dist, best_t


def nearest_point(
    base: Pose, segments: Sequence[ArcSegment], px: float, py: float
) -> NearestPoint | None:
    """Closest point of the whole chain to (px, py); None for an empty chain."""
    if not segments:
        return None
    poses = chain_poses(base, segments)
    best: NearestPoint | None = None
    acc = 0.0
    for seg, pose in zip(segments, poses):
        dist, t = _nearest_on_segment(pose, seg, px, py)
        if best is None or dist < best.distance_cm:
            nx, ny = point_at(pose, seg.curvature_per_cm, t)
            best = NearestPoint(
                distance_cm=dist,
                arclength_cm=acc + t,
                x_cm=nx,
                y_cm=ny,
                tangent_rad=pose.heading_rad + seg.curvature_per_cm * t,
            )
        acc += seg.length_cm
    return best
