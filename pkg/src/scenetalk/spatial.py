"""Spatial math every other module consults: distances, egocentric
bearings, light density, world extents.

All functions are pure and operate on immutable snapshots, so they are
safe from any thread.  The qualitative thresholds live here so there is
exactly one place to tune them.
"""

from __future__ import annotations

import enum
import math

from .types import Player, SceneObject, Vec3

# Qualitative distance thresholds (meters): room-scale vs across-park scale.
CLOSE_BELOW = 5.0
FAR_FROM = 15.0

# Horizontal distance below which an object counts as at the player's
# own position rather than in any direction sector.
AT_PLAYER_RADIUS = 0.5

# Qualitative light-density labels, thresholds in density units.
DENSITY_DIM_FROM = 0.25
DENSITY_LIT_FROM = 1.0
DENSITY_BRIGHT_FROM = 2.5


class Direction(str, enum.Enum):
    IN_FRONT = "in_front"
    RIGHT = "right"
    BEHIND = "behind"
    LEFT = "left"
    AT_PLAYER = "at_player"


class DistanceLabel(str, enum.Enum):
    CLOSE = "close"
    MODERATE = "moderate"
    FAR = "far"


class DensityLabel(str, enum.Enum):
    DARK = "dark"
    DIM = "dim"
    LIT = "lit"
    BRIGHT = "bright"


def euclidean_distance(a: Vec3, b: Vec3) -> float:
    """Straight-line distance in meters between two points."""
    return math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))


def facing_vector(yaw: float) -> Vec3:
    """Horizontal unit vector the given yaw faces (yaw 0 -> +z)."""
    r = math.radians(yaw)
    return Vec3(math.sin(r), 0.0, math.cos(r))


def right_vector(yaw: float) -> Vec3:
    """Horizontal unit vector 90 degrees clockwise of the facing."""
    r = math.radians(yaw)
    return Vec3(math.cos(r), 0.0, -math.sin(r))


def bearing_degrees(player: Player, target: Vec3) -> float:
    """Horizontal bearing of target in the player frame, degrees in
    [0, 360): 0 dead ahead, 90 due right, 180 behind, 270 due left."""
    dx = target.x - player.position.x
    dz = target.z - player.position.z
    r = math.radians(player.yaw)
    forward = dx * math.sin(r) + dz * math.cos(r)
    rightward = dx * math.cos(r) - dz * math.sin(r)
    return math.degrees(math.atan2(rightward, forward)) % 360.0


def horizontal_distance(player: Player, target: Vec3) -> float:
    return math.hypot(target.x - player.position.x, target.z - player.position.z)


def egocentric_direction(player: Player, target: Vec3) -> Direction:
    """Classify target into one of four 90-degree sectors centered on the
    player's facing axes, or AT_PLAYER when essentially co-located.

    Sector bounds are half-open: bearing 45 is RIGHT, 135 BEHIND,
    225 LEFT, 315 IN_FRONT.
    """
    if horizontal_distance(player, target) < AT_PLAYER_RADIUS:
        return Direction.AT_PLAYER
    theta = bearing_degrees(player, target)
    if theta >= 315.0 or theta < 45.0:
        return Direction.IN_FRONT
    if theta < 135.0:
        return Direction.RIGHT
    if theta < 225.0:
        return Direction.BEHIND
    return Direction.LEFT


def qualitative_distance(d: float) -> DistanceLabel:
    if d < 0:
        raise ValueError(f"distance {d} must be >= 0")
    if d < CLOSE_BELOW:
        return DistanceLabel.CLOSE
    if d < FAR_FROM:
        return DistanceLabel.MODERATE
    return DistanceLabel.FAR


def qualitative_density(density: float) -> DensityLabel:
    if density < DENSITY_DIM_FROM:
        return DensityLabel.DARK
    if density < DENSITY_LIT_FROM:
        return DensityLabel.DIM
    if density < DENSITY_BRIGHT_FROM:
        return DensityLabel.LIT
    return DensityLabel.BRIGHT


def light_density_at(scene, p: Vec3) -> float:
    """Aggregate light reaching point p: the ambient term, every
    directional light's intensity, and each in-range point light's
    intensity attenuated by 1/(1+d^2).  The +1 keeps d=0 finite."""
    total = scene.ambient_light_intensity
    for obj in scene.objects.values():
        light = obj.light
        if light is None:
            continue
        if light.kind == "directional":
            total += light.intensity
        else:
            d = euclidean_distance(obj.position, p)
            if d <= light.range:
                total += light.intensity / (1.0 + d * d)
    return total


def bounding_extent(obj: SceneObject) -> Vec3:
    """Per-axis world size in meters: declared base extent times scale."""
    return obj.base_extent.hadamard(obj.scale)


def directional_half_extent(extent: Vec3, direction: Vec3) -> float:
    """Half-width of an axis-aligned box along a horizontal unit
    direction (the support-function formula with no y term)."""
    return (extent.x * abs(direction.x) + extent.z * abs(direction.z)) / 2.0
