"""Spatial math against independent brute-force oracles."""

import math
import random

import pytest
from hypothesis import given, strategies as st

from scenetalk.scene import Scene
from scenetalk.spatial import (
    Direction,
    DistanceLabel,
    bounding_extent,
    egocentric_direction,
    euclidean_distance,
    light_density_at,
    qualitative_distance,
)
from scenetalk.types import LightFacet, Player, SceneObject, Vec3


def oracle_direction(player, target):
    """Brute-force reference: rotate the offset into the player frame with
    an explicit rotation matrix, then classify by raw angle arithmetic.
    Kept deliberately different in structure from the implementation."""
    dx = target.x - player.position.x
    dz = target.z - player.position.z
    if math.sqrt(dx * dx + dz * dz) < 0.5:
        return Direction.AT_PLAYER
    # Undo the player's yaw: a clockwise world rotation by -yaw.
    phi = -math.radians(player.yaw)
    local_x = dx * math.cos(phi) + dz * math.sin(phi)
    local_z = -dx * math.sin(phi) + dz * math.cos(phi)
    # In the local frame the player faces +z; angle measured clockwise.
    angle = math.degrees(math.atan2(local_x, local_z))
    if angle < 0:
        angle += 360.0
    if angle >= 315.0 or angle < 45.0:
        return Direction.IN_FRONT
    if angle < 135.0:
        return Direction.RIGHT
    if angle < 225.0:
        return Direction.BEHIND
    return Direction.LEFT


def oracle_boundary_gap(player, target):
    """Degrees from the nearest sector boundary (45/135/225/315)."""
    dx = target.x - player.position.x
    dz = target.z - player.position.z
    phi = -math.radians(player.yaw)
    local_x = dx * math.cos(phi) + dz * math.sin(phi)
    local_z = -dx * math.sin(phi) + dz * math.cos(phi)
    angle = math.degrees(math.atan2(local_x, local_z)) % 360.0
    return min(abs(angle - b) for b in (45.0, 135.0, 225.0, 315.0))


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def test_distance_examples():
    assert euclidean_distance(Vec3(0, 0, 0), Vec3(0, 0, 0)) == 0.0
    assert euclidean_distance(Vec3(0, 0, 0), Vec3(3, 0, 4)) == 5.0
    assert euclidean_distance(Vec3(1, 2, 3), Vec3(4, 6, 3)) == 5.0


@given(finite, finite, finite, finite, finite, finite)
def test_distance_symmetric_nonnegative(ax, ay, az, bx, by, bz):
    a, b = Vec3(ax, ay, az), Vec3(bx, by, bz)
    assert euclidean_distance(a, b) == euclidean_distance(b, a) >= 0


@given(
    st.floats(-100, 100), st.floats(-100, 100), st.floats(-100, 100),
    st.floats(-100, 100), st.floats(-100, 100), st.floats(-100, 100),
    st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50),
    st.floats(0, 360),
)
def test_distance_rigid_motion_invariant(ax, ay, az, bx, by, bz, tx, ty, tz, theta):
    a, b = Vec3(ax, ay, az), Vec3(bx, by, bz)
    d0 = euclidean_distance(a, b)
    c, s = math.cos(math.radians(theta)), math.sin(math.radians(theta))

    def move(p):
        return Vec3(p.x * c + p.z * s + tx, p.y + ty, -p.x * s + p.z * c + tz)

    assert euclidean_distance(move(a), move(b)) == pytest.approx(d0, abs=1e-9)


def test_direction_examples():
    p = Player(Vec3(0, 0, 0), 0.0)
    assert egocentric_direction(p, Vec3(0, 0, 5)) == Direction.IN_FRONT
    assert egocentric_direction(p, Vec3(5, 0, 0)) == Direction.RIGHT
    assert egocentric_direction(Player(Vec3(0, 0, 0), 90.0), Vec3(5, 0, 0)) == Direction.IN_FRONT
    assert egocentric_direction(p, Vec3(-5, 0, 0)) == Direction.LEFT
    assert egocentric_direction(p, Vec3(0, 0, -5)) == Direction.BEHIND
    assert egocentric_direction(p, Vec3(0.1, 3.0, 0.1)) == Direction.AT_PLAYER


def test_direction_sector_boundaries_half_open():
    p = Player(Vec3(0, 0, 0), 0.0)
    # Bearing exactly 45: boundary belongs to the upper sector.
    assert egocentric_direction(p, Vec3(5, 0, 5)) == Direction.RIGHT
    assert egocentric_direction(p, Vec3(5, 0, -5)) == Direction.BEHIND
    assert egocentric_direction(p, Vec3(-5, 0, -5)) == Direction.LEFT
    assert egocentric_direction(p, Vec3(-5, 0, 5)) == Direction.IN_FRONT


def test_direction_matches_oracle_randomized():
    rng = random.Random(42)
    for _ in range(2000):
        player = Player(
            Vec3(rng.uniform(-50, 50), rng.uniform(0, 3), rng.uniform(-50, 50)),
            rng.uniform(0, 360),
        )
        target = Vec3(rng.uniform(-60, 60), rng.uniform(0, 5), rng.uniform(-60, 60))
        if oracle_boundary_gap(player, target) <= 1e-6:
            continue
        assert egocentric_direction(player, target) == oracle_direction(player, target)


@given(
    st.floats(-50, 50), st.floats(-50, 50), st.floats(0, 360),
    st.floats(-50, 50), st.floats(-50, 50), st.floats(0, 360),
)
def test_direction_rotation_invariant(px, pz, yaw, tx, tz, phi):
    """Rotating player yaw and target about the player's vertical axis by
    the same angle leaves the sector unchanged (away from boundaries)."""
    player = Player(Vec3(px, 0, pz), yaw)
    target = Vec3(tx, 0, tz)
    if oracle_boundary_gap(player, target) < 1e-3:
        return
    c, s = math.cos(math.radians(phi)), math.sin(math.radians(phi))
    dx, dz = tx - px, tz - pz
    rotated = Vec3(px + dx * c + dz * s, 0, pz - dx * s + dz * c)
    turned = Player(Vec3(px, 0, pz), yaw + phi)
    assert egocentric_direction(player, target) == egocentric_direction(turned, rotated)


def test_qualitative_distance_thresholds():
    assert qualitative_distance(0.0) == DistanceLabel.CLOSE
    assert qualitative_distance(4.999) == DistanceLabel.CLOSE
    assert qualitative_distance(5.0) == DistanceLabel.MODERATE
    assert qualitative_distance(14.999) == DistanceLabel.MODERATE
    assert qualitative_distance(15.0) == DistanceLabel.FAR
    assert qualitative_distance(40.0) == DistanceLabel.FAR
    with pytest.raises(ValueError):
        qualitative_distance(-1.0)


def _scene_with_lights(*lights, ambient=0.0):
    scene = Scene(ambient_light_intensity=ambient)
    for i, (pos, facet) in enumerate(lights):
        scene.add_object(
            SceneObject(id=f"l{i}", name=f"Lamp {i}", position=pos, light=facet)
        )
    return scene


def test_light_density_examples():
    assert light_density_at(Scene(), Vec3(0, 0, 0)) == 0.0
    one = _scene_with_lights((Vec3(0, 0, 0), LightFacet("point", 1.0, 10.0)))
    assert light_density_at(one, Vec3(0, 0, 0)) == pytest.approx(1.0)
    # 0.5 ambient + 2/(1+9) at distance 3.
    far = _scene_with_lights((Vec3(3, 0, 0), LightFacet("point", 2.0, 10.0)), ambient=0.5)
    assert light_density_at(far, Vec3(0, 0, 0)) == pytest.approx(0.7)


def test_light_density_range_cutoff_and_directional():
    out = _scene_with_lights((Vec3(20, 0, 0), LightFacet("point", 5.0, 10.0)))
    assert light_density_at(out, Vec3(0, 0, 0)) == 0.0
    sun = _scene_with_lights((Vec3(0, 50, 0), LightFacet("directional", 0.8)))
    assert light_density_at(sun, Vec3(7, 0, -3)) == pytest.approx(0.8)


def test_light_density_monotone_in_intensity():
    rng = random.Random(7)
    for _ in range(100):
        pos = Vec3(rng.uniform(-5, 5), rng.uniform(0, 3), rng.uniform(-5, 5))
        i0 = rng.uniform(0, 2)
        probe = Vec3(rng.uniform(-5, 5), 0, rng.uniform(-5, 5))
        lo = _scene_with_lights((pos, LightFacet("point", i0, 20.0)))
        hi = _scene_with_lights((pos, LightFacet("point", i0 + rng.uniform(0, 3), 20.0)))
        assert light_density_at(hi, probe) >= light_density_at(lo, probe)


def test_bounding_extent():
    obj = SceneObject(id="a", name="A")
    assert bounding_extent(obj) == Vec3(1, 1, 1)
    obj.scale = Vec3(2, 2, 2)
    assert bounding_extent(obj) == Vec3(2, 2, 2)
    odd = SceneObject(id="b", name="B", scale=Vec3(2, 1, 3), base_extent=Vec3(0.5, 0.5, 0.5))
    assert bounding_extent(odd) == Vec3(1.0, 0.5, 1.5)
