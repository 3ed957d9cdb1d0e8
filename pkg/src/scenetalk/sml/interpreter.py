"""Execute validated programs against live scene state.

Statements apply in order; any failure restores the pre-call snapshot so
callers never observe a half-applied program.  Every mutation is recorded
as an invertible delta entry so the most recent program can be reverted
(undo / verification support).

Delta entries address three owners: a scene object id, the literal
``"player"``, or the literal ``"scene"`` (ambient intensity and the spawn
counter).  Facet fields use dotted paths (``audio.volume``); writing one
replaces the frozen facet, which re-checks its own invariants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

from ..scene import Scene
from ..spatial import bounding_extent, directional_half_extent, facing_vector
from ..types import ColorRGBA, LightFacet, SceneObject, Vec3, normalize_yaw
from .syntax import Command, SmlProgram, SmlRuntimeError, SmlStatement, SpecialTarget, StaleDeltaError

CREATED_LIGHT_RANGE = 10.0
HIGHLIGHT_SECONDS = 5.0
HIGHLIGHT_COLOR = ColorRGBA(255, 255, 255, 90)


@dataclass(frozen=True)
class DeltaEntry:
    object_id: str  # object id, "player", or "scene"
    field_path: str
    old: object
    new: object


@dataclass
class SceneDelta:
    entries: list[DeltaEntry] = field(default_factory=list)
    created_ids: list[str] = field(default_factory=list)
    base_version: int = 0
    result_version: int = 0


def _owner(scene: Scene, object_id: str):
    if object_id == "scene":
        return scene
    if object_id == "player":
        return scene.player
    return scene.get(object_id)


def get_field(scene: Scene, object_id: str, path: str):
    owner = _owner(scene, object_id)
    head, _, rest = path.partition(".")
    value = getattr(owner, head)
    return getattr(value, rest) if rest else value


def set_field(scene: Scene, object_id: str, path: str, value) -> None:
    owner = _owner(scene, object_id)
    head, _, rest = path.partition(".")
    if rest:
        facet = getattr(owner, head)
        if facet is None:
            raise SceneDeltaPathError(object_id, path)
        setattr(owner, head, replace(facet, **{rest: value}))
    else:
        setattr(owner, head, value)


class SceneDeltaPathError(ValueError):
    def __init__(self, object_id: str, path: str):
        super().__init__(f"{object_id}: no facet on path {path!r}")


class _Execution:
    def __init__(self, scene: Scene):
        self.scene = scene
        self.entries: list[DeltaEntry] = []
        self.created_ids: list[str] = []

    def write(self, object_id: str, path: str, new) -> None:
        old = get_field(self.scene, object_id, path)
        set_field(self.scene, object_id, path, new)
        self.entries.append(DeltaEntry(object_id, path, old, new))

    def spawn(self, obj: SceneObject) -> None:
        counter = self.scene.spawn_counter
        self.scene.add_object(obj)
        self.scene.spawn_counter = counter + 1
        self.entries.append(DeltaEntry("scene", "spawn_counter", counter, counter + 1))
        self.created_ids.append(obj.id)

    def next_spawn_number(self) -> int:
        return self.scene.spawn_counter + 1


def interpret(
    program: SmlProgram,
    scene: Scene,
    *,
    fault_hook: Callable[[int], None] | None = None,
) -> SceneDelta:
    """Apply the program atomically and return the invertible delta.

    ``fault_hook`` is a test seam: it is invoked with each statement index
    before that statement applies, and anything it raises triggers the
    same rollback path a real runtime failure would.
    """
    before = scene.snapshot()
    execution = _Execution(scene)
    index = -1
    try:
        for index, stmt in enumerate(program.statements):
            if fault_hook is not None:
                fault_hook(index)
            _apply(stmt, execution)
    except Exception as e:
        scene.restore_from(before)
        raise SmlRuntimeError(index, str(e)) from e
    scene.version += 1
    return SceneDelta(
        entries=execution.entries,
        created_ids=execution.created_ids,
        base_version=before.version,
        result_version=scene.version,
    )


def revert(delta: SceneDelta, scene: Scene) -> None:
    """Undo the most recently applied delta.

    Created objects that already expired off the clock are skipped, so an
    undo arriving after a highlight faded still succeeds.
    """
    if scene.version != delta.result_version:
        raise StaleDeltaError(
            f"scene at version {scene.version}, delta produced version "
            f"{delta.result_version}; only the most recent delta can be reverted"
        )
    for object_id in delta.created_ids:
        scene.objects.pop(object_id, None)
    for entry in reversed(delta.entries):
        set_field(scene, entry.object_id, entry.field_path, entry.old)
    scene.version = delta.base_version


def _resolve(execution: _Execution, ref: str) -> SceneObject:
    return execution.scene.resolve_object(ref)


def _entity_position(execution: _Execution, who: str | SpecialTarget) -> Vec3:
    if who is SpecialTarget.PLAYER:
        return execution.scene.player.position
    return _resolve(execution, who).position


def _yaw_toward(origin: Vec3, focus: Vec3) -> float:
    dx = focus.x - origin.x
    dz = focus.z - origin.z
    if math.hypot(dx, dz) < 1e-9:
        raise ValueError("cannot face a coincident point")
    return normalize_yaw(math.degrees(math.atan2(dx, dz)))


def _apply(stmt: SmlStatement, execution: _Execution) -> None:
    scene = execution.scene
    cmd = stmt.command

    if cmd == Command.SET_COLOR:
        obj = _resolve(execution, stmt.target)
        execution.write(obj.id, "color", stmt.args[0])
    elif cmd == Command.SIMPLIFY_MATERIAL:
        obj = _resolve(execution, stmt.target)
        if obj.has_tag("textured"):
            execution.write(obj.id, "tags", tuple(t for t in obj.tags if t != "textured"))
    elif cmd == Command.HIGHLIGHT:
        obj = _resolve(execution, stmt.target)
        n = execution.next_spawn_number()
        extent = bounding_extent(obj)
        diameter = 1.25 * max(extent.x, extent.y, extent.z)
        execution.spawn(
            SceneObject(
                id=f"highlight-{n}",
                name=f"Highlight {n}",
                description="A transient marker sphere wrapping the highlighted object.",
                physical=False,
                position=obj.position,
                scale=Vec3(diameter, diameter, diameter),
                color=HIGHLIGHT_COLOR,
                tags=("highlight",),
                transient_until=scene.clock + HIGHLIGHT_SECONDS,
            )
        )
    elif cmd == Command.SET_SCALE:
        obj = _resolve(execution, stmt.target)
        execution.write(obj.id, "scale", stmt.args[0])
    elif cmd == Command.SCALE_BY:
        obj = _resolve(execution, stmt.target)
        execution.write(obj.id, "scale", obj.scale.scaled(stmt.args[0]))
    elif cmd == Command.SET_TEXT_SIZE:
        obj = _resolve(execution, stmt.target)
        if obj.text is None:
            raise ValueError(f"{obj.name!r} has no text to resize")
        execution.write(obj.id, "text.font_size", stmt.args[0])
    elif cmd == Command.MOVE_TO:
        if stmt.target is SpecialTarget.PLAYER:
            execution.write("player", "position", stmt.args[0])
        else:
            obj = _resolve(execution, stmt.target)
            execution.write(obj.id, "position", stmt.args[0])
    elif cmd == Command.MOVE_BY:
        if stmt.target is SpecialTarget.PLAYER:
            execution.write("player", "position", scene.player.position + stmt.args[0])
        else:
            obj = _resolve(execution, stmt.target)
            execution.write(obj.id, "position", obj.position + stmt.args[0])
    elif cmd == Command.MOVE_NEAR:
        obj = _resolve(execution, stmt.target)
        ref = _resolve(execution, stmt.args[0])
        if obj.id == ref.id:
            raise ValueError(f"cannot move {obj.name!r} near itself")
        facing = facing_vector(scene.player.yaw)
        gap = directional_half_extent(bounding_extent(ref), facing) + directional_half_extent(
            bounding_extent(obj), facing
        )
        destination = Vec3(
            ref.position.x - facing.x * gap,
            ref.position.y,
            ref.position.z - facing.z * gap,
        )
        execution.write(obj.id, "position", destination)
    elif cmd == Command.MOVE_PLAYER:
        execution.write("player", "position", stmt.args[0])
    elif cmd == Command.FACE:
        focus = _entity_position(execution, stmt.args[0])
        if stmt.target is SpecialTarget.PLAYER:
            execution.write("player", "yaw", _yaw_toward(scene.player.position, focus))
        else:
            obj = _resolve(execution, stmt.target)
            execution.write(obj.id, "yaw", _yaw_toward(obj.position, focus))
    elif cmd == Command.SET_LIGHT_INTENSITY:
        obj = _resolve(execution, stmt.target)
        if obj.light is None:
            raise ValueError(f"{obj.name!r} has no light source")
        execution.write(obj.id, "light.intensity", stmt.args[0])
    elif cmd == Command.CREATE_LIGHT:
        n = execution.next_spawn_number()
        execution.spawn(
            SceneObject(
                id=f"light-{n}",
                name=f"Point Light {n}",
                description="A glowing sphere carrying a point light.",
                physical=False,
                position=stmt.args[0],
                scale=Vec3(0.2, 0.2, 0.2),
                light=LightFacet("point", stmt.args[1], CREATED_LIGHT_RANGE),
            )
        )
    elif cmd == Command.CREATE_PRIMITIVE:
        shape, position = stmt.args
        n = execution.next_spawn_number()
        execution.spawn(
            SceneObject(
                id=f"{shape}-{n}",
                name=f"{shape.capitalize()} {n}",
                description=f"A plain {shape} created at runtime.",
                position=position,
                color=ColorRGBA(128, 128, 128),
            )
        )
    elif cmd == Command.SET_VOLUME:
        obj = _require_audio(execution, stmt.target)
        execution.write(obj.id, "audio.volume", stmt.args[0])
    elif cmd == Command.SET_PITCH:
        obj = _require_audio(execution, stmt.target)
        execution.write(obj.id, "audio.pitch", stmt.args[0])
    elif cmd == Command.SET_RANGE:
        obj = _require_audio(execution, stmt.target)
        execution.write(obj.id, "audio.max_distance", stmt.args[0])
    elif cmd == Command.MUTE:
        obj = _require_audio(execution, stmt.target)
        execution.write(obj.id, "audio.muted", True)
    elif cmd == Command.UNMUTE:
        obj = _require_audio(execution, stmt.target)
        execution.write(obj.id, "audio.muted", False)
    elif cmd == Command.SET_AMBIENT:
        execution.write("scene", "ambient_light_intensity", stmt.args[0])
    else:
        raise AssertionError(f"unhandled command {cmd}")


def _require_audio(execution: _Execution, target: str) -> SceneObject:
    obj = _resolve(execution, target)
    if obj.audio is None:
        raise ValueError(f"{obj.name!r} has no audio source")
    return obj
