"""Mutable scene state: the object collection, player, simulated clock,
and the single-writer host that serializes mutations.

A Scene is plain mutable data; SceneHost wraps one Scene behind a lock so
all writes happen on one serialized path while readers take deep-copied
snapshots they can carry across threads.
"""

from __future__ import annotations

import copy
import threading
from dataclasses import dataclass, field

from .types import Player, SceneError, SceneObject, Vec3


class NotFoundError(SceneError):
    def __init__(self, ref: str):
        super().__init__(f"no object matches {ref!r}")
        self.ref = ref


class AmbiguityError(SceneError):
    def __init__(self, ref: str, candidates: list[str]):
        names = ", ".join(candidates)
        super().__init__(f"{ref!r} is ambiguous: {names}")
        self.ref = ref
        self.candidates = list(candidates)


@dataclass
class Scene:
    """A scene: named objects, the player, ambient light, and a simulated
    clock.  ``version`` counts applied modification deltas; ``spawn_counter``
    numbers runtime-created objects deterministically."""

    objects: dict[str, SceneObject] = field(default_factory=dict)
    player: Player = field(default_factory=Player)
    ambient_light_intensity: float = 0.0
    clock: float = 0.0
    name: str = "untitled"
    version: int = 0
    spawn_counter: int = 0

    def __post_init__(self):
        if self.ambient_light_intensity < 0:
            raise ValueError("ambient_light_intensity must be >= 0")
        if self.clock < 0:
            raise ValueError("clock must be >= 0")

    # -- object management -------------------------------------------------

    def add_object(self, obj: SceneObject) -> None:
        if obj.id in self.objects:
            raise SceneError(f"duplicate object id {obj.id!r}")
        lowered = obj.name.lower()
        for other in self.objects.values():
            if other.name.lower() == lowered:
                raise SceneError(f"duplicate object name {obj.name!r}")
        if obj.parent is not None:
            if obj.parent not in self.objects:
                raise SceneError(f"object {obj.id!r}: unknown parent {obj.parent!r}")
        self.objects[obj.id] = obj
        self._check_parent_acyclic(obj.id)

    def set_parent(self, object_id: str, parent_id: str | None) -> None:
        obj = self.get(object_id)
        if parent_id is not None and parent_id not in self.objects:
            raise SceneError(f"unknown parent {parent_id!r}")
        previous = obj.parent
        obj.parent = parent_id
        try:
            self._check_parent_acyclic(object_id)
        except SceneError:
            obj.parent = previous
            raise

    def remove_object(self, object_id: str) -> SceneObject:
        children = [o.id for o in self.objects.values() if o.parent == object_id]
        for child_id in children:
            self.objects[child_id].parent = None
        return self.objects.pop(object_id)

    def get(self, object_id: str) -> SceneObject:
        try:
            return self.objects[object_id]
        except KeyError:
            raise NotFoundError(object_id) from None

    def _check_parent_acyclic(self, start_id: str) -> None:
        seen = set()
        cur: str | None = start_id
        while cur is not None:
            if cur in seen:
                raise SceneError(f"parent cycle through {start_id!r}")
            seen.add(cur)
            cur = self.objects[cur].parent if cur in self.objects else None

    def restore_from(self, other: "Scene") -> None:
        """Adopt another scene's state wholesale (atomic rollback support).
        ``other`` is consumed; callers pass a fresh snapshot."""
        self.objects = other.objects
        self.player = other.player
        self.ambient_light_intensity = other.ambient_light_intensity
        self.clock = other.clock
        self.name = other.name
        self.version = other.version
        self.spawn_counter = other.spawn_counter

    # -- queries ------------------------------------------------------------

    def resolve_object(self, ref: str) -> SceneObject:
        """Find an object by conversational reference: a case-insensitive
        exact name match wins; otherwise a unique case-insensitive
        substring match; otherwise NotFoundError / AmbiguityError."""
        if not ref:
            raise ValueError("empty object reference")
        needle = ref.lower()
        exact = [o for o in self.objects.values() if o.name.lower() == needle]
        if len(exact) == 1:
            return exact[0]
        partial = [o for o in self.objects.values() if needle in o.name.lower()]
        if len(partial) == 1:
            return partial[0]
        if not partial:
            raise NotFoundError(ref)
        raise AmbiguityError(ref, sorted(o.name for o in partial))

    # -- time ---------------------------------------------------------------

    def tick(self, dt: float) -> list[str]:
        """Advance the simulated clock and expire transient indicators.
        Returns the ids of removed objects."""
        if dt < 0:
            raise ValueError(f"dt {dt} must be >= 0")
        self.clock += dt
        expired = [
            o.id
            for o in self.objects.values()
            if o.transient_until is not None and o.transient_until <= self.clock
        ]
        for object_id in expired:
            self.remove_object(object_id)
        return expired

    # -- snapshots ----------------------------------------------------------

    def snapshot(self) -> "Scene":
        return copy.deepcopy(self)


class SceneHost:
    """Single-writer access to one Scene.  All mutations run through
    ``run`` (serialized by a lock); ``snapshot`` hands out deep copies
    that are safe to ship to other threads."""

    def __init__(self, scene: Scene):
        self._scene = scene
        self._lock = threading.RLock()

    def snapshot(self) -> Scene:
        with self._lock:
            return self._scene.snapshot()

    def run(self, fn, *args, **kwargs):
        """Execute fn(scene, *args, **kwargs) under the writer lock."""
        with self._lock:
            return fn(self._scene, *args, **kwargs)

    def tick(self, dt: float) -> list[str]:
        with self._lock:
            return self._scene.tick(dt)

    @property
    def version(self) -> int:
        with self._lock:
            return self._scene.version
