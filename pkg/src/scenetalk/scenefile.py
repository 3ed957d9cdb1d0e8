"""Declarative scene files: JSON in, validated Scene out, and back.

A scene file is the only authoring input the runtime needs: object
metadata (name, description, facets) plus transforms.  Validation
reports problems with a JSON path ("$.objects[3].scale: ...") so a
hand-edited file fails loudly and precisely.  ``save_scene`` is the
inverse serializer; transient runtime objects (highlight markers) are
never persisted.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .scene import Scene
from .types import (
    AudioFacet,
    ColorRGBA,
    LightFacet,
    Player,
    SceneObject,
    TextFacet,
    Vec3,
)

FORMAT_VERSION = 1
BUNDLED_SCENES = ("demo_room", "cat_park", "spaceship_room")


class SceneFileError(ValueError):
    """A scene file violated the schema.  ``path`` is the JSON path of
    the offending value."""

    def __init__(self, path: str, problem: str):
        super().__init__(f"{path}: {problem}")
        self.path = path
        self.problem = problem


def _expect(condition: bool, path: str, problem: str) -> None:
    if not condition:
        raise SceneFileError(path, problem)


def _get(mapping, key, path, required=True, default=None):
    if key not in mapping:
        _expect(not required, f"{path}.{key}", "missing required field")
        return default
    return mapping[key]


def _number(value, path) -> float:
    _expect(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        path, f"expected a number, got {type(value).__name__}",
    )
    return float(value)


def _string(value, path) -> str:
    _expect(isinstance(value, str), path, f"expected a string, got {type(value).__name__}")
    return value


def _boolean(value, path) -> bool:
    _expect(isinstance(value, bool), path, f"expected a boolean, got {type(value).__name__}")
    return value


def _vec3(value, path) -> Vec3:
    _expect(
        isinstance(value, list) and len(value) == 3,
        path, "expected an array of 3 numbers",
    )
    return Vec3(*(_number(v, f"{path}[{i}]") for i, v in enumerate(value)))


def _color(value, path) -> ColorRGBA:
    text = _string(value, path)
    try:
        return ColorRGBA.from_hex(text)
    except ValueError as e:
        raise SceneFileError(path, str(e)) from None


def _facet(value, path, builder, fields):
    _expect(isinstance(value, dict), path, "expected an object")
    unknown = set(value) - {name for name, _, _, _ in fields}
    _expect(not unknown, path, f"unknown field(s): {', '.join(sorted(unknown))}")
    kwargs = {}
    for name, convert, required, default in fields:
        raw = _get(value, name, path, required=required, default=None)
        if raw is None and not required:
            if default is not _OMIT:
                kwargs[name] = default
            continue
        kwargs[name] = convert(raw, f"{path}.{name}")
    try:
        return builder(**kwargs)
    except ValueError as e:
        raise SceneFileError(path, str(e)) from None


_OMIT = object()

_AUDIO_FIELDS = (
    ("clip_id", _string, True, None),
    ("volume", _number, False, _OMIT),
    ("pitch", _number, False, _OMIT),
    ("max_distance", _number, False, _OMIT),
    ("muted", _boolean, False, _OMIT),
    ("looping", _boolean, False, _OMIT),
)
_LIGHT_FIELDS = (
    ("kind", _string, True, None),
    ("intensity", _number, True, None),
    ("range", _number, False, _OMIT),
)
_TEXT_FIELDS = (
    ("content", _string, True, None),
    ("font_size", _number, True, None),
)

_OBJECT_KEYS = {
    "id", "name", "description", "physical", "position", "yaw", "scale",
    "base_extent", "parent", "tags", "color", "text", "audio", "light",
    "annotated",
}


def _object(entry, path) -> tuple[SceneObject, str | None]:
    _expect(isinstance(entry, dict), path, "expected an object")
    unknown = set(entry) - _OBJECT_KEYS
    _expect(not unknown, path, f"unknown field(s): {', '.join(sorted(unknown))}")

    tags = _get(entry, "tags", path, required=False, default=[])
    _expect(
        isinstance(tags, list) and all(isinstance(t, str) for t in tags),
        f"{path}.tags", "expected an array of strings",
    )

    parent = _get(entry, "parent", path, required=False)
    if parent is not None:
        parent = _string(parent, f"{path}.parent")

    kwargs = dict(
        id=_string(_get(entry, "id", path), f"{path}.id"),
        name=_string(_get(entry, "name", path), f"{path}.name"),
        description=_string(_get(entry, "description", path), f"{path}.description"),
        physical=_boolean(_get(entry, "physical", path), f"{path}.physical"),
        position=_vec3(_get(entry, "position", path), f"{path}.position"),
        base_extent=_vec3(_get(entry, "base_extent", path), f"{path}.base_extent"),
        tags=tuple(tags),
    )
    if "yaw" in entry:
        kwargs["yaw"] = _number(entry["yaw"], f"{path}.yaw")
    if "scale" in entry:
        kwargs["scale"] = _vec3(entry["scale"], f"{path}.scale")
    if "annotated" in entry:
        kwargs["annotated"] = _boolean(entry["annotated"], f"{path}.annotated")
    if "color" in entry and entry["color"] is not None:
        kwargs["color"] = _color(entry["color"], f"{path}.color")
    if "text" in entry and entry["text"] is not None:
        kwargs["text"] = _facet(entry["text"], f"{path}.text", TextFacet, _TEXT_FIELDS)
    if "audio" in entry and entry["audio"] is not None:
        kwargs["audio"] = _facet(entry["audio"], f"{path}.audio", AudioFacet, _AUDIO_FIELDS)
    if "light" in entry and entry["light"] is not None:
        kwargs["light"] = _facet(entry["light"], f"{path}.light", LightFacet, _LIGHT_FIELDS)

    try:
        obj = SceneObject(**kwargs)
    except ValueError as e:
        raise SceneFileError(path, str(e)) from None
    return obj, parent


def parse_scene(document, source: str = "$") -> Scene:
    """Validate a parsed JSON document and build the Scene."""
    _expect(isinstance(document, dict), source, "expected a JSON object at the top level")
    version = _get(document, "format", source)
    _expect(
        version == FORMAT_VERSION,
        f"{source}.format", f"unsupported format {version!r}, expected {FORMAT_VERSION}",
    )
    name = _string(_get(document, "name", source), f"{source}.name")
    ambient = _number(
        _get(document, "ambient_light_intensity", source),
        f"{source}.ambient_light_intensity",
    )
    _expect(ambient >= 0, f"{source}.ambient_light_intensity", "must be >= 0")

    player_entry = _get(document, "player", source)
    _expect(isinstance(player_entry, dict), f"{source}.player", "expected an object")
    player = Player(
        position=_vec3(_get(player_entry, "position", f"{source}.player"),
                       f"{source}.player.position"),
        yaw=_number(_get(player_entry, "yaw", f"{source}.player"),
                    f"{source}.player.yaw"),
    )

    entries = _get(document, "objects", source)
    _expect(isinstance(entries, list), f"{source}.objects", "expected an array")

    scene = Scene(name=name, player=player, ambient_light_intensity=ambient)
    parents: list[tuple[str, str, str]] = []
    seen_ids: dict[str, int] = {}
    for i, entry in enumerate(entries):
        path = f"{source}.objects[{i}]"
        obj, parent = _object(entry, path)
        if obj.id in seen_ids:
            raise SceneFileError(f"{path}.id", f"duplicate id {obj.id!r}")
        seen_ids[obj.id] = i
        try:
            scene.add_object(obj)
        except ValueError as e:
            raise SceneFileError(path, str(e)) from None
        if parent is not None:
            parents.append((obj.id, parent, f"{path}.parent"))
    for child_id, parent_id, path in parents:
        _expect(parent_id in scene.objects, path, f"unknown parent {parent_id!r}")
        try:
            scene.set_parent(child_id, parent_id)
        except ValueError as e:
            raise SceneFileError(path, str(e)) from None
    return scene


def load_scene(path) -> Scene:
    text = Path(path).read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneFileError("$", f"invalid JSON: {e}") from None
    return parse_scene(document)


def load_bundled(scene_id: str) -> Scene:
    if scene_id not in BUNDLED_SCENES:
        raise SceneFileError(
            "$", f"unknown bundled scene {scene_id!r}; choose from {', '.join(BUNDLED_SCENES)}"
        )
    ref = resources.files("scenetalk.resources.scenes") / f"{scene_id}.json"
    return parse_scene(json.loads(ref.read_text(encoding="utf-8")))


def _facet_dict(facet) -> dict:
    if isinstance(facet, AudioFacet):
        return {
            "clip_id": facet.clip_id, "volume": facet.volume, "pitch": facet.pitch,
            "max_distance": facet.max_distance, "muted": facet.muted,
            "looping": facet.looping,
        }
    if isinstance(facet, LightFacet):
        out = {"kind": facet.kind, "intensity": facet.intensity}
        if facet.range is not None:
            out["range"] = facet.range
        return out
    return {"content": facet.content, "font_size": facet.font_size}


def scene_document(scene: Scene) -> dict:
    """Inverse of parse_scene.  Transient indicator objects are runtime
    state, not authored content, and are skipped."""
    objects = []
    for obj in scene.objects.values():
        if obj.transient_until is not None:
            continue
        entry = {
            "id": obj.id,
            "name": obj.name,
            "description": obj.description,
            "physical": obj.physical,
            "position": obj.position.to_list(),
            "yaw": obj.yaw,
            "scale": obj.scale.to_list(),
            "base_extent": obj.base_extent.to_list(),
        }
        if obj.parent is not None:
            entry["parent"] = obj.parent
        if obj.tags:
            entry["tags"] = list(obj.tags)
        if obj.color is not None:
            entry["color"] = obj.color.hex
        if obj.text is not None:
            entry["text"] = _facet_dict(obj.text)
        if obj.audio is not None:
            entry["audio"] = _facet_dict(obj.audio)
        if obj.light is not None:
            entry["light"] = _facet_dict(obj.light)
        if not obj.annotated:
            entry["annotated"] = False
        objects.append(entry)
    return {
        "format": FORMAT_VERSION,
        "name": scene.name,
        "ambient_light_intensity": scene.ambient_light_intensity,
        "player": {
            "position": scene.player.position.to_list(),
            "yaw": scene.player.yaw,
        },
        "objects": objects,
    }


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(
        json.dumps(scene_document(scene), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
