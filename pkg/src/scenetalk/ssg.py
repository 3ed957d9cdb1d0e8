"""The semantic scene graph: an accessibility-augmented, text-serializable
view of a scene snapshot, rebuilt for every model query.

Each annotated, non-transient object becomes one node carrying the raw
authoring fields (name, description, physical flag, tags, transform,
parent, facets) plus the derived accessibility fields: egocentric
direction/distance relative to the player, and the light density at the
object's position.  Node order is ascending distance from the player,
ties broken by name, so serializations are deterministic.

The text form round-trips: parse_ssg(serialize_ssg(g)) == g.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .scene import Scene
from .spatial import (
    DensityLabel,
    Direction,
    DistanceLabel,
    egocentric_direction,
    euclidean_distance,
    light_density_at,
    qualitative_density,
    qualitative_distance,
)
from .types import Player, Vec3


class SsgSyntaxError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SsgValidationError(ValueError):
    pass


@dataclass(frozen=True)
class EgocentricInfo:
    direction: Direction
    distance: float
    qualitative: DistanceLabel


@dataclass(frozen=True)
class LightInfo:
    value: float
    label: DensityLabel


@dataclass(frozen=True)
class TextInfo:
    content: str
    font_size: float


@dataclass(frozen=True)
class AudioInfo:
    muted: bool
    volume: float
    pitch: float
    max_distance: float


@dataclass(frozen=True)
class SsgNode:
    name: str
    description: str
    physical: bool
    attached_behavior_tags: tuple[str, ...]
    position: Vec3
    scale: Vec3
    parent: str | None
    color_hex: str | None
    text: TextInfo | None
    egocentric: EgocentricInfo
    light_density: LightInfo
    audio: AudioInfo | None


@dataclass(frozen=True)
class SemanticSceneGraph:
    nodes: tuple[SsgNode, ...]
    player: Player
    ambient_light_intensity: float
    generated_at: float


def build_ssg(scene: Scene) -> SemanticSceneGraph:
    """Derive the SSG from a scene snapshot.  Pure; deterministic."""
    player = scene.player
    nodes = []
    for obj in scene.objects.values():
        if not obj.annotated or obj.transient_until is not None:
            continue
        distance = euclidean_distance(player.position, obj.position)
        density = light_density_at(scene, obj.position)
        parent_name = scene.objects[obj.parent].name if obj.parent else None
        nodes.append(
            SsgNode(
                name=obj.name,
                description=obj.description,
                physical=obj.physical,
                attached_behavior_tags=tuple(obj.tags),
                position=obj.position,
                scale=obj.scale,
                parent=parent_name,
                color_hex=obj.color.hex if obj.color else None,
                text=TextInfo(obj.text.content, obj.text.font_size) if obj.text else None,
                egocentric=EgocentricInfo(
                    egocentric_direction(player, obj.position),
                    distance,
                    qualitative_distance(distance),
                ),
                light_density=LightInfo(density, qualitative_density(density)),
                audio=AudioInfo(
                    obj.audio.muted, obj.audio.volume, obj.audio.pitch, obj.audio.max_distance
                )
                if obj.audio
                else None,
            )
        )
    nodes.sort(key=lambda n: (n.egocentric.distance, n.name))
    return SemanticSceneGraph(
        nodes=tuple(nodes),
        player=Player(player.position, player.yaw),
        ambient_light_intensity=scene.ambient_light_intensity,
        generated_at=scene.clock,
    )


# -- serialization ----------------------------------------------------------


def _fmt_num(x: float) -> str:
    return repr(float(x))


def _fmt_vec(v: Vec3) -> str:
    return f"({_fmt_num(v.x)}, {_fmt_num(v.y)}, {_fmt_num(v.z)})"


def _fmt_str(s: str) -> str:
    escaped = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def serialize_ssg(ssg: SemanticSceneGraph) -> str:
    out = [
        "ssg 1",
        f"generated_at {_fmt_num(ssg.generated_at)}",
        f"ambient_light_intensity {_fmt_num(ssg.ambient_light_intensity)}",
        f"player {_fmt_vec(ssg.player.position)} yaw {_fmt_num(ssg.player.yaw)}",
    ]
    for node in ssg.nodes:
        out.append("")
        out.append("node")
        out.append(f"  name {_fmt_str(node.name)}")
        out.append(f"  description {_fmt_str(node.description)}")
        out.append(f"  physical {_fmt_bool(node.physical)}")
        if node.attached_behavior_tags:
            joined = " ".join(_fmt_str(t) for t in node.attached_behavior_tags)
            out.append(f"  tags {joined}")
        out.append(f"  position {_fmt_vec(node.position)}")
        out.append(f"  scale {_fmt_vec(node.scale)}")
        if node.parent is not None:
            out.append(f"  parent {_fmt_str(node.parent)}")
        if node.color_hex is not None:
            out.append(f"  color {node.color_hex}")
        if node.text is not None:
            out.append(f"  text {_fmt_str(node.text.content)} size {_fmt_num(node.text.font_size)}")
        ego = node.egocentric
        out.append(
            f"  egocentric {ego.direction.value} {_fmt_num(ego.distance)} {ego.qualitative.value}"
        )
        light = node.light_density
        out.append(f"  light_density {_fmt_num(light.value)} {light.label.value}")
        if node.audio is not None:
            a = node.audio
            out.append(
                f"  audio muted {_fmt_bool(a.muted)} volume {_fmt_num(a.volume)}"
                f" pitch {_fmt_num(a.pitch)} max_distance {_fmt_num(a.max_distance)}"
            )
        out.append("end")
    return "\n".join(out) + "\n"


# -- parsing ----------------------------------------------------------------

_NUMBER_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_COLOR_RE = re.compile(r"#[0-9A-Fa-f]{6}(?:[0-9A-Fa-f]{2})?")


@dataclass
class _Tok:
    kind: str
    value: object
    column: int


def _scan_line(text: str, lineno: int) -> list[_Tok]:
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        col = i + 1
        if ch == '"':
            i += 1
            parts = []
            while True:
                if i >= n:
                    raise SsgSyntaxError(lineno, col, "unterminated string")
                c = text[i]
                if c == "\\":
                    if i + 1 >= n:
                        raise SsgSyntaxError(lineno, col, "unterminated string")
                    esc = text[i + 1]
                    parts.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    i += 2
                elif c == '"':
                    i += 1
                    break
                else:
                    parts.append(c)
                    i += 1
            toks.append(_Tok("string", "".join(parts), col))
            continue
        if ch == "(":
            close = text.find(")", i)
            if close == -1:
                raise SsgSyntaxError(lineno, col, "unterminated vector")
            body = text[i + 1 : close]
            comps = [p.strip() for p in body.split(",")]
            if len(comps) != 3:
                raise SsgSyntaxError(lineno, col, "vector needs 3 components")
            try:
                vec = Vec3(*(float(p) for p in comps))
            except ValueError:
                raise SsgSyntaxError(lineno, col, f"bad vector component in ({body})") from None
            toks.append(_Tok("vector", vec, col))
            i = close + 1
            continue
        if ch == "#":
            m = _COLOR_RE.match(text, i)
            if not m:
                raise SsgSyntaxError(lineno, col, "bad HEX color")
            toks.append(_Tok("color", m.group(0).upper(), col))
            i = m.end()
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            toks.append(_Tok("number", float(m.group(0)), col))
            i = m.end()
            continue
        m = _WORD_RE.match(text, i)
        if m:
            toks.append(_Tok("word", m.group(0), col))
            i = m.end()
            continue
        raise SsgSyntaxError(lineno, col, f"unexpected character {ch!r}")
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok], lineno: int):
        self.toks = toks
        self.lineno = lineno
        self.pos = 0

    def take(self, kind: str, what: str = "") -> object:
        if self.pos >= len(self.toks):
            raise SsgSyntaxError(self.lineno, len(self.toks) and self.toks[-1].column or 1,
                                 f"expected {what or kind} at end of line")
        tok = self.toks[self.pos]
        if tok.kind != kind:
            raise SsgSyntaxError(self.lineno, tok.column, f"expected {what or kind}")
        self.pos += 1
        return tok.value

    def take_word(self, expected: str) -> None:
        got = self.take("word", f"{expected!r}")
        if got != expected:
            raise SsgSyntaxError(self.lineno, self.toks[self.pos - 1].column, f"expected {expected!r}")

    def take_bool(self) -> bool:
        got = self.take("word", "true or false")
        if got not in ("true", "false"):
            raise SsgSyntaxError(self.lineno, self.toks[self.pos - 1].column, "expected true or false")
        return got == "true"

    def rest(self) -> bool:
        return self.pos < len(self.toks)

    def done(self) -> None:
        if self.pos < len(self.toks):
            tok = self.toks[self.pos]
            raise SsgSyntaxError(self.lineno, tok.column, "trailing tokens on line")


def _enum_value(cursor: _Cursor, enum_cls, what: str):
    word = cursor.take("word", what)
    try:
        return enum_cls(word)
    except ValueError:
        raise SsgSyntaxError(
            cursor.lineno, cursor.toks[cursor.pos - 1].column, f"unknown {what} {word!r}"
        ) from None


def parse_ssg(text: str) -> SemanticSceneGraph:
    """Parse the serialized form back into a SemanticSceneGraph.

    Raises SsgSyntaxError with line/column on malformed documents and
    SsgValidationError on semantic violations (duplicate node names)."""
    lines = text.split("\n")
    scanned = []
    for lineno, raw in enumerate(lines, start=1):
        toks = _scan_line(raw, lineno)
        if toks:
            scanned.append(_Cursor(toks, lineno))
    if not scanned:
        raise SsgSyntaxError(1, 1, "empty document")

    it = iter(scanned)

    def next_line(what: str) -> _Cursor:
        try:
            return next(it)
        except StopIteration:
            raise SsgSyntaxError(len(lines), 1, f"expected {what}, got end of document") from None

    header = next_line("ssg header")
    header.take_word("ssg")
    version = header.take("number", "format version")
    if version != 1:
        raise SsgSyntaxError(header.lineno, 1, f"unsupported ssg version {version}")
    header.done()

    gen = next_line("generated_at line")
    gen.take_word("generated_at")
    generated_at = gen.take("number")
    gen.done()

    amb = next_line("ambient_light_intensity line")
    amb.take_word("ambient_light_intensity")
    ambient = amb.take("number")
    amb.done()

    ply = next_line("player line")
    ply.take_word("player")
    player_pos = ply.take("vector", "player position")
    ply.take_word("yaw")
    player_yaw = ply.take("number", "yaw degrees")
    ply.done()

    nodes: list[SsgNode] = []
    for cursor in it:
        head = cursor.take("word", "'node'")
        if head != "node":
            raise SsgSyntaxError(cursor.lineno, cursor.toks[0].column, "expected 'node'")
        cursor.done()
        nodes.append(_parse_node(it, cursor.lineno, len(lines)))

    seen = set()
    for node in nodes:
        lowered = node.name.lower()
        if lowered in seen:
            raise SsgValidationError(f"duplicate node name {node.name!r}")
        seen.add(lowered)

    return SemanticSceneGraph(
        nodes=tuple(nodes),
        player=Player(player_pos, player_yaw),
        ambient_light_intensity=ambient,
        generated_at=generated_at,
    )


def _parse_node(it, start_line: int, total_lines: int) -> SsgNode:
    fields: dict[str, object] = {}
    closed = False
    for cursor in it:
        key = cursor.take("word", "field name or 'end'")
        if key == "end":
            cursor.done()
            closed = True
            break
        if key in fields:
            raise SsgSyntaxError(cursor.lineno, cursor.toks[0].column, f"duplicate field {key!r}")
        if key == "name" or key == "description" or key == "parent":
            fields[key] = cursor.take("string", f"{key} string")
        elif key == "physical":
            fields[key] = cursor.take_bool()
        elif key == "tags":
            tags = []
            while cursor.rest():
                tags.append(cursor.take("string", "tag string"))
            if not tags:
                raise SsgSyntaxError(cursor.lineno, cursor.toks[0].column, "tags line needs entries")
            fields[key] = tuple(tags)
        elif key == "position" or key == "scale":
            fields[key] = cursor.take("vector", f"{key} vector")
        elif key == "color":
            fields[key] = cursor.take("color", "HEX color")
        elif key == "text":
            content = cursor.take("string", "text content")
            cursor.take_word("size")
            size = cursor.take("number", "font size")
            fields[key] = TextInfo(content, size)
        elif key == "egocentric":
            direction = _enum_value(cursor, Direction, "direction label")
            distance = cursor.take("number", "distance")
            qualitative = _enum_value(cursor, DistanceLabel, "distance label")
            fields[key] = EgocentricInfo(direction, distance, qualitative)
        elif key == "light_density":
            value = cursor.take("number", "density value")
            label = _enum_value(cursor, DensityLabel, "density label")
            fields[key] = LightInfo(value, label)
        elif key == "audio":
            cursor.take_word("muted")
            muted = cursor.take_bool()
            cursor.take_word("volume")
            volume = cursor.take("number", "volume")
            cursor.take_word("pitch")
            pitch = cursor.take("number", "pitch")
            cursor.take_word("max_distance")
            max_distance = cursor.take("number", "max_distance")
            fields[key] = AudioInfo(muted, volume, pitch, max_distance)
        else:
            raise SsgSyntaxError(cursor.lineno, cursor.toks[0].column, f"unknown field {key!r}")
        cursor.done()
    if not closed:
        raise SsgSyntaxError(total_lines, 1, "node block missing 'end'")
    for required in ("name", "description", "physical", "position", "scale",
                     "egocentric", "light_density"):
        if required not in fields:
            raise SsgSyntaxError(start_line, 1, f"node missing field {required!r}")
    return SsgNode(
        name=fields["name"],
        description=fields["description"],
        physical=fields["physical"],
        attached_behavior_tags=fields.get("tags", ()),
        position=fields["position"],
        scale=fields["scale"],
        parent=fields.get("parent"),
        color_hex=fields.get("color"),
        text=fields.get("text"),
        egocentric=fields["egocentric"],
        light_density=fields["light_density"],
        audio=fields.get("audio"),
    )
