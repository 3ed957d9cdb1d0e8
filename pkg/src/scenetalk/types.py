"""Core scene value types: vectors, colors, facets, objects, player.

Everything here is a plain dataclass with eager invariant checks, so a
constructed value is always a valid one.  Scene state that *changes*
(objects collection, clock, version) lives in scene.py.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace


class SceneError(ValueError):
    """Base class for scene-state errors."""


@dataclass(frozen=True)
class Vec3:
    """A point or extent in meters (each unit is a meter)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise ValueError(f"non-finite vector component: {c!r}")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "z", float(self.z))

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def hadamard(self, other: "Vec3") -> "Vec3":
        """Componentwise product (used for extent = base * scale)."""
        return Vec3(self.x * other.x, self.y * other.y, self.z * other.z)

    def to_list(self) -> list[float]:
        return [self.x, self.y, self.z]

    @classmethod
    def from_list(cls, values) -> "Vec3":
        if len(values) != 3:
            raise ValueError(f"vector needs 3 components, got {len(values)}")
        return cls(*(float(v) for v in values))


@dataclass(frozen=True)
class ColorRGBA:
    """8-bit RGBA color.  Serialized as uppercase #RRGGBB, with the alpha
    byte appended only when alpha < 255."""

    r: int
    g: int
    b: int
    a: int = 255

    def __post_init__(self):
        for name in ("r", "g", "b", "a"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v <= 255:
                raise ValueError(f"color channel {name}={v!r} outside 0-255")

    @property
    def hex(self) -> str:
        s = f"#{self.r:02X}{self.g:02X}{self.b:02X}"
        if self.a < 255:
            s += f"{self.a:02X}"
        return s

    @classmethod
    def from_hex(cls, text: str) -> "ColorRGBA":
        if not text.startswith("#"):
            raise ValueError(f"bad HEX color {text!r}: need #RRGGBB or #RRGGBBAA")
        body = text[1:]
        if len(body) not in (6, 8) or any(c not in "0123456789abcdefABCDEF" for c in body):
            raise ValueError(f"bad HEX color {text!r}: need #RRGGBB or #RRGGBBAA")
        r, g, b = (int(body[i : i + 2], 16) for i in (0, 2, 4))
        a = int(body[6:8], 16) if len(body) == 8 else 255
        return cls(r, g, b, a)


@dataclass(frozen=True)
class AudioFacet:
    """Sound-source state.  The clip itself is referenced by id only; no
    audio assets exist in this runtime."""

    clip_id: str
    volume: float = 1.0
    pitch: float = 1.0
    max_distance: float = 10.0
    muted: bool = False
    looping: bool = True

    def __post_init__(self):
        if not 0.0 <= self.volume <= 1.0:
            raise ValueError(f"volume {self.volume} outside [0, 1]")
        if not 0.1 <= self.pitch <= 3.0:
            raise ValueError(f"pitch {self.pitch} outside [0.1, 3.0]")
        if not self.max_distance > 0:
            raise ValueError(f"max_distance {self.max_distance} must be > 0")


@dataclass(frozen=True)
class LightFacet:
    """A point or directional light source."""

    kind: str  # "point" | "directional"
    intensity: float
    range: float | None = None  # meters, point lights only

    def __post_init__(self):
        if self.kind not in ("point", "directional"):
            raise ValueError(f"unknown light kind {self.kind!r}")
        if self.intensity < 0:
            raise ValueError(f"light intensity {self.intensity} must be >= 0")
        if self.kind == "point":
            if self.range is None or not math.isfinite(self.range) or self.range <= 0:
                raise ValueError("point lights need a finite positive range")


@dataclass(frozen=True)
class TextFacet:
    content: str
    font_size: float

    def __post_init__(self):
        if not self.font_size > 0:
            raise ValueError(f"font_size {self.font_size} must be > 0")


@dataclass
class SceneObject:
    """A named scene entity with a transform, optional facets, and the
    developer accessibility metadata (name, description, physical flag).

    ``base_extent`` is the unscaled per-axis size in meters; the world
    extent is base_extent * scale (see spatial.bounding_extent).
    ``transient_until`` marks indicator scaffolding that the clock removes.
    """

    id: str
    name: str
    description: str = ""
    physical: bool = True
    position: Vec3 = field(default_factory=lambda: Vec3(0, 0, 0))
    yaw: float = 0.0
    scale: Vec3 = field(default_factory=lambda: Vec3(1, 1, 1))
    base_extent: Vec3 = field(default_factory=lambda: Vec3(1, 1, 1))
    parent: str | None = None
    tags: tuple[str, ...] = ()
    color: ColorRGBA | None = None
    text: TextFacet | None = None
    audio: AudioFacet | None = None
    light: LightFacet | None = None
    transient_until: float | None = None
    annotated: bool = True

    def __post_init__(self):
        if not self.id:
            raise ValueError("object id must be non-empty")
        if not self.name:
            raise ValueError(f"object {self.id!r} needs a name")
        for axis in ("x", "y", "z"):
            if not getattr(self.scale, axis) > 0:
                raise ValueError(f"object {self.id!r}: scale.{axis} must be > 0")
            if not getattr(self.base_extent, axis) > 0:
                raise ValueError(f"object {self.id!r}: base_extent.{axis} must be > 0")
        self.tags = tuple(self.tags)

    def has_tag(self, tag: str) -> bool:
        return tag in self.tags

    def copy(self) -> "SceneObject":
        return replace(self)


def normalize_yaw(yaw: float) -> float:
    return float(yaw) % 360.0


@dataclass
class Player:
    """The user's avatar.  Yaw 0 faces +z; yaw increases clockwise when
    viewed from above (yaw 90 faces +x)."""

    position: Vec3 = field(default_factory=lambda: Vec3(0, 1.6, 0))
    yaw: float = 0.0

    def __post_init__(self):
        self.yaw = normalize_yaw(self.yaw)

    def copy(self) -> "Player":
        return Player(self.position, self.yaw)


# Approximate player bounding size, used for move-near clearance.
PLAYER_EXTENT = Vec3(0.5, 1.7, 0.5)
