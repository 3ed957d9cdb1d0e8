"""Guardrail validation: resolve targets against a scene snapshot, check
numeric ranges and facet requirements, and flag out-of-scope requests
(color changes on textured materials) before anything executes."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..scene import AmbiguityError, NotFoundError, Scene
from .syntax import Command, SmlProgram, SmlStatement, SpecialTarget

VOLUME_RANGE = (0.0, 1.0)
PITCH_RANGE = (0.1, 3.0)
SCALE_RANGE = (0.01, 100.0)
TEXT_SIZE_MAX = 512.0


class Verdict(str, enum.Enum):
    OK = "ok"
    OUT_OF_SCOPE = "out_of_scope"
    REJECTED = "rejected"


@dataclass(frozen=True)
class Diagnostic:
    statement_index: int
    reason: str
    severity: str  # "error" | "warning"


@dataclass
class ValidationReport:
    verdict: Verdict
    diagnostics: list[Diagnostic] = field(default_factory=list)
    resolved_targets: dict[int, str] = field(default_factory=dict)

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]


def _in_range(value: float, lo: float, hi: float) -> bool:
    return lo <= value <= hi


def validate(program: SmlProgram, scene: Scene) -> ValidationReport:
    diagnostics: list[Diagnostic] = []
    resolved: dict[int, str] = {}
    out_of_scope = False
    simplified: set[str] = set()

    def err(index: int, reason: str) -> None:
        diagnostics.append(Diagnostic(index, reason, "error"))

    def warn(index: int, reason: str) -> None:
        diagnostics.append(Diagnostic(index, reason, "warning"))

    def resolve(index: int, ref: str):
        try:
            return scene.resolve_object(ref)
        except (NotFoundError, AmbiguityError) as e:
            err(index, str(e))
            return None

    for i, stmt in enumerate(program.statements):
        target_obj = None
        if isinstance(stmt.target, str):
            target_obj = resolve(i, stmt.target)
            if target_obj is not None:
                resolved[i] = target_obj.id
        ok_target = target_obj is not None or stmt.target is SpecialTarget.PLAYER

        cmd = stmt.command
        if cmd == Command.SET_COLOR and target_obj is not None:
            if target_obj.has_tag("textured") and target_obj.id not in simplified:
                out_of_scope = True
                err(
                    i,
                    f"changing the color of {target_obj.name!r} is out of scope: "
                    "it has a textured material; simplify the material first "
                    "(simplify-material), then set the color",
                )
        elif cmd == Command.SIMPLIFY_MATERIAL and target_obj is not None:
            if target_obj.has_tag("textured"):
                simplified.add(target_obj.id)
            else:
                warn(i, f"{target_obj.name!r} has no textured material; nothing to simplify")
        elif cmd == Command.SET_SCALE:
            vec = stmt.args[0]
            for axis, value in (("x", vec.x), ("y", vec.y), ("z", vec.z)):
                if not _in_range(value, *SCALE_RANGE):
                    err(i, f"scale.{axis} {value} out of range [0.01, 100]")
        elif cmd == Command.SCALE_BY:
            factor = stmt.args[0]
            if not _in_range(factor, *SCALE_RANGE):
                err(i, f"scale factor {factor} out of range [0.01, 100]")
        elif cmd == Command.SET_TEXT_SIZE:
            size = stmt.args[0]
            if not 0.0 < size <= TEXT_SIZE_MAX:
                err(i, f"text size {size} out of range (0, 512]")
            if target_obj is not None and target_obj.text is None:
                err(i, f"{target_obj.name!r} has no text to resize")
        elif cmd == Command.SET_VOLUME:
            value = stmt.args[0]
            if not _in_range(value, *VOLUME_RANGE):
                err(i, f"volume {value} out of range [0, 1]")
        elif cmd == Command.SET_PITCH:
            value = stmt.args[0]
            if not _in_range(value, *PITCH_RANGE):
                err(i, f"pitch {value} out of range [0.1, 3]")
        elif cmd == Command.SET_RANGE:
            value = stmt.args[0]
            if not value > 0:
                err(i, f"audio range {value} must be > 0")
        elif cmd == Command.SET_LIGHT_INTENSITY:
            value = stmt.args[0]
            if value < 0:
                err(i, f"light intensity {value} must be >= 0")
            if target_obj is not None and target_obj.light is None:
                err(i, f"{target_obj.name!r} has no light source")
        elif cmd == Command.CREATE_LIGHT:
            intensity = stmt.args[1]
            if intensity < 0:
                err(i, f"light intensity {intensity} must be >= 0")
        elif cmd == Command.SET_AMBIENT:
            value = stmt.args[0]
            if value < 0:
                err(i, f"ambient intensity {value} must be >= 0")
        elif cmd == Command.MOVE_NEAR:
            ref_obj = resolve(i, stmt.args[0])
            if target_obj is not None and ref_obj is not None and target_obj.id == ref_obj.id:
                err(i, f"cannot move {target_obj.name!r} near itself")
        elif cmd == Command.FACE:
            focus = stmt.args[0]
            if focus is SpecialTarget.PLAYER:
                if stmt.target is SpecialTarget.PLAYER:
                    err(i, "the player cannot face the player")
            else:
                focus_obj = resolve(i, focus)
                if (
                    target_obj is not None
                    and focus_obj is not None
                    and target_obj.id == focus_obj.id
                ):
                    err(i, f"{target_obj.name!r} cannot face itself")

        if cmd in (Command.SET_VOLUME, Command.SET_PITCH, Command.SET_RANGE,
                   Command.MUTE, Command.UNMUTE):
            if target_obj is not None and target_obj.audio is None:
                err(i, f"{target_obj.name!r} has no audio source")
        del ok_target

    if out_of_scope:
        verdict = Verdict.OUT_OF_SCOPE
    elif any(d.severity == "error" for d in diagnostics):
        verdict = Verdict.REJECTED
    else:
        verdict = Verdict.OK
    return ValidationReport(verdict=verdict, diagnostics=diagnostics, resolved_targets=resolved)
