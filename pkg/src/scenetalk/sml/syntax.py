"""Token and AST shapes for the scene modification language, plus the
command signature table the lexer, parser, formatter, and validator all
share.

The language is deliberately closed: twenty commands, one statement per
line, no variables, no control flow.  Deletion has no command at all, so
unsupported destructive requests cannot even parse.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class SmlError(ValueError):
    """Base class for language-level failures."""


class LexError(SmlError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ParseError(SmlError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnknownCommandError(ParseError):
    def __init__(self, line: int, column: int, word: str, suggestion: str):
        message = f"unknown command {word!r}; did you mean {suggestion!r}?"
        super().__init__(line, column, message)
        self.word = word
        self.suggestion = suggestion


class SmlRuntimeError(SmlError):
    def __init__(self, statement_index: int, reason: str):
        super().__init__(f"statement {statement_index}: {reason}")
        self.statement_index = statement_index
        self.reason = reason


class StaleDeltaError(SmlError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # word | string | number | color | vector | newline
    value: object
    line: int
    column: int


class SpecialTarget(enum.Enum):
    PLAYER = "player"


class Command(enum.Enum):
    SET_COLOR = "set-color"
    SIMPLIFY_MATERIAL = "simplify-material"
    HIGHLIGHT = "highlight"
    SET_SCALE = "set-scale"
    SCALE_BY = "scale-by"
    SET_TEXT_SIZE = "set-text-size"
    MOVE_TO = "move-to"
    MOVE_BY = "move-by"
    MOVE_NEAR = "move-near"
    MOVE_PLAYER = "move-player"
    FACE = "face"
    SET_LIGHT_INTENSITY = "set-light-intensity"
    CREATE_LIGHT = "create-light"
    CREATE_PRIMITIVE = "create-primitive"
    SET_VOLUME = "set-volume"
    SET_PITCH = "set-pitch"
    SET_RANGE = "set-range"
    MUTE = "mute"
    UNMUTE = "unmute"
    SET_AMBIENT = "set-ambient"


class TargetKind(enum.Enum):
    NONE = "none"
    OBJECT = "object"
    OBJECT_OR_PLAYER = "object_or_player"


class ArgKind(enum.Enum):
    NUMBER = "number"
    VECTOR = "vector"
    COLOR = "color"
    REF = "ref"
    REF_OR_PLAYER = "ref_or_player"
    SHAPE = "shape"


PRIMITIVE_SHAPES = ("cube", "sphere", "cylinder", "capsule", "plane")


@dataclass(frozen=True)
class CommandSignature:
    target: TargetKind
    args: tuple[ArgKind, ...]
    arg_names: tuple[str, ...]


SIGNATURES: dict[Command, CommandSignature] = {
    Command.SET_COLOR: CommandSignature(TargetKind.OBJECT, (ArgKind.COLOR,), ("color",)),
    Command.SIMPLIFY_MATERIAL: CommandSignature(TargetKind.OBJECT, (), ()),
    Command.HIGHLIGHT: CommandSignature(TargetKind.OBJECT, (), ()),
    Command.SET_SCALE: CommandSignature(TargetKind.OBJECT, (ArgKind.VECTOR,), ("scale",)),
    Command.SCALE_BY: CommandSignature(TargetKind.OBJECT, (ArgKind.NUMBER,), ("factor",)),
    Command.SET_TEXT_SIZE: CommandSignature(TargetKind.OBJECT, (ArgKind.NUMBER,), ("size",)),
    Command.MOVE_TO: CommandSignature(
        TargetKind.OBJECT_OR_PLAYER, (ArgKind.VECTOR,), ("position",)
    ),
    Command.MOVE_BY: CommandSignature(
        TargetKind.OBJECT_OR_PLAYER, (ArgKind.VECTOR,), ("offset",)
    ),
    Command.MOVE_NEAR: CommandSignature(TargetKind.OBJECT, (ArgKind.REF,), ("reference",)),
    Command.MOVE_PLAYER: CommandSignature(TargetKind.NONE, (ArgKind.VECTOR,), ("position",)),
    Command.FACE: CommandSignature(
        TargetKind.OBJECT_OR_PLAYER, (ArgKind.REF_OR_PLAYER,), ("focus",)
    ),
    Command.SET_LIGHT_INTENSITY: CommandSignature(
        TargetKind.OBJECT, (ArgKind.NUMBER,), ("intensity",)
    ),
    Command.CREATE_LIGHT: CommandSignature(
        TargetKind.NONE, (ArgKind.VECTOR, ArgKind.NUMBER), ("position", "intensity")
    ),
    Command.CREATE_PRIMITIVE: CommandSignature(
        TargetKind.NONE, (ArgKind.SHAPE, ArgKind.VECTOR), ("shape", "position")
    ),
    Command.SET_VOLUME: CommandSignature(TargetKind.OBJECT, (ArgKind.NUMBER,), ("volume",)),
    Command.SET_PITCH: CommandSignature(TargetKind.OBJECT, (ArgKind.NUMBER,), ("pitch",)),
    Command.SET_RANGE: CommandSignature(TargetKind.OBJECT, (ArgKind.NUMBER,), ("range",)),
    Command.MUTE: CommandSignature(TargetKind.OBJECT, (), ()),
    Command.UNMUTE: CommandSignature(TargetKind.OBJECT, (), ()),
    Command.SET_AMBIENT: CommandSignature(TargetKind.NONE, (ArgKind.NUMBER,), ("intensity",)),
}

SURFACE_WORDS = {cmd.value: cmd for cmd in Command}

# Common near-miss verbs mapped to their real command; consulted before
# the edit-distance fallback so e.g. `paint` lands on set-color rather
# than its closest word by spelling.
COMMAND_ALIASES = {
    "paint": "set-color",
    "color": "set-color",
    "colour": "set-color",
    "recolor": "set-color",
    "move": "move-to",
    "place": "move-to",
    "teleport": "move-player",
    "resize": "set-scale",
    "grow": "scale-by",
    "shrink": "scale-by",
    "rotate": "face",
    "turn": "face",
    "silence": "mute",
}


@dataclass(frozen=True)
class SmlStatement:
    command: Command
    target: str | SpecialTarget | None
    args: tuple
    source_span: tuple[int, int, int] = field(default=(0, 0, 0), compare=False)

    def __post_init__(self):
        sig = SIGNATURES[self.command]
        if sig.target == TargetKind.NONE and self.target is not None:
            raise ValueError(f"{self.command.value} takes no target")
        if sig.target == TargetKind.OBJECT and not isinstance(self.target, str):
            raise ValueError(f"{self.command.value} targets an object")
        if sig.target == TargetKind.OBJECT_OR_PLAYER and not (
            isinstance(self.target, str) or self.target is SpecialTarget.PLAYER
        ):
            raise ValueError(f"{self.command.value} targets an object or the player")
        if len(self.args) != len(sig.args):
            raise ValueError(
                f"{self.command.value} takes {len(sig.args)} argument(s), got {len(self.args)}"
            )


@dataclass(frozen=True)
class SmlProgram:
    statements: tuple[SmlStatement, ...]

    def __post_init__(self):
        object.__setattr__(self, "statements", tuple(self.statements))


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        row = [i]
        for j, cb in enumerate(b, start=1):
            row.append(min(prev[j] + 1, row[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = row
    return prev[-1]


def suggest_command(word: str) -> str:
    alias = COMMAND_ALIASES.get(word.lower())
    if alias:
        return alias
    return min(sorted(SURFACE_WORDS), key=lambda w: levenshtein(word.lower(), w))
