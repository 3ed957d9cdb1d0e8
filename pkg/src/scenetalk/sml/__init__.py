"""The scene modification language: lex, parse, validate, interpret,
revert, format."""

from .formatter import format_program, format_statement
from .interpreter import (
    DeltaEntry,
    SceneDelta,
    get_field,
    interpret,
    revert,
    set_field,
)
from .lexer import lex
from .parser import parse, parse_text
from .syntax import (
    ArgKind,
    Command,
    CommandSignature,
    COMMAND_ALIASES,
    LexError,
    ParseError,
    PRIMITIVE_SHAPES,
    SIGNATURES,
    SmlError,
    SmlProgram,
    SmlRuntimeError,
    SmlStatement,
    SpecialTarget,
    StaleDeltaError,
    SURFACE_WORDS,
    TargetKind,
    Token,
    UnknownCommandError,
    levenshtein,
    suggest_command,
)
from .validator import (
    Diagnostic,
    PITCH_RANGE,
    SCALE_RANGE,
    TEXT_SIZE_MAX,
    ValidationReport,
    Verdict,
    VOLUME_RANGE,
    validate,
)

__all__ = [
    "ArgKind",
    "Command",
    "CommandSignature",
    "COMMAND_ALIASES",
    "DeltaEntry",
    "Diagnostic",
    "LexError",
    "ParseError",
    "PITCH_RANGE",
    "PRIMITIVE_SHAPES",
    "SceneDelta",
    "SCALE_RANGE",
    "SIGNATURES",
    "SmlError",
    "SmlProgram",
    "SmlRuntimeError",
    "SmlStatement",
    "SpecialTarget",
    "StaleDeltaError",
    "SURFACE_WORDS",
    "TargetKind",
    "TEXT_SIZE_MAX",
    "Token",
    "UnknownCommandError",
    "ValidationReport",
    "Verdict",
    "VOLUME_RANGE",
    "format_program",
    "format_statement",
    "get_field",
    "interpret",
    "levenshtein",
    "lex",
    "parse",
    "parse_text",
    "revert",
    "set_field",
    "suggest_command",
    "validate",
]
