"""Recursive-descent parser: tokens -> SmlProgram.

One statement per line.  Arity and argument types are checked against the
shared signature table; unknown commands raise with a nearest-command
suggestion (aliases first, then edit distance).
"""

from __future__ import annotations

from .lexer import lex
from .syntax import (
    ArgKind,
    Command,
    ParseError,
    PRIMITIVE_SHAPES,
    SIGNATURES,
    SmlProgram,
    SmlStatement,
    SpecialTarget,
    SURFACE_WORDS,
    TargetKind,
    Token,
    UnknownCommandError,
    suggest_command,
)

_ARG_WHAT = {
    ArgKind.NUMBER: "a number",
    ArgKind.VECTOR: "a vector (x, y, z)",
    ArgKind.COLOR: "a HEX color like #FF8800",
    ArgKind.REF: "a quoted object name",
    ArgKind.REF_OR_PLAYER: "a quoted object name or `player`",
    ArgKind.SHAPE: "a shape: " + ", ".join(PRIMITIVE_SHAPES),
}


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.last: Token | None = None

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Token | None:
        tok = self.peek()
        if tok is not None:
            self.pos += 1
            self.last = tok
        return tok

    def error_at(self, message: str) -> ParseError:
        tok = self.peek()
        if tok is not None:
            return ParseError(tok.line, tok.column, message)
        if self.last is not None:
            return ParseError(self.last.line, self.last.column, message)
        return ParseError(1, 1, message)


def parse(tokens: list[Token]) -> SmlProgram:
    stream = _Stream(tokens)
    statements: list[SmlStatement] = []
    while True:
        tok = stream.peek()
        if tok is None:
            break
        if tok.kind == "newline":
            stream.take()
            continue
        statements.append(_statement(stream))
    return SmlProgram(tuple(statements))


def parse_text(text: str) -> SmlProgram:
    return parse(lex(text))


def _statement(stream: _Stream) -> SmlStatement:
    head = stream.take()
    if head.kind != "word":
        raise ParseError(head.line, head.column, f"expected a command, got {head.kind}")
    command = SURFACE_WORDS.get(head.value)
    if command is None:
        raise UnknownCommandError(head.line, head.column, head.value, suggest_command(head.value))
    sig = SIGNATURES[command]

    target: str | SpecialTarget | None = None
    if sig.target != TargetKind.NONE:
        target = _target(stream, command, sig.target)

    args = []
    for kind, name in zip(sig.args, sig.arg_names):
        args.append(_arg(stream, command, kind, name))

    tail = stream.peek()
    if tail is not None and tail.kind != "newline":
        raise ParseError(
            tail.line, tail.column,
            f"unexpected extra input after {command.value} statement",
        )
    end = stream.last
    return SmlStatement(
        command=command,
        target=target,
        args=tuple(args),
        source_span=(head.line, head.column, end.column),
    )


def _target(stream, command: Command, kind: TargetKind):
    tok = stream.peek()
    if tok is None or tok.kind == "newline":
        wanted = "a quoted object name"
        if kind == TargetKind.OBJECT_OR_PLAYER:
            wanted += " or `player`"
        raise stream.error_at(f"{command.value} needs a target: {wanted}")
    stream.take()
    if tok.kind == "string":
        return tok.value
    if tok.kind == "word" and tok.value == "player":
        if kind == TargetKind.OBJECT:
            raise ParseError(
                tok.line, tok.column, f"{command.value} targets an object, not the player"
            )
        return SpecialTarget.PLAYER
    raise ParseError(
        tok.line, tok.column,
        f"{command.value} target must be a quoted object name"
        + (" or `player`" if kind == TargetKind.OBJECT_OR_PLAYER else ""),
    )


def _arg(stream, command: Command, kind: ArgKind, name: str):
    tok = stream.peek()
    if tok is None or tok.kind == "newline":
        raise stream.error_at(f"{command.value} needs {name}: {_ARG_WHAT[kind]}")
    stream.take()
    if kind == ArgKind.NUMBER and tok.kind == "number":
        return tok.value
    if kind == ArgKind.VECTOR and tok.kind == "vector":
        return tok.value
    if kind == ArgKind.COLOR and tok.kind == "color":
        return tok.value
    if kind == ArgKind.REF and tok.kind == "string":
        return tok.value
    if kind == ArgKind.REF_OR_PLAYER:
        if tok.kind == "string":
            return tok.value
        if tok.kind == "word" and tok.value == "player":
            return SpecialTarget.PLAYER
    if kind == ArgKind.SHAPE and tok.kind == "word":
        if tok.value in PRIMITIVE_SHAPES:
            return tok.value
        raise ParseError(
            tok.line, tok.column,
            f"unknown shape {tok.value!r}; choose one of: " + ", ".join(PRIMITIVE_SHAPES),
        )
    raise ParseError(
        tok.line, tok.column, f"{command.value} {name} must be {_ARG_WHAT[kind]}"
    )
