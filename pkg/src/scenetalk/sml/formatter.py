"""Canonical pretty-printer.  format/parse round-trip exactly:
parse(lex(format_program(p))) == p, and formatting is idempotent."""

from __future__ import annotations

from ..types import ColorRGBA, Vec3
from .syntax import ArgKind, SIGNATURES, SmlProgram, SmlStatement, SpecialTarget


def _quote(s: str) -> str:
    escaped = (
        s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    )
    return f'"{escaped}"'


def _num(x: float) -> str:
    return repr(float(x))


def _vec(v: Vec3) -> str:
    return f"({_num(v.x)}, {_num(v.y)}, {_num(v.z)})"


def format_statement(stmt: SmlStatement) -> str:
    sig = SIGNATURES[stmt.command]
    parts = [stmt.command.value]
    if stmt.target is SpecialTarget.PLAYER:
        parts.append("player")
    elif isinstance(stmt.target, str):
        parts.append(_quote(stmt.target))
    for kind, value in zip(sig.args, stmt.args):
        if kind == ArgKind.NUMBER:
            parts.append(_num(value))
        elif kind == ArgKind.VECTOR:
            parts.append(_vec(value))
        elif kind == ArgKind.COLOR:
            assert isinstance(value, ColorRGBA)
            parts.append(value.hex)
        elif kind == ArgKind.REF:
            parts.append(_quote(value))
        elif kind == ArgKind.REF_OR_PLAYER:
            parts.append("player" if value is SpecialTarget.PLAYER else _quote(value))
        elif kind == ArgKind.SHAPE:
            parts.append(value)
        else:
            raise AssertionError(kind)
    return " ".join(parts)


def format_program(program: SmlProgram) -> str:
    if not program.statements:
        return ""
    return "\n".join(format_statement(s) for s in program.statements) + "\n"
