"""Lexing, parsing, and formatting of modification programs."""

import pytest
from hypothesis import given, settings

from scenetalk.sml import (
    Command,
    LexError,
    ParseError,
    SmlProgram,
    SmlStatement,
    SpecialTarget,
    UnknownCommandError,
    format_program,
    lex,
    parse,
    parse_text,
)
from scenetalk.types import ColorRGBA, Vec3

from sml_gen import programs


def kinds(text):
    return [t.kind for t in lex(text) if t.kind != "newline"]


def test_lex_walkthrough():
    toks = [t for t in lex('set-color "bench" #FFFF00') if t.kind != "newline"]
    assert [(t.kind, t.value) for t in toks] == [
        ("word", "set-color"),
        ("string", "bench"),
        ("color", ColorRGBA(255, 255, 0)),
    ]


def test_lex_empty():
    assert [t.kind for t in lex("")] == []
    assert [t.kind for t in lex("; just a comment\n")] == ["newline"]


def test_lex_bad_hex_length():
    with pytest.raises(LexError) as err:
        lex('set-color "bench" #FFFF0')
    assert "6 digits" in str(err.value)
    assert err.value.line == 1


def test_lex_unterminated_string():
    with pytest.raises(LexError) as err:
        lex('set-color "bench')
    assert "unterminated" in str(err.value)


def test_lex_vector_and_positions():
    toks = lex("move-by player (0, 0, 3)")
    assert toks[0].line == 1 and toks[0].column == 1
    vec = [t for t in toks if t.kind == "vector"][0]
    assert vec.value == Vec3(0, 0, 3)
    assert vec.column == 16


def test_lex_single_and_double_quotes():
    single = [t for t in lex("set-color 'bench' #FFFF00")]
    double = [t for t in lex('set-color "bench" #FFFF00')]
    assert [(t.kind, t.value) for t in single] == [(t.kind, t.value) for t in double]


def test_parse_scale_by():
    prog = parse_text('scale-by "bench" 2.0')
    assert len(prog.statements) == 1
    stmt = prog.statements[0]
    assert stmt.command == Command.SCALE_BY
    assert stmt.target == "bench"
    assert stmt.args == (2.0,)


def test_parse_move_by_player():
    stmt = parse_text("move-by player (0, 0, 3)").statements[0]
    assert stmt.command == Command.MOVE_BY
    assert stmt.target is SpecialTarget.PLAYER
    assert stmt.args == (Vec3(0, 0, 3),)


def test_parse_multi_statement_and_comments():
    prog = parse_text(
        'simplify-material "torch"  ; prep\n'
        "\n"
        'set-color "torch" #00FF00\n'
    )
    assert [s.command for s in prog.statements] == [
        Command.SIMPLIFY_MATERIAL,
        Command.SET_COLOR,
    ]


def test_parse_unknown_command_suggests_alias():
    with pytest.raises(UnknownCommandError) as err:
        parse_text('paint "bench" #FF0000')
    assert err.value.suggestion == "set-color"
    assert "set-color" in str(err.value)


def test_parse_unknown_command_suggests_by_edit_distance():
    with pytest.raises(UnknownCommandError) as err:
        parse_text('set-colr "bench" #FF0000')
    assert err.value.suggestion == "set-color"


def test_parse_arity_and_type_errors():
    with pytest.raises(ParseError) as err:
        parse_text('set-color "bench"')
    assert "color" in str(err.value).lower()
    with pytest.raises(ParseError):
        parse_text('set-color "bench" 3.0')
    with pytest.raises(ParseError):
        parse_text('scale-by "bench" 2.0 3.0')
    with pytest.raises(ParseError):
        parse_text("set-color player #FF0000")


def test_parse_statement_spans():
    prog = parse_text('highlight "torch"\nmute "laptop"')
    assert prog.statements[0].source_span[0] == 1
    assert prog.statements[1].source_span[0] == 2


def test_format_canonicalizes():
    assert format_program(parse_text("set-color  'bench'   #FFFF00")) == (
        'set-color "bench" #FFFF00\n'
    )
    assert format_program(SmlProgram(())) == ""


def test_format_round_trip_examples():
    source = (
        'set-scale "Red Cube" (2.0, 1.0, 0.5)\n'
        "move-player (0.0, 1.6, 4.0)\n"
        'face player "torch"\n'
        "create-primitive sphere (1.0, 0.0, 2.0)\n"
        "create-light (0.0, 1.0, 0.0) 2.0\n"
        'set-ambient 0.25\n'
        'move-near "Phone" "Chair"\n'
    )
    prog = parse_text(source)
    assert format_program(prog) == source
    assert parse_text(format_program(prog)) == prog


@settings(max_examples=200)
@given(programs())
def test_round_trip_property(prog):
    text = format_program(prog)
    assert parse(lex(text)) == prog
    assert format_program(parse_text(text)) == text
