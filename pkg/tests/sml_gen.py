"""Shared hypothesis strategies generating well-formed modification programs."""

from hypothesis import strategies as st

from scenetalk.sml import (
    ArgKind,
    Command,
    SIGNATURES,
    SmlProgram,
    SmlStatement,
    SpecialTarget,
    TargetKind,
)
from scenetalk.types import ColorRGBA, Vec3

name_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")),
    min_size=1,
    max_size=20,
) | st.sampled_from(["Speaker 1", 'He said "hi"', "back\\slash", "Park Sign"])

number = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6)
vector = st.builds(Vec3, number, number, number)
color = st.builds(ColorRGBA, st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
shape = st.sampled_from(["cube", "sphere", "cylinder", "capsule", "plane"])


def _target_for(kind, draw):
    if kind == TargetKind.NONE:
        return None
    if kind == TargetKind.OBJECT:
        return draw(name_text)
    return draw(name_text | st.just(SpecialTarget.PLAYER))


def _arg_for(kind, draw):
    if kind == ArgKind.NUMBER:
        return draw(number)
    if kind == ArgKind.VECTOR:
        return draw(vector)
    if kind == ArgKind.COLOR:
        return draw(color)
    if kind == ArgKind.REF:
        return draw(name_text)
    if kind == ArgKind.REF_OR_PLAYER:
        return draw(name_text | st.just(SpecialTarget.PLAYER))
    if kind == ArgKind.SHAPE:
        return draw(shape)
    raise AssertionError(kind)


@st.composite
def statements(draw):
    command = draw(st.sampled_from(list(Command)))
    sig = SIGNATURES[command]
    target = _target_for(sig.target, draw)
    args = tuple(_arg_for(kind, draw) for kind in sig.args)
    return SmlStatement(command=command, target=target, args=args)


@st.composite
def programs(draw, max_size=6):
    return SmlProgram(tuple(draw(st.lists(statements(), max_size=max_size))))
