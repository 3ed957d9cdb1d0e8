"""Scene graph building and its text serialization round-trip."""

import pytest
from hypothesis import given, settings, strategies as st

from scenetalk.scene import Scene
from scenetalk.spatial import DensityLabel, Direction, DistanceLabel
from scenetalk.ssg import (
    AudioInfo,
    EgocentricInfo,
    LightInfo,
    SemanticSceneGraph,
    SsgNode,
    SsgSyntaxError,
    SsgValidationError,
    TextInfo,
    build_ssg,
    parse_ssg,
    serialize_ssg,
)
from scenetalk.types import (
    AudioFacet,
    ColorRGBA,
    LightFacet,
    Player,
    SceneObject,
    TextFacet,
    Vec3,
)


def sample_scene():
    scene = Scene(ambient_light_intensity=0.2, name="test")
    scene.add_object(
        SceneObject(
            id="cube",
            name="Red Cube",
            description="A matte red cube.",
            position=Vec3(0, 0.5, 3),
            color=ColorRGBA(255, 0, 0),
        )
    )
    scene.add_object(
        SceneObject(
            id="sign",
            name="Park Sign",
            description="A wooden sign.",
            position=Vec3(4, 1, 8),
            text=TextFacet("Welcome to the park", 24.0),
            tags=("textured",),
        )
    )
    scene.add_object(
        SceneObject(
            id="speaker",
            name="Speaker 1",
            description="A small speaker.",
            position=Vec3(-2, 1, 2),
            audio=AudioFacet("clip-a", volume=0.8, pitch=1.0, max_distance=20.0),
            parent="cube",
        )
    )
    scene.add_object(
        SceneObject(
            id="lamp",
            name="Lamp",
            description="A point light.",
            position=Vec3(0, 2, 0),
            light=LightFacet("point", 1.5, 10.0),
            physical=False,
        )
    )
    return scene


def test_build_one_node_per_annotated_nontransient():
    scene = sample_scene()
    scene.add_object(SceneObject(id="mark", name="Highlight 1", transient_until=9.0))
    scene.add_object(SceneObject(id="hidden", name="Editor Gizmo", annotated=False))
    ssg = build_ssg(scene)
    assert len(ssg.nodes) == 4
    names = {n.name for n in ssg.nodes}
    assert "Highlight 1" not in names
    assert "Editor Gizmo" not in names


def test_build_empty_scene():
    ssg = build_ssg(Scene())
    assert ssg.nodes == ()
    assert ssg.player.position == Vec3(0, 1.6, 0)


def test_nodes_sorted_by_distance_then_name():
    scene = Scene()
    scene.player = Player(Vec3(0, 0, 0), 0.0)
    scene.add_object(SceneObject(id="b", name="Beta", position=Vec3(0, 0, 5)))
    scene.add_object(SceneObject(id="a", name="Alpha", position=Vec3(5, 0, 0)))
    scene.add_object(SceneObject(id="c", name="Near", position=Vec3(0, 0, 1)))
    ssg = build_ssg(scene)
    assert [n.name for n in ssg.nodes] == ["Near", "Alpha", "Beta"]


def test_egocentric_fields_cross_checked():
    scene = Scene()
    scene.player = Player(Vec3(0, 0, 0), 0.0)
    scene.add_object(SceneObject(id="x", name="Crate", position=Vec3(0, 0, 3)))
    node = build_ssg(scene).nodes[0]
    assert node.egocentric.direction == Direction.IN_FRONT
    assert node.egocentric.distance == pytest.approx(3.0)
    assert node.egocentric.qualitative == DistanceLabel.CLOSE


def test_parent_serialized_by_name():
    ssg = build_ssg(sample_scene())
    speaker = next(n for n in ssg.nodes if n.name == "Speaker 1")
    assert speaker.parent == "Red Cube"


def test_serialize_deterministic_and_parseable():
    scene = sample_scene()
    text1 = serialize_ssg(build_ssg(scene))
    text2 = serialize_ssg(build_ssg(scene))
    assert text1 == text2
    assert "#FF0000" in text1
    parsed = parse_ssg(text1)
    assert parsed == build_ssg(scene)


def test_parse_rejects_missing_player_block():
    with pytest.raises(SsgSyntaxError) as err:
        parse_ssg("ssg 1\ngenerated_at 0.0\nambient_light_intensity 0.0\n")
    assert "player" in str(err.value)


def test_parse_rejects_duplicate_names():
    scene = Scene()
    scene.add_object(SceneObject(id="a", name="Cat"))
    text = serialize_ssg(build_ssg(scene))
    block = text[text.index("node") :]
    with pytest.raises(SsgValidationError):
        parse_ssg(text + "\n" + block)


def test_parse_reports_line_and_column():
    bad = 'ssg 1\ngenerated_at 0.0\nambient_light_intensity 0.0\nplayer (0,0,0) yaw @\n'
    with pytest.raises(SsgSyntaxError) as err:
        parse_ssg(bad)
    assert err.value.line == 4
    assert err.value.column > 1


def test_parse_rejects_unknown_field():
    scene = Scene()
    scene.add_object(SceneObject(id="a", name="Cat"))
    text = serialize_ssg(build_ssg(scene)).replace("  physical", "  ghostly")
    with pytest.raises(SsgSyntaxError) as err:
        parse_ssg(text)
    assert "ghostly" in str(err.value)


safe_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")),
    min_size=0,
    max_size=30,
) | st.sampled_from(['say "hi"', "back\\slash", "line\nbreak", "tab\there"])

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e9, max_value=1e9)
nonneg = st.floats(allow_nan=False, allow_infinity=False, min_value=0, max_value=1e9)
vec = st.builds(Vec3, finite, finite, finite)


@st.composite
def ssg_nodes(draw, index):
    color = draw(st.none() | st.builds(ColorRGBA, st.integers(0, 255), st.integers(0, 255), st.integers(0, 255)))
    return SsgNode(
        name=f"Node {index} " + draw(safe_text),
        description=draw(safe_text),
        physical=draw(st.booleans()),
        attached_behavior_tags=tuple(draw(st.lists(safe_text.filter(bool), max_size=3))),
        position=draw(vec),
        scale=draw(vec),
        parent=draw(st.none() | safe_text),
        color_hex=color.hex if color else None,
        text=draw(st.none() | st.builds(TextInfo, safe_text, nonneg)),
        egocentric=EgocentricInfo(
            draw(st.sampled_from(list(Direction))),
            draw(nonneg),
            draw(st.sampled_from(list(DistanceLabel))),
        ),
        light_density=LightInfo(draw(nonneg), draw(st.sampled_from(list(DensityLabel)))),
        audio=draw(st.none() | st.builds(AudioInfo, st.booleans(), nonneg, nonneg, nonneg)),
    )


@st.composite
def ssgs(draw):
    count = draw(st.integers(0, 5))
    nodes = tuple(draw(ssg_nodes(i)) for i in range(count))
    return SemanticSceneGraph(
        nodes=nodes,
        player=Player(draw(vec), draw(st.floats(0, 359.9))),
        ambient_light_intensity=draw(nonneg),
        generated_at=draw(nonneg),
    )


@settings(max_examples=150)
@given(ssgs())
def test_round_trip_property(ssg):
    assert parse_ssg(serialize_ssg(ssg)) == ssg
