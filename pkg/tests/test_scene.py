"""Scene container behavior: lookup, resolution, parenting, transients."""

import pytest
from hypothesis import given, strategies as st

from scenetalk.scene import AmbiguityError, NotFoundError, Scene, SceneHost
from scenetalk.types import SceneObject, Vec3


def make_scene(*names):
    scene = Scene()
    for i, name in enumerate(names):
        scene.add_object(SceneObject(id=f"obj-{i}", name=name))
    return scene


def test_add_and_get():
    scene = make_scene("Red Cube", "Green Sphere")
    assert scene.get("obj-0").name == "Red Cube"
    with pytest.raises(NotFoundError):
        scene.get("missing")


def test_duplicate_id_rejected():
    scene = make_scene("A")
    with pytest.raises(ValueError):
        scene.add_object(SceneObject(id="obj-0", name="B"))


def test_duplicate_name_rejected_case_insensitive():
    scene = make_scene("Red Cube")
    with pytest.raises(ValueError):
        scene.add_object(SceneObject(id="x", name="red cube"))


def test_resolve_exact_beats_substring():
    scene = make_scene("Cat", "Cat Statue")
    assert scene.resolve_object("cat").id == "obj-0"
    assert scene.resolve_object("CAT STATUE").id == "obj-1"


def test_resolve_unique_substring():
    scene = make_scene("Red Cube", "Green Sphere")
    assert scene.resolve_object("cube").id == "obj-0"
    assert scene.resolve_object("sph").id == "obj-1"


def test_resolve_ambiguous_lists_sorted_candidates():
    scene = make_scene("White Cat", "Black Cat")
    with pytest.raises(AmbiguityError) as err:
        scene.resolve_object("cat")
    assert err.value.candidates == ["Black Cat", "White Cat"]


def test_resolve_missing():
    scene = make_scene("Red Cube")
    with pytest.raises(NotFoundError):
        scene.resolve_object("torch")


def test_parenting_checks():
    scene = Scene()
    scene.add_object(SceneObject(id="table", name="Table"))
    scene.add_object(SceneObject(id="vase", name="Vase", parent="table"))
    with pytest.raises(ValueError):
        scene.add_object(SceneObject(id="x", name="X", parent="ghost"))


def test_reparent_cycle_rejected():
    scene = Scene()
    scene.add_object(SceneObject(id="a", name="A"))
    scene.add_object(SceneObject(id="b", name="B", parent="a"))
    with pytest.raises(ValueError):
        scene.set_parent("a", "b")
    with pytest.raises(ValueError):
        scene.set_parent("a", "a")


def test_remove_detaches_children():
    scene = Scene()
    scene.add_object(SceneObject(id="a", name="A"))
    scene.add_object(SceneObject(id="b", name="B", parent="a"))
    scene.remove_object("a")
    assert scene.get("b").parent is None


def test_tick_expires_transients():
    scene = Scene()
    scene.add_object(SceneObject(id="mark", name="Highlight 1", transient_until=5.0))
    scene.add_object(SceneObject(id="perm", name="Rock"))
    assert scene.tick(4.9) == []
    assert scene.clock == pytest.approx(4.9)
    assert scene.tick(0.1) == ["mark"]
    assert "mark" not in scene.objects
    assert "perm" in scene.objects
    with pytest.raises(ValueError):
        scene.tick(-1.0)


@given(st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=6, unique=True))
def test_resolve_substring_property(letters):
    """Any name is resolvable by any substring unique to it."""
    names = [f"Object {ch.upper()}{ch}" for ch in letters]
    scene = make_scene(*names)
    for i, ch in enumerate(letters):
        resolved = scene.resolve_object(f"{ch.upper()}{ch}")
        assert resolved.id == f"obj-{i}"


def test_snapshot_is_deep():
    scene = make_scene("Red Cube")
    snap = scene.snapshot()
    scene.get("obj-0").position = Vec3(9, 9, 9)
    assert snap.get("obj-0").position == Vec3(0, 0, 0)


def test_host_serializes_and_versions():
    host = SceneHost(make_scene("Red Cube"))

    def bump(scene):
        scene.version += 1
        return scene.version

    assert host.run(bump) == 1
    assert host.version == 1
    snap = host.snapshot()
    snap.get("obj-0").name = "Mutated"
    assert host.snapshot().get("obj-0").name == "Red Cube"
