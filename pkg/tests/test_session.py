"""Conversation loop: pipeline order, guarded application, echo, undo."""

import json

import pytest

from scenetalk.gateway import RateLimitError, ScriptedBackend, ScriptedRule
from scenetalk.prompt import (
    CLARIFY_TEMPLATE,
    ERROR_RECOVERY_TEMPLATE,
    EnvelopeMode,
    render_envelope,
)
from scenetalk.scene import Scene, SceneHost
from scenetalk.session import NavCommand, NoModificationYet, Session, UtteranceEvent
from scenetalk.sml import parse_text
from scenetalk.spatial import facing_vector
from scenetalk.types import AudioFacet, ColorRGBA, LightFacet, SceneObject, Vec3


class FakeClock:
    def __init__(self, start=100.0, step=1.0):
        self.now = start
        self.step = step

    def __call__(self):
        value = self.now
        self.now += self.step
        return value


class SequenceBackend:
    """Returns canned responses in order, recording every prompt."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.prompts = []

    def complete(self, messages):
        self.prompts.append(messages)
        return self.responses.pop(0)


class FailingBackend:
    def __init__(self, error):
        self.error = error

    def complete(self, messages):
        raise self.error


def build_scene() -> Scene:
    scene = Scene()
    scene.add_object(SceneObject(
        id="cube", name="Cube", description="a small cube", physical=True,
        position=Vec3(0.0, 0.5, 3.0), base_extent=Vec3(1.0, 1.0, 1.0),
        color=ColorRGBA(255, 0, 0),
    ))
    scene.add_object(SceneObject(
        id="speaker1", name="Speaker 1", description="a bookshelf speaker",
        physical=True, position=Vec3(2.0, 1.0, 4.0),
        base_extent=Vec3(0.3, 0.5, 0.3),
        audio=AudioFacet(clip_id="hum", volume=0.5, pitch=1.0, max_distance=12.0),
    ))
    scene.add_object(SceneObject(
        id="torch", name="Torch", description="a wall torch", physical=True,
        position=Vec3(-3.0, 1.5, 2.0), base_extent=Vec3(0.2, 0.6, 0.2),
        tags=("textured",), color=ColorRGBA(200, 120, 40),
        light=LightFacet(kind="point", intensity=1.2, range=8.0),
    ))
    scene.ambient_light_intensity = 0.3
    return scene


def modify_reply(reply, program_text):
    return render_envelope(EnvelopeMode.MODIFY, reply, parse_text(program_text))


def make_session(rules, fallback=None, scene=None):
    host = SceneHost(scene or build_scene())
    backend = ScriptedBackend(
        rules=[ScriptedRule(p, r) for p, r in rules],
        fallback=fallback or render_envelope(EnvelopeMode.CLARIFY, CLARIFY_TEMPLATE),
    )
    session = Session(host, backend, clock=FakeClock())
    return session, host


def test_modify_turn_applies_program_and_replies():
    session, host = make_session([
        ("make the cube blue",
         modify_reply("The cube is now blue.", 'set-color "Cube" #0000FF')),
    ])
    before = host.version
    event = session.handle_user_input("Make the cube blue.")
    assert event.kind == "reply"
    assert event.text == "The cube is now blue."
    assert host.snapshot().objects["cube"].color == ColorRGBA(0, 0, 255)
    assert host.version == before + 1
    entry = session.transcript[0]
    assert entry.envelope.mode == EnvelopeMode.MODIFY
    assert entry.report.verdict.value == "ok"
    assert entry.delta is not None
    assert entry.delta.entries[0].field_path == "color"


def test_every_reply_is_emitted_as_utterance():
    session, _ = make_session([
        ("make the cube blue",
         modify_reply("The cube is now blue.", 'set-color "Cube" #0000FF')),
    ])
    heard = []
    session.add_listener(heard.append)
    event = session.handle_user_input("Make the cube blue.")
    assert event in heard
    assert [e.kind for e in heard] == ["reply"]


def test_answer_mode_mutates_nothing():
    session, host = make_session([
        ("what color is the cube", "The cube is red."),
    ])
    before = host.version
    event = session.handle_user_input("What color is the cube?")
    assert event.text == "The cube is red."
    assert host.version == before
    entry = session.transcript[0]
    assert entry.envelope.mode == EnvelopeMode.ANSWER
    assert entry.delta is None


def test_rejected_program_never_voices_model_success_claim():
    session, host = make_session([
        ("blast the volume",
         modify_reply("Done, the volume is 1.5 now!", 'set-volume "Speaker 1" 1.5')),
    ])
    before = host.version
    event = session.handle_user_input("Blast the volume!")
    assert "Done, the volume is 1.5 now!" not in event.text
    assert "rejected" in event.text
    assert "volume 1.5 out of range [0, 1]" in event.text
    assert host.version == before
    assert host.snapshot().objects["speaker1"].audio.volume == 0.5
    assert session.transcript[0].delta is None
    assert session.transcript[0].report.verdict.value == "rejected"


def test_unknown_reference_yields_clarification_template():
    session, _ = make_session([
        ("paint the dragon",
         modify_reply("The dragon is red now.", 'set-color "dragon" #FF0000')),
    ])
    event = session.handle_user_input("Paint the dragon red.")
    assert event.text.startswith(CLARIFY_TEMPLATE)
    assert "No object named 'dragon' exists." in event.text


def test_ambiguous_reference_lists_candidates():
    scene = Scene()
    for i, name in enumerate(["White Cat", "Black Cat"]):
        scene.add_object(SceneObject(
            id=f"cat{i}", name=name, description="a cat", physical=True,
            position=Vec3(float(i), 0.2, 2.0), base_extent=Vec3(0.3, 0.3, 0.6),
            audio=AudioFacet(clip_id="meow", volume=0.4, pitch=1.2, max_distance=6.0),
        ))
    session, _ = make_session([
        ("quieter",
         modify_reply("Quieter now.", 'set-volume "cat" 0.1')),
    ], scene=scene)
    event = session.handle_user_input("Make the cat quieter.")
    assert event.text.startswith(CLARIFY_TEMPLATE)
    assert "Did you mean: Black Cat, White Cat?" in event.text


def test_textured_color_change_is_out_of_scope():
    session, host = make_session([
        ("torch green",
         modify_reply("The torch is green.", 'set-color "Torch" #00FF00')),
    ])
    before_color = host.snapshot().objects["torch"].color
    event = session.handle_user_input("Make the torch green.")
    assert event.text.startswith(
        "Sorry, that request is out of scope: color change on textured "
        "materials is not supported in this environment."
    )
    assert "simplify the material first" in event.text
    assert host.snapshot().objects["torch"].color == before_color
    assert session.transcript[0].report.verdict.value == "out_of_scope"


def test_malformed_reply_is_repaired_once():
    good = modify_reply("The cube is now blue.", 'set-color "Cube" #0000FF')
    backend = SequenceBackend(["```sml\n#mode: modify\n```", good])
    session = Session(SceneHost(build_scene()), backend, clock=FakeClock())
    event = session.handle_user_input("Make the cube blue.")
    assert event.text == "The cube is now blue."
    assert len(backend.prompts) == 2
    repair_request = backend.prompts[1][-1]
    assert repair_request["role"] == "user"
    assert "violated the output format" in repair_request["content"]


def test_double_malformed_reply_falls_back_to_error_recovery():
    backend = SequenceBackend(["```sml\nno header\n```", "```sml\nstill bad\n```"])
    host = SceneHost(build_scene())
    session = Session(host, backend, clock=FakeClock())
    before = host.version
    event = session.handle_user_input("Make the cube blue.")
    assert event.kind == "reply"
    assert event.text == ERROR_RECOVERY_TEMPLATE
    assert host.version == before
    assert session.transcript[0].envelope is None


def test_gateway_failure_becomes_error_notice():
    host = SceneHost(build_scene())
    session = Session(host, FailingBackend(RateLimitError("rate limited")), clock=FakeClock())
    before = host.version
    event = session.handle_user_input("Make the cube blue.")
    assert event.kind == "error_notice"
    assert "could not be reached" in event.text
    assert host.version == before
    entry = session.transcript[0]
    assert entry.envelope is None
    assert entry.reply == event.text


def test_runtime_failure_rolls_back_and_apologizes():
    scene = build_scene()
    scene.add_object(SceneObject(
        id="decoy", name="Cube 1", description="name squatter", physical=True,
        position=Vec3(5.0, 0.5, 5.0), base_extent=Vec3(1.0, 1.0, 1.0),
    ))
    session, host = make_session([
        ("spawn a cube",
         modify_reply("Created a cube.", "create-primitive cube (0.0, 0.0, 6.0)")),
    ], scene=scene)
    before = host.version
    event = session.handle_user_input("Spawn a cube please.")
    assert event.text.startswith("I apologize for the error.")
    assert host.version == before
    assert session.transcript[0].delta is None


def test_navigation_moves_along_camera_frame():
    session, host = make_session([])
    session.navigate(NavCommand("move_forward"))
    player = host.snapshot().player
    assert player.position.z == pytest.approx(0.5)
    assert player.position.x == pytest.approx(0.0)

    session.navigate(NavCommand("pan_right"))
    assert host.snapshot().player.yaw == pytest.approx(5.0)
    session.navigate(NavCommand("pan_right", 85.0))
    assert host.snapshot().player.yaw == pytest.approx(90.0)

    before = host.snapshot().player.position
    session.navigate(NavCommand("move_forward", 1.0))
    after = host.snapshot().player.position
    expected = before + facing_vector(90.0).scaled(1.0)
    assert after.x == pytest.approx(expected.x)
    assert after.z == pytest.approx(expected.z)


def test_navigation_never_bumps_scene_version():
    session, host = make_session([])
    before = host.version
    for kind in ("move_forward", "move_back", "strafe_left", "strafe_right",
                 "pan_left", "pan_right", "pan_up", "pan_down"):
        session.navigate(NavCommand(kind))
    assert host.version == before


def test_pan_up_and_down_are_accepted_but_ignored():
    session, host = make_session([])
    before = host.snapshot().player
    session.navigate(NavCommand("pan_up"))
    session.navigate(NavCommand("pan_down", 30.0))
    after = host.snapshot().player
    assert after.yaw == before.yaw
    assert after.position == before.position


def test_nav_command_defaults():
    assert NavCommand("move_forward").magnitude == 0.5
    assert NavCommand("pan_left").magnitude == 5.0
    with pytest.raises(ValueError):
        NavCommand("teleport_up")
    with pytest.raises(ValueError):
        NavCommand("move_forward", -1.0)


def test_echo_word_boundary_on_space():
    session, _ = make_session([])
    events = []
    for ch in "cat ":
        events.extend(session.echo_keystroke(ch))
    kinds = [(e.kind, e.text) for e in events]
    assert kinds == [
        ("char_echo", "c"), ("char_echo", "a"), ("char_echo", "t"),
        ("char_echo", " "), ("word_echo", "cat"),
    ]


def test_echo_backspace_shrinks_word():
    session, _ = make_session([])
    events = []
    for ch in ["c", "a", "\b", "r", " "]:
        events.extend(session.echo_keystroke(ch))
    word_events = [e for e in events if e.kind == "word_echo"]
    assert [e.text for e in word_events] == ["cr"]
    backspace = [e for e in events if e.text == "backspace"]
    assert len(backspace) == 1 and backspace[0].kind == "char_echo"


def test_echo_enter_flushes_word_without_char_event():
    session, _ = make_session([])
    events = []
    for ch in ["h", "i", "\n"]:
        events.extend(session.echo_keystroke(ch))
    assert [(e.kind, e.text) for e in events] == [
        ("char_echo", "h"), ("char_echo", "i"), ("word_echo", "hi"),
    ]


def test_char_echo_carries_one_character_except_backspace():
    session, _ = make_session([])
    events = []
    for ch in ["x", "!", " ", "\b", "q"]:
        events.extend(session.echo_keystroke(ch))
    for event in events:
        if event.kind == "char_echo":
            assert len(event.text) == 1 or event.text == "backspace"


def test_echo_rejects_multichar_and_unprintable():
    session, _ = make_session([])
    with pytest.raises(ValueError):
        session.echo_keystroke("ab")
    with pytest.raises(ValueError):
        session.echo_keystroke("\x07")


def test_verify_last_renders_delta_without_model():
    session, _ = make_session([
        ("make the cube blue",
         modify_reply("The cube is now blue.", 'set-color "Cube" #0000FF')),
    ])
    session.handle_user_input("Make the cube blue.")
    assert session.verify_last() == "Cube color changed from red to blue."


def test_verify_last_before_any_modification_raises():
    session, _ = make_session([])
    with pytest.raises(NoModificationYet):
        session.verify_last()


def test_verify_last_describes_created_objects():
    session, _ = make_session([
        ("light it up",
         modify_reply("Added a light.", "create-light (0.0, 3.0, 2.0) 1.5")),
    ])
    session.handle_user_input("Light it up over there.")
    text = session.verify_last()
    assert "Created Point Light 1." in text


def test_undo_last_restores_previous_state():
    session, host = make_session([
        ("make the cube blue",
         modify_reply("The cube is now blue.", 'set-color "Cube" #0000FF')),
    ])
    session.handle_user_input("Make the cube blue.")
    base = host.version
    event = session.undo_last()
    assert event.kind == "reply"
    assert event.text == "Reverted the last modification."
    assert host.snapshot().objects["cube"].color == ColorRGBA(255, 0, 0)
    assert host.version == base - 1
    with pytest.raises(NoModificationYet):
        session.verify_last()


def test_transcript_round_trips_as_jsonl(tmp_path):
    session, _ = make_session([
        ("make the cube blue",
         modify_reply("The cube is now blue.", 'set-color "Cube" #0000FF')),
        ("what color", "The cube is blue."),
    ])
    session.handle_user_input("Make the cube blue.")
    session.handle_user_input("What color is it now?")
    path = tmp_path / "transcript.jsonl"
    session.save_transcript(path)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    first, second = (json.loads(line) for line in lines)
    assert [first["index"], second["index"]] == [0, 1]
    assert first["envelope"]["mode"] == "modify"
    assert first["delta"]["base_version"] == 0
    assert first["delta"]["result_version"] == 1
    assert first["delta"]["entries"][0][:2] == ["cube", "color"]
    assert second["delta"] is None
    assert all(u["kind"] == "reply" for u in first["utterances"])


def test_identical_runs_produce_identical_transcripts(tmp_path):
    rules = [
        ("make the cube blue",
         modify_reply("The cube is now blue.", 'set-color "Cube" #0000FF')),
        ("louder", modify_reply("Turned it up.", 'set-volume "Speaker 1" 0.8')),
    ]
    inputs = ["Make the cube blue.", "Make the speaker louder.", "Thanks!"]
    paths = []
    for run in range(2):
        session, _ = make_session(rules)
        for text in inputs:
            session.handle_user_input(text)
        path = tmp_path / f"run{run}.jsonl"
        session.save_transcript(path)
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_prompt_carries_scene_graph_and_history():
    good = modify_reply("The cube is now blue.", 'set-color "Cube" #0000FF')
    backend = SequenceBackend([good, "It is blue."])
    session = Session(SceneHost(build_scene()), backend, clock=FakeClock())
    session.handle_user_input("Make the cube blue.")
    session.handle_user_input("What color is the cube now?")

    second_prompt = backend.prompts[1]
    final = second_prompt[-1]["content"]
    assert "Current scene:" in final
    assert "User request: What color is the cube now?" in final
    assert "color #0000FF" in final  # refreshed scene graph reflects the change
    joined = json.dumps(second_prompt)
    assert "Make the cube blue." in joined  # first exchange retained


def test_scene_clock_tick_expires_highlights():
    session, host = make_session([
        ("highlight the cube",
         modify_reply("Highlighted.", 'highlight "Cube"')),
    ])
    session.handle_user_input("Highlight the cube for me.")
    created = session.last_delta.created_ids[0]
    assert created in host.snapshot().objects
    assert session.tick(4.99) == []
    assert session.tick(0.01) == [created]
    assert created not in host.snapshot().objects
