"""Offline analysis pipeline: scripted study sessions, prompt coding, tallies.

Three layers:

* Scripted scenarios. ``DEMO_SEQUENCE`` walks the tutorial-room demo
  (query, modify, verify per category) and ``SCENE2_TASKS`` are the six
  goal-oriented park tasks, each with machine-checkable postconditions
  over scene snapshots.  Both run against the deterministic scripted
  backend, so no network is involved.
* Prompt coding. ``code_prompt`` assigns category labels from a shipped
  keyword lexicon plus the commands a modification actually used, and a
  correctness code judged against ground truth (applied deltas and
  snapshots), never against the model's own claims.
* Tallies. ``tally`` turns coded prompts into per-category counts,
  overall percentages at one-decimal rounding, and CSV.
"""

from __future__ import annotations

import enum
import itertools
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

from .gateway import Backend, ScriptedBackend, ScriptedRule, normalize
from .prompt import CLARIFY_TEMPLATE, EnvelopeMode, render_envelope
from .scene import Scene, SceneHost
from .scenefile import load_bundled
from .session import NavCommand, Session, TranscriptEntry
from .sml import Command, parse_text
from .spatial import (
    Direction,
    bounding_extent,
    egocentric_direction,
    horizontal_distance,
    light_density_at,
)
from .types import ColorRGBA


class CategoryCode(str, enum.Enum):
    OBJECT_LOCATION = "ObjectLocation"
    AUDIO_VOLUME = "AudioVolume"
    COLOR = "Color"
    OBJECT_SIZE = "ObjectSize"
    SCENE_BRIGHTNESS = "SceneBrightness"
    AUDIO_PITCH = "AudioPitch"
    SCENE_DESCRIPTION = "SceneDescription"
    SEMANTIC_DESCRIPTION = "SemanticDescription"
    FUNCTIONALITY = "Functionality"
    CREATION_DELETION = "CreationDeletion"
    OTHER = "Other"


class GoalCode(str, enum.Enum):
    US = "US"  # understand whole scene
    SS = "SS"  # search within scene
    QI = "QI"  # question about specific items
    EK = "EK"  # external knowledge
    EM = "EM"  # explicit modification (task-driven)
    PM = "PM"  # proactive modification (user-driven)
    CM = "CM"  # creative modification
    V = "V"    # verify changes

    @property
    def group(self) -> str:
        return GOAL_GROUPS[self]


GOAL_GROUPS = {
    GoalCode.US: "Exploration",
    GoalCode.SS: "Exploration",
    GoalCode.QI: "Exploration",
    GoalCode.EK: "Execution",
    GoalCode.EM: "Execution",
    GoalCode.PM: "Execution",
    GoalCode.CM: "Execution",
    GoalCode.V: "Verification",
}


class CorrectnessCode(str, enum.Enum):
    SUCCESS = "success"
    OUT_OF_SCOPE_ACK = "out_of_scope_ack"
    INTENT_ERROR = "intent_error"
    TECHNICAL_ERROR = "technical_error"


class UncodeableEntry(ValueError):
    """A transcript row too damaged to code by the rule table."""


# -- category coding ---------------------------------------------------------

_COMMAND_CATEGORY = {
    Command.SET_COLOR: CategoryCode.COLOR,
    Command.SIMPLIFY_MATERIAL: CategoryCode.COLOR,
    Command.SET_SCALE: CategoryCode.OBJECT_SIZE,
    Command.SCALE_BY: CategoryCode.OBJECT_SIZE,
    Command.SET_TEXT_SIZE: CategoryCode.OBJECT_SIZE,
    Command.MOVE_TO: CategoryCode.OBJECT_LOCATION,
    Command.MOVE_BY: CategoryCode.OBJECT_LOCATION,
    Command.MOVE_NEAR: CategoryCode.OBJECT_LOCATION,
    Command.MOVE_PLAYER: CategoryCode.OBJECT_LOCATION,
    Command.FACE: CategoryCode.OBJECT_LOCATION,
    Command.HIGHLIGHT: CategoryCode.OBJECT_LOCATION,
    Command.SET_LIGHT_INTENSITY: CategoryCode.SCENE_BRIGHTNESS,
    Command.CREATE_LIGHT: CategoryCode.SCENE_BRIGHTNESS,
    Command.SET_AMBIENT: CategoryCode.SCENE_BRIGHTNESS,
    Command.SET_VOLUME: CategoryCode.AUDIO_VOLUME,
    Command.SET_RANGE: CategoryCode.AUDIO_VOLUME,
    Command.MUTE: CategoryCode.AUDIO_VOLUME,
    Command.UNMUTE: CategoryCode.AUDIO_VOLUME,
    Command.SET_PITCH: CategoryCode.AUDIO_PITCH,
    Command.CREATE_PRIMITIVE: CategoryCode.CREATION_DELETION,
}

_OUT_OF_SCOPE_MARKERS = (
    "zoom", "magnifier", "magnify", "edge enhancement", "delete", "remove",
    "disappear", "erase", "get rid of", "textured",
)


def load_lexicon() -> dict[CategoryCode, tuple[str, ...]]:
    ref = resources.files("scenetalk.resources") / "category_lexicon.json"
    data = json.loads(ref.read_text(encoding="utf-8"))
    return {
        CategoryCode(name): tuple(words)
        for name, words in data.items()
        if not name.startswith("_")
    }


_LEXICON: dict[CategoryCode, tuple[str, ...]] | None = None


def _lexicon() -> dict[CategoryCode, tuple[str, ...]]:
    global _LEXICON
    if _LEXICON is None:
        _LEXICON = load_lexicon()
    return _LEXICON


def lexicon_categories(text: str) -> frozenset[CategoryCode]:
    """Word-boundary keyword match on normalized text."""
    needle = normalize(text)
    hits = set()
    for category, keywords in _lexicon().items():
        for keyword in keywords:
            if re.search(rf"\b{re.escape(normalize(keyword))}\b", needle):
                hits.add(category)
                break
    return frozenset(hits)


def program_categories(program_text: str) -> frozenset[CategoryCode]:
    try:
        program = parse_text(program_text)
    except ValueError as e:
        raise UncodeableEntry(f"unparseable program in entry: {e}") from None
    return frozenset(_COMMAND_CATEGORY[s.command] for s in program.statements)


def _matches_out_of_scope_list(text: str) -> bool:
    needle = normalize(text)
    return any(normalize(marker) in needle for marker in _OUT_OF_SCOPE_MARKERS)


def entry_row(entry: TranscriptEntry) -> dict:
    """Live transcript entry -> the JSONL row shape coding consumes."""
    return json.loads(entry.to_json())


def code_prompt(
    entry: dict,
    modify_check: Callable[[dict], bool] | None = None,
    answer_check: Callable[[str], bool] | None = None,
) -> tuple[frozenset[CategoryCode], CorrectnessCode]:
    """Deterministic category + correctness coding for one transcript row.

    Categories come from the request lexicon united with the categories of
    the commands actually executed.  Correctness is judged against ground
    truth: an applied delta (optionally checked by ``modify_check``), an
    answer (optionally checked by ``answer_check``), or a correctly
    acknowledged out-of-scope request.  A modification whose command
    categories share nothing with the request's is coded as an intent
    error: the system did something, but not the thing asked for.
    """
    if not isinstance(entry, dict):
        raise UncodeableEntry(f"entry must be a dict, got {type(entry).__name__}")
    user_input = entry.get("user_input")
    if not isinstance(user_input, str) or not user_input.strip():
        raise UncodeableEntry("entry has no user_input text")
    if "reply" not in entry:
        raise UncodeableEntry("entry has no reply")

    envelope = entry.get("envelope")
    report = entry.get("report") or {}
    verdict = report.get("verdict")
    mode = envelope.get("mode") if envelope else None
    program_text = (envelope or {}).get("program")

    request_cats = lexicon_categories(user_input)
    action_cats: frozenset[CategoryCode] = frozenset()
    if program_text:
        action_cats = program_categories(program_text)
    categories = request_cats | action_cats
    if verdict == "out_of_scope" or mode == "out_of_scope":
        categories = categories or frozenset({CategoryCode.CREATION_DELETION})
    if not categories:
        categories = frozenset({CategoryCode.OTHER})

    if envelope is None:
        return categories, CorrectnessCode.TECHNICAL_ERROR

    if verdict == "out_of_scope":
        # the guardrail caught a listed task (textured-material recolor)
        return categories, CorrectnessCode.OUT_OF_SCOPE_ACK
    if mode == "out_of_scope":
        if _matches_out_of_scope_list(user_input):
            return categories, CorrectnessCode.OUT_OF_SCOPE_ACK
        return categories, CorrectnessCode.INTENT_ERROR

    if mode == "modify":
        if entry.get("delta") is None:
            return categories, CorrectnessCode.TECHNICAL_ERROR
        if modify_check is not None and not modify_check(entry):
            return categories, CorrectnessCode.TECHNICAL_ERROR
        if request_cats and action_cats and not (request_cats & action_cats):
            return categories, CorrectnessCode.INTENT_ERROR
        return categories, CorrectnessCode.SUCCESS

    if mode == "answer":
        reply = entry.get("reply", "")
        if answer_check is not None and not answer_check(reply):
            return categories, CorrectnessCode.TECHNICAL_ERROR
        return categories, CorrectnessCode.SUCCESS

    if mode == "clarify":
        return categories, CorrectnessCode.SUCCESS
    # error_recovery: the turn produced no usable outcome
    return categories, CorrectnessCode.TECHNICAL_ERROR


@dataclass(frozen=True)
class CodedPrompt:
    categories: frozenset[CategoryCode]
    correctness: CorrectnessCode
    diagnostic: str | None = None


def code_entries(entries) -> list[CodedPrompt]:
    """Batch coding; uncodeable rows are routed to Other + technical_error
    with the diagnostic preserved."""
    coded = []
    for entry in entries:
        try:
            categories, correctness = code_prompt(entry)
            coded.append(CodedPrompt(categories, correctness))
        except UncodeableEntry as e:
            coded.append(CodedPrompt(
                frozenset({CategoryCode.OTHER}),
                CorrectnessCode.TECHNICAL_ERROR,
                diagnostic=str(e),
            ))
    return coded


# -- tallies -----------------------------------------------------------------

@dataclass
class TallyReport:
    total: int
    correctness_counts: dict[CorrectnessCode, int]
    category_rows: dict[CategoryCode, Counter]
    multi_label_overcount: int

    def percent(self, code: CorrectnessCode) -> float:
        return round(100.0 * self.correctness_counts.get(code, 0) / self.total, 1)

    @property
    def error_percent(self) -> float:
        errors = (self.correctness_counts.get(CorrectnessCode.INTENT_ERROR, 0)
                  + self.correctness_counts.get(CorrectnessCode.TECHNICAL_ERROR, 0))
        return round(100.0 * errors / self.total, 1)

    def to_csv(self) -> str:
        lines = ["category,success,out_of_scope,intent_error,technical_error,total"]
        for category in CategoryCode:
            row = self.category_rows.get(category)
            if not row:
                continue
            cells = [row.get(code, 0) for code in CorrectnessCode]
            lines.append(f"{category.value},{','.join(str(c) for c in cells)},{sum(cells)}")
        totals = [self.correctness_counts.get(code, 0) for code in CorrectnessCode]
        lines.append(f"TOTAL,{','.join(str(c) for c in totals)},{self.total}")
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        return (
            f"{self.total} prompts: "
            f"{self.percent(CorrectnessCode.SUCCESS)}% success, "
            f"{self.percent(CorrectnessCode.OUT_OF_SCOPE_ACK)}% out-of-scope, "
            f"{self.error_percent}% error "
            f"({self.correctness_counts.get(CorrectnessCode.INTENT_ERROR, 0)} intent, "
            f"{self.correctness_counts.get(CorrectnessCode.TECHNICAL_ERROR, 0)} technical); "
            f"multi-label overcount {self.multi_label_overcount}"
        )


def tally(coded: list[CodedPrompt]) -> TallyReport:
    if not coded:
        raise ValueError("cannot tally an empty coded set")
    correctness_counts: dict[CorrectnessCode, int] = Counter()
    category_rows: dict[CategoryCode, Counter] = {}
    overcount = 0
    for prompt in coded:
        correctness_counts[prompt.correctness] += 1
        overcount += len(prompt.categories) - 1
        for category in prompt.categories:
            category_rows.setdefault(category, Counter())[prompt.correctness] += 1
    report = TallyReport(
        total=len(coded),
        correctness_counts=dict(correctness_counts),
        category_rows=category_rows,
        multi_label_overcount=overcount,
    )
    labeled = sum(sum(row.values()) for row in category_rows.values())
    assert labeled == report.total + overcount, "category rows must reconcile"
    return report


# -- scripted scenarios ------------------------------------------------------

def _modify(reply: str, program_text: str) -> str:
    return render_envelope(EnvelopeMode.MODIFY, reply, parse_text(program_text))


def _answer(reply: str) -> str:
    return render_envelope(EnvelopeMode.ANSWER, reply)


def _oos(reply: str) -> str:
    return render_envelope(EnvelopeMode.OUT_OF_SCOPE, reply)


# Patterns are matched against the normalized prompt, which embeds the user
# request after the scene graph; anchoring on "user request" keeps scene
# text from triggering rules.  More specific patterns must precede their
# prefixes ("... cube now" before "... of the cube").
DEMO_RULES = [
    ScriptedRule(
        "user request what is the color of the cube now",
        _answer("The cube is now green, matching the sphere."),
    ),
    ScriptedRule(
        "user request what is the color of the cube",
        _answer("The cube is red."),
    ),
    ScriptedRule(
        "user request what is the color of the sphere",
        _answer("The sphere is green."),
    ),
    ScriptedRule(
        "user request make the color of the cube the same as the sphere",
        _modify("The cube is now green like the sphere.",
                'set-color "Red Cube" #008000'),
    ),
    ScriptedRule(
        "user request what is the size of the speaker 1",
        _answer("Speaker 1 is about 0.3 by 0.5 by 0.3 meters."),
    ),
    ScriptedRule(
        "user request can you make it smaller",
        _modify("Speaker 1 is now half its previous size.",
                'scale-by "Speaker 1" 0.5'),
    ),
    ScriptedRule(
        "user request will it fit into my hand",
        _answer("Yes. At about 25 centimeters tall it would rest in your hand."),
    ),
    ScriptedRule(
        "user request grab one of the speakers onto my hand",
        _modify("Speaker 1 is now in your hand.",
                'move-to "Speaker 1" (0.0, 1.2, 0.6)'),
    ),
    ScriptedRule(
        "user request follow step one",
        _modify("Keeping Speaker 1 in your hand.",
                'move-to "Speaker 1" (0.0, 1.2, 1.1)'),
    ),
    ScriptedRule(
        "user request follow step two",
        _modify("Keeping Speaker 1 in your hand.",
                'move-to "Speaker 1" (1.6, 1.2, 0.5)'),
    ),
    ScriptedRule(
        "user request what am i grabbing",
        _answer("You are holding Speaker 1."),
    ),
    ScriptedRule(
        "user request select speaker one",
        _modify("Speaker 1 is highlighted with a glowing sphere for five seconds.",
                'highlight "Speaker 1"'),
    ),
    ScriptedRule(
        "user request how bright is the scene now",
        _answer("The scene around you is still lit, noticeably brighter than before."),
    ),
    ScriptedRule(
        "user request how bright is the scene",
        _answer("The scene around you is lit."),
    ),
    ScriptedRule(
        "user request make the sunlight brighter",
        _modify("The sunlight is twice as bright now.",
                'set-light-intensity "Sunlight" 1.6'),
    ),
    ScriptedRule(
        "user request mute all speakers",
        _modify("Both speakers are muted.",
                'mute "Speaker 1"\nmute "Speaker 2"'),
    ),
    ScriptedRule(
        "user request unmute speaker one",
        _modify("Speaker 1 is unmuted.", 'unmute "Speaker 1"'),
    ),
    ScriptedRule(
        "user request move speaker one much closer to me",
        _modify("Speaker 1 is right next to you.",
                'move-to "Speaker 1" (1.5, 1.0, 0.5)'),
    ),
    ScriptedRule(
        "user request make the speaker one sound much louder",
        _modify("Speaker 1 is much louder now.", 'set-volume "Speaker 1" 0.9'),
    ),
    ScriptedRule(
        "user request make the pitch of speaker one higher",
        _modify("Speaker 1 now plays at a higher pitch.",
                'set-pitch "Speaker 1" 1.5'),
    ),
    ScriptedRule(
        "user request is the pitch of speaker 1 higher than speaker 2 now",
        _answer("Yes. Speaker 1 plays at pitch 1.5 while Speaker 2 stays at 1.1."),
    ),
]

TASK_RULES = [
    ScriptedRule(
        "user request describe the scene around me",
        _answer("You are in a small park. A paved road runs left to right "
                "with three cats on and around it, a bench under a "
                "streetlamp stands ahead of you, and an oak tree and a "
                "garden hut sit further out on the grass."),
    ),
    ScriptedRule(
        "user request the bench is a color unfriendly to lowvision users",
        _modify("The bench is now bright yellow, which stands out against "
                "the green park.",
                'simplify-material "Bench"\nset-color "Bench" #FFFF00'),
    ),
    ScriptedRule(
        "user request whats different about how each of the cats sounds",
        _answer("Each cat has its own meow: the White Cat is soft and "
                "high-pitched, the Black Cat low and deep, and the Orange "
                "Cat loud with a medium pitch."),
    ),
    ScriptedRule(
        "user request turn down the other cats",
        _modify("The Black Cat and Orange Cat are much quieter now.",
                'set-volume "Black Cat" 0.1\nset-volume "Orange Cat" 0.1'),
    ),
    ScriptedRule(
        "user request which of these cats seems to be the happiest",
        _answer("The White Cat seems happiest; its meow is bright and "
                "high-pitched."),
    ),
    ScriptedRule(
        "user request where is the bench and who is this bench dedicated to",
        _answer("The bench is in front of you, a moderate distance away. "
                "Its plaque reads: In loving memory of Rosa Alvarez."),
    ),
    ScriptedRule(
        "user request imagine youre taking a virtual photo of the white cat",
        _modify("The park is brighter now: ambient light is up and the "
                "streetlamp is at full strength.",
                'set-ambient 0.9\nset-light-intensity "Streetlamp" 3.0'),
    ),
    ScriptedRule(
        "user request make the bench bigger",
        _modify("The bench is now half again as large.",
                'scale-by "Bench" 1.5'),
    ),
]

OUT_OF_SCOPE_RULES = [
    ScriptedRule(
        "add a zoom",
        _oos("Sorry, that request is out of scope: zoom and magnifier "
             "effects are not supported in this environment."),
    ),
    ScriptedRule(
        "magnifier",
        _oos("Sorry, that request is out of scope: zoom and magnifier "
             "effects are not supported in this environment."),
    ),
    ScriptedRule(
        "edge enhancement",
        _oos("Sorry, that request is out of scope: edge enhancement is "
             "not supported in this environment."),
    ),
    ScriptedRule(
        "user request paint the torch",
        _modify("The torch is green now.", 'set-color "Torch" #00FF00'),
    ),
    ScriptedRule(
        "make the pen disappear",
        _oos("Sorry, that request is out of scope: object deletion is "
             "not supported in this environment."),
    ),
    ScriptedRule(
        "delete",
        _oos("Sorry, that request is out of scope: object deletion is "
             "not supported in this environment."),
    ),
]

FALLBACK_RESPONSE = render_envelope(EnvelopeMode.CLARIFY, CLARIFY_TEMPLATE)


def default_scripted_backend() -> ScriptedBackend:
    return ScriptedBackend(
        rules=[*DEMO_RULES, *TASK_RULES, *OUT_OF_SCOPE_RULES],
        fallback=FALLBACK_RESPONSE,
    )


def deterministic_clock(start: float = 0.0, step: float = 1.0):
    counter = itertools.count()
    return lambda: start + step * next(counter)


# -- the scripted demo walk ---------------------------------------------------

@dataclass(frozen=True)
class DemoStep:
    label: str
    input: str | None = None
    nav: tuple[str, float] | None = None
    tick: float | None = None
    expect_mode: EnvelopeMode | None = None
    check: Callable[[Scene], bool] | None = None
    check_label: str = ""


def _speaker1_near_player(scene: Scene) -> bool:
    return horizontal_distance(
        scene.player, scene.resolve_object("Speaker 1").position
    ) <= 1.2


DEMO_SEQUENCE: tuple[DemoStep, ...] = (
    DemoStep("color query", input="What is the color of the cube?",
             expect_mode=EnvelopeMode.ANSWER),
    DemoStep("color query sphere", input="What is the color of the sphere?",
             expect_mode=EnvelopeMode.ANSWER),
    DemoStep("color modify", input="Make the color of the cube the same as the sphere.",
             expect_mode=EnvelopeMode.MODIFY,
             check=lambda s: (s.resolve_object("Red Cube").color
                              == s.resolve_object("Green Sphere").color),
             check_label="cube color equals sphere color"),
    DemoStep("color verify", input="What is the color of the cube now?",
             expect_mode=EnvelopeMode.ANSWER),
    DemoStep("size query", input="What is the size of the speaker 1?",
             expect_mode=EnvelopeMode.ANSWER),
    DemoStep("size modify", input="Can you make it smaller?",
             expect_mode=EnvelopeMode.MODIFY,
             check=lambda s: bounding_extent(s.resolve_object("Speaker 1")).y == 0.25,
             check_label="speaker extent halved"),
    DemoStep("size verify", input="Will it fit into my hand?",
             expect_mode=EnvelopeMode.ANSWER),
    DemoStep("location modify", input="Grab one of the speakers onto my hand.",
             expect_mode=EnvelopeMode.MODIFY,
             check=_speaker1_near_player,
             check_label="speaker within reach"),
    DemoStep("walk forward", nav=("move_forward", 0.5)),
    DemoStep("location follow 1", input="follow step one",
             expect_mode=EnvelopeMode.MODIFY,
             check=_speaker1_near_player,
             check_label="speaker follows after forward step"),
    DemoStep("pan toward +x", nav=("pan_right", 90.0)),
    DemoStep("walk +x", nav=("move_forward", 1.0)),
    DemoStep("location follow 2", input="follow step two",
             expect_mode=EnvelopeMode.MODIFY,
             check=_speaker1_near_player,
             check_label="speaker follows after turn"),
    DemoStep("location verify", input="What am I grabbing?",
             expect_mode=EnvelopeMode.ANSWER),
    DemoStep("highlight modify", input="Select speaker one.",
             expect_mode=EnvelopeMode.MODIFY,
             check=lambda s: any(o.has_tag("highlight") for o in s.objects.values()),
             check_label="highlight marker present"),
    DemoStep("highlight still visible", tick=4.96875,
             check=lambda s: any(o.has_tag("highlight") for o in s.objects.values()),
             check_label="marker alive just before five seconds"),
    DemoStep("highlight expires", tick=0.03125,
             check=lambda s: not any(o.has_tag("highlight") for o in s.objects.values()),
             check_label="marker gone at exactly five seconds"),
    DemoStep("brightness query", input="How bright is the scene?",
             expect_mode=EnvelopeMode.ANSWER),
    DemoStep("brightness modify", input="Make the sunlight brighter.",
             expect_mode=EnvelopeMode.MODIFY,
             check=lambda s: s.resolve_object("Sunlight").light.intensity == 1.6,
             check_label="sunlight intensity raised"),
    DemoStep("brightness verify", input="How bright is the scene now?",
             expect_mode=EnvelopeMode.ANSWER),
    DemoStep("volume mute all", input="Mute all speakers",
             expect_mode=EnvelopeMode.MODIFY,
             check=lambda s: (s.resolve_object("Speaker 1").audio.muted
                              and s.resolve_object("Speaker 2").audio.muted),
             check_label="both speakers muted"),
    DemoStep("volume unmute one", input="Unmute speaker one",
             expect_mode=EnvelopeMode.MODIFY,
             check=lambda s: (not s.resolve_object("Speaker 1").audio.muted
                              and s.resolve_object("Speaker 2").audio.muted),
             check_label="only speaker one unmuted"),
    DemoStep("volume move closer", input="Move speaker one much closer to me",
             expect_mode=EnvelopeMode.MODIFY,
             check=lambda s: horizontal_distance(
                 s.player, s.resolve_object("Speaker 1").position) <= 1.0,
             check_label="speaker beside player"),
    DemoStep("volume louder", input="Make the speaker one sound much louder",
             expect_mode=EnvelopeMode.MODIFY,
             check=lambda s: s.resolve_object("Speaker 1").audio.volume == 0.9,
             check_label="volume raised to 0.9"),
    DemoStep("pitch modify", input="Make the pitch of speaker one higher.",
             expect_mode=EnvelopeMode.MODIFY,
             check=lambda s: s.resolve_object("Speaker 1").audio.pitch == 1.5,
             check_label="pitch raised to 1.5"),
    DemoStep("pitch verify", input="Is the pitch of speaker 1 higher than speaker 2 now?",
             expect_mode=EnvelopeMode.ANSWER,
             check=lambda s: (s.resolve_object("Speaker 1").audio.pitch
                              > s.resolve_object("Speaker 2").audio.pitch),
             check_label="pitch claim matches ground truth"),
)


@dataclass
class StepResult:
    label: str
    ok: bool
    detail: str = ""


def run_demo(backend: Backend | None = None) -> tuple[list[StepResult], Session]:
    """Replay the tutorial demo sequence on a fresh demo-room session."""
    session = Session(
        SceneHost(load_bundled("demo_room")),
        backend or default_scripted_backend(),
        clock=deterministic_clock(),
    )
    results: list[StepResult] = []
    for step in DEMO_SEQUENCE:
        problems = []
        if step.input is not None:
            session.handle_user_input(step.input)
            entry = session.transcript[-1]
            if step.expect_mode is not None:
                if entry.envelope is None or entry.envelope.mode != step.expect_mode:
                    problems.append(
                        f"expected mode {step.expect_mode.value}, got "
                        f"{entry.envelope.mode.value if entry.envelope else 'no envelope'}"
                    )
                if step.expect_mode == EnvelopeMode.MODIFY and entry.delta is None:
                    problems.append("expected an applied delta")
        if step.nav is not None:
            kind, magnitude = step.nav
            session.navigate(NavCommand(kind, magnitude))
        if step.tick is not None:
            session.tick(step.tick)
        if step.check is not None and not step.check(session.host.snapshot()):
            problems.append(f"check failed: {step.check_label}")
        results.append(StepResult(step.label, not problems, "; ".join(problems)))
    return results, session


# -- the six park tasks -------------------------------------------------------

@dataclass(frozen=True)
class TaskScript:
    task_id: str
    scene_id: str
    inputs: tuple[str, ...]
    postconditions: tuple[tuple[str, Callable[[Scene, Scene, list], bool]], ...]


def _reply_texts(entries: list[TranscriptEntry]) -> list[str]:
    return [e.reply for e in entries]


def _t1_answer_no_delta(initial, final, entries) -> bool:
    entry = entries[0]
    return (entry.envelope is not None
            and entry.envelope.mode == EnvelopeMode.ANSWER
            and entry.delta is None)


def _t1_grouped_brief(initial, final, entries) -> bool:
    reply = entries[0].reply
    return "cats" in reply and "bench" in reply and len(reply) < 400


def _t2_color_changed(initial, final, entries) -> bool:
    return (final.resolve_object("Bench").color
            != initial.resolve_object("Bench").color)


def _t2_contrasts_with_grass(initial, final, entries) -> bool:
    from .colors import color_similarity
    bench = final.resolve_object("Bench").color
    grass = final.resolve_object("Grass Field").color
    return color_similarity(bench, grass) < 0.75


def _t2_material_simplified(initial, final, entries) -> bool:
    return not final.resolve_object("Bench").has_tag("textured")


def _t3_white_cat_isolated(initial, final, entries) -> bool:
    white = final.resolve_object("White Cat").audio.volume
    return all(
        white > final.resolve_object(name).audio.volume
        for name in ("Black Cat", "Orange Cat")
    )


def _t3_names_highest_pitch_cat(initial, final, entries) -> bool:
    cats = [o for o in final.objects.values() if "cat" in o.name.lower()]
    happiest = max(cats, key=lambda o: o.audio.pitch).name
    return any(happiest in reply for reply in _reply_texts(entries))


def _t4_dedication_found(initial, final, entries) -> bool:
    dedication = final.resolve_object("Bench").text.content
    name = dedication.rsplit(" of ", 1)[-1]
    return any(name in reply for reply in _reply_texts(entries))


def _t4_direction_consistent(initial, final, entries) -> bool:
    bench = final.resolve_object("Bench")
    direction = egocentric_direction(final.player, bench.position)
    if direction != Direction.IN_FRONT:
        return False
    return any("in front" in reply for reply in _reply_texts(entries))


def _t5_brighter_at_white_cat(initial, final, entries) -> bool:
    spot = initial.resolve_object("White Cat").position
    return light_density_at(final, spot) > light_density_at(initial, spot)


def _t6_bench_strictly_bigger(initial, final, entries) -> bool:
    before = bounding_extent(initial.resolve_object("Bench"))
    after = bounding_extent(final.resolve_object("Bench"))
    return after.x > before.x and after.y > before.y and after.z > before.z


SCENE2_TASKS: tuple[TaskScript, ...] = (
    TaskScript(
        "task-1-describe", "cat_park",
        ("Describe the scene around me.",),
        (("reply is an answer with no modification", _t1_answer_no_delta),
         ("description is brief and grouped", _t1_grouped_brief)),
    ),
    TaskScript(
        "task-2-recolor-bench", "cat_park",
        ("The bench is a color unfriendly to low-vision users, "
         "can you change it to a better color?",),
        (("bench color differs from the original", _t2_color_changed),
         ("new color contrasts with the grass", _t2_contrasts_with_grass),
         ("textured material simplified first", _t2_material_simplified)),
    ),
    TaskScript(
        "task-3-compare-cats", "cat_park",
        ("What's different about how each of the cats sounds?",
         "Turn down the other cats so I can hear the white cat better.",
         "Which of these cats seems to be the happiest?"),
        (("white cat louder than the others", _t3_white_cat_isolated),
         ("answer names the highest-pitched cat", _t3_names_highest_pitch_cat)),
    ),
    TaskScript(
        "task-4-find-dedication", "cat_park",
        ("Where is the bench and who is this bench dedicated to?",),
        (("reply quotes the dedication name", _t4_dedication_found),
         ("stated direction matches ground truth", _t4_direction_consistent)),
    ),
    TaskScript(
        "task-5-photo-brightness", "cat_park",
        ("Imagine you're taking a (virtual) photo of the white cat, "
         "try increasing the brightness of the scene for a better photo.",),
        (("light density at the white cat increased", _t5_brighter_at_white_cat),),
    ),
    TaskScript(
        "task-6-enlarge-bench", "cat_park",
        ("Make the bench bigger so that you and the cat have space "
         "to sit together.",),
        (("bench extent strictly larger on every axis", _t6_bench_strictly_bigger),),
    ),
)


@dataclass
class TaskResult:
    task_id: str
    passed: bool
    failures: list[str] = field(default_factory=list)


def run_task_scripts(
    tasks: tuple[TaskScript, ...] = SCENE2_TASKS,
    backend: Backend | None = None,
) -> list[TaskResult]:
    """Run each task through a fresh session and check its postconditions."""
    results = []
    for task in tasks:
        scene = load_bundled(task.scene_id)
        initial = scene.snapshot()
        session = Session(
            SceneHost(scene),
            backend or default_scripted_backend(),
            clock=deterministic_clock(),
        )
        for text in task.inputs:
            session.handle_user_input(text)
        final = session.host.snapshot()
        failures = [
            description
            for description, predicate in task.postconditions
            if not predicate(initial, final, session.transcript)
        ]
        results.append(TaskResult(task.task_id, not failures, failures))
    return results
