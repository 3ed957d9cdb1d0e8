"""The conversational loop: user text in, spoken feedback out.

One Session owns one scene host and one model backend.  Each user input
runs the full pipeline (snapshot, scene graph, prompt, model call,
envelope parse, guardrail validation, atomic interpretation) and every
reply the user receives is emitted as an utterance event, so a UI, a
speech synthesizer, or a log can subscribe to the same stream.

Self-voicing keyboard echo and player navigation live here too, plus the
model-free verification channel: verify_last renders the most recent
applied delta from ground truth instead of asking the model what it did.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, is_dataclass, asdict

from .colors import color_name
from .gateway import Backend, GatewayError
from .prompt import (
    ConversationHistory,
    EnvelopeMode,
    InstructionSet,
    MalformedEnvelope,
    ResponseEnvelope,
    ambiguity_reason,
    build_prompt,
    clarification_reply,
    error_recovery_reply,
    not_found_reason,
    out_of_scope_reply,
    parse_envelope,
)
from .scene import AmbiguityError, NotFoundError, Scene, SceneHost
from .spatial import facing_vector, right_vector
from .sml import (
    ArgKind,
    SIGNATURES,
    SceneDelta,
    SmlProgram,
    SmlRuntimeError,
    StaleDeltaError,
    ValidationReport,
    Verdict,
    format_program,
    interpret,
    revert,
    validate,
)
from .ssg import build_ssg, serialize_ssg
from .types import ColorRGBA, Vec3

WORD_BOUNDARY_CHARS = set(" .,!?;:")
TEXTURE_TASK = "color change on textured materials"


class NoModificationYet(Exception):
    """verify_last / undo_last called before any applied modification."""


@dataclass(frozen=True)
class UtteranceEvent:
    kind: str  # char_echo | word_echo | reply | error_notice
    text: str
    timestamp: float


@dataclass(frozen=True)
class NavCommand:
    kind: str
    magnitude: float = 0.0

    KINDS = (
        "move_forward", "move_back", "strafe_left", "strafe_right",
        "pan_left", "pan_right", "pan_up", "pan_down",
    )

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown nav command {self.kind!r}")
        if self.magnitude == 0.0:
            default = 0.5 if self.kind.startswith(("move", "strafe")) else 5.0
            object.__setattr__(self, "magnitude", default)
        if self.magnitude <= 0:
            raise ValueError(f"nav magnitude {self.magnitude} must be positive")


@dataclass
class TranscriptEntry:
    index: int
    wall_clock: float
    user_input: str
    envelope: ResponseEnvelope | None
    report: ValidationReport | None
    delta: SceneDelta | None
    reply: str
    utterances: list[UtteranceEvent] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "index": self.index,
                "wall_clock": self.wall_clock,
                "user_input": self.user_input,
                "envelope": _envelope_payload(self.envelope),
                "report": _report_payload(self.report),
                "delta": _delta_payload(self.delta),
                "reply": self.reply,
                "utterances": [
                    {"kind": u.kind, "text": u.text, "timestamp": u.timestamp}
                    for u in self.utterances
                ],
            },
            sort_keys=True,
            ensure_ascii=False,
        )


def _envelope_payload(envelope: ResponseEnvelope | None):
    if envelope is None:
        return None
    return {
        "mode": envelope.mode.value,
        "reply_text": envelope.reply_text,
        "program": format_program(envelope.program) if envelope.program else None,
    }


def _report_payload(report: ValidationReport | None):
    if report is None:
        return None
    return {
        "verdict": report.verdict.value,
        "diagnostics": [
            [d.statement_index, d.reason, d.severity] for d in report.diagnostics
        ],
        "resolved_targets": {str(k): v for k, v in report.resolved_targets.items()},
    }


def _json_value(value):
    if isinstance(value, Vec3):
        return value.to_list()
    if isinstance(value, ColorRGBA):
        return value.hex
    if isinstance(value, tuple):
        return list(value)
    if is_dataclass(value) and not isinstance(value, type):
        return asdict(value)
    return value


def _delta_payload(delta: SceneDelta | None):
    if delta is None:
        return None
    return {
        "base_version": delta.base_version,
        "result_version": delta.result_version,
        "entries": [
            [e.object_id, e.field_path, _json_value(e.old), _json_value(e.new)]
            for e in delta.entries
        ],
        "created_ids": list(delta.created_ids),
    }


class Session:
    """Binds a scene host to a model backend and runs the dialog loop."""

    def __init__(
        self,
        host: SceneHost,
        backend: Backend,
        instructions: InstructionSet | None = None,
        clock=time.time,
        max_turns: int = 20,
        token_budget: int = 16000,
    ):
        self.host = host
        self.backend = backend
        self.instructions = instructions or InstructionSet.load_default()
        self.clock = clock
        self.token_budget = token_budget
        self.history = ConversationHistory(max_turns=max_turns)
        self.transcript: list[TranscriptEntry] = []
        self.last_delta: SceneDelta | None = None
        self._listeners = []
        self._word_buffer: list[str] = []

    # -- event stream -------------------------------------------------------

    def add_listener(self, listener) -> None:
        self._listeners.append(listener)

    def _emit(self, kind: str, text: str) -> UtteranceEvent:
        event = UtteranceEvent(kind=kind, text=text, timestamp=self.clock())
        for listener in self._listeners:
            listener(event)
        return event

    # -- the main loop ------------------------------------------------------

    def handle_user_input(self, text: str) -> UtteranceEvent:
        """Run one full turn.  Returns the reply (or error notice) event;
        the transcript entry is appended as a side effect."""
        started = self.clock()
        snapshot = self.host.snapshot()
        ssg_text = serialize_ssg(build_ssg(snapshot))
        messages = build_prompt(
            self.instructions, self.history, ssg_text, text, token_budget=self.token_budget
        )

        try:
            model_text = self.backend.complete(messages)
        except GatewayError as e:
            notice = self._emit("error_notice", _gateway_notice(e))
            self._record(started, text, None, None, None, notice.text, [notice])
            return notice

        envelope, repair_notice = self._parse_with_repair(messages, model_text)
        if envelope is None:
            reply = self._emit("reply", error_recovery_reply())
            events = [reply] if repair_notice is None else [repair_notice, reply]
            self._record(started, text, None, None, None, reply.text, events)
            self._remember(text, reply.text)
            return reply

        report = None
        delta = None
        if envelope.mode == EnvelopeMode.MODIFY:
            report, delta, reply_text = self._apply_program(envelope)
        else:
            reply_text = envelope.reply_text or clarification_reply()

        reply = self._emit("reply", reply_text)
        self._record(started, text, envelope, report, delta, reply_text, [reply])
        self._remember(text, envelope.raw if envelope.raw else reply_text)
        return reply

    def _parse_with_repair(self, messages, model_text):
        """Parse the model reply; on violation, re-prompt once with the
        diagnostic appended, then give up (error-recovery flow)."""
        try:
            return parse_envelope(model_text), None
        except MalformedEnvelope as first:
            repair_messages = messages + [
                {"role": "assistant", "content": model_text},
                {
                    "role": "user",
                    "content": (
                        f"Your reply violated the output format: {first}. "
                        "Answer again, following the reply format contract exactly."
                    ),
                },
            ]
            try:
                repaired = self.backend.complete(repair_messages)
            except GatewayError as e:
                return None, self._emit("error_notice", _gateway_notice(e))
            try:
                return parse_envelope(repaired), None
            except MalformedEnvelope:
                return None, None

    def _apply_program(self, envelope: ResponseEnvelope):
        program = envelope.program

        def txn(scene: Scene):
            report = validate(program, scene)
            if report.verdict != Verdict.OK:
                return report, None, self._failure_reply(report, program, scene)
            try:
                delta = interpret(program, scene)
            except SmlRuntimeError as e:
                return report, None, error_recovery_reply(f"({e.reason})")
            return report, delta, envelope.reply_text or "Done."

        report, delta, reply_text = self.host.run(txn)
        if delta is not None:
            self.last_delta = delta
        return report, delta, reply_text

    def _failure_reply(self, report: ValidationReport, program: SmlProgram, scene: Scene) -> str:
        """Never voice the model's success claim when nothing was applied."""
        if report.verdict == Verdict.OUT_OF_SCOPE:
            detail = next(
                (d.reason for d in report.diagnostics if d.severity == "error"), ""
            )
            reply = out_of_scope_reply(TEXTURE_TASK)
            return f"{reply} {detail}" if detail else reply
        for stmt in program.statements:
            refs = []
            if isinstance(stmt.target, str):
                refs.append(stmt.target)
            signature = SIGNATURES[stmt.command]
            for kind, arg in zip(signature.args, stmt.args):
                if kind in (ArgKind.REF, ArgKind.REF_OR_PLAYER) and isinstance(arg, str):
                    refs.append(arg)
            for ref in refs:
                try:
                    scene.resolve_object(ref)
                except NotFoundError as e:
                    return clarification_reply(not_found_reason(e.ref))
                except AmbiguityError as e:
                    return clarification_reply(ambiguity_reason(e.candidates))
        first = next(d for d in report.diagnostics if d.severity == "error")
        return f"That modification was rejected: {first.reason}."

    def _record(self, started, text, envelope, report, delta, reply, events):
        self.transcript.append(
            TranscriptEntry(
                index=len(self.transcript),
                wall_clock=started,
                user_input=text,
                envelope=envelope,
                report=report,
                delta=delta,
                reply=reply,
                utterances=list(events),
            )
        )

    def _remember(self, user_text: str, assistant_text: str) -> None:
        self.history.add("user", user_text, self.clock())
        self.history.add("assistant", assistant_text, self.clock())

    # -- navigation ----------------------------------------------------------

    def navigate(self, cmd: NavCommand) -> None:
        def txn(scene: Scene):
            player = scene.player
            if cmd.kind in ("pan_left", "pan_right"):
                sign = 1.0 if cmd.kind == "pan_right" else -1.0
                player.yaw = (player.yaw + sign * cmd.magnitude) % 360.0
            elif cmd.kind in ("pan_up", "pan_down"):
                pass  # yaw-only camera model
            else:
                step = {
                    "move_forward": facing_vector(player.yaw).scaled(cmd.magnitude),
                    "move_back": facing_vector(player.yaw).scaled(-cmd.magnitude),
                    "strafe_right": right_vector(player.yaw).scaled(cmd.magnitude),
                    "strafe_left": right_vector(player.yaw).scaled(-cmd.magnitude),
                }[cmd.kind]
                player.position = player.position + step

        self.host.run(txn)

    # -- keyboard echo --------------------------------------------------------

    def echo_keystroke(self, char: str) -> list[UtteranceEvent]:
        """Self-voicing echo: a char event per key, a word event at word
        boundaries, 'backspace' on deletions (the one multi-char echo)."""
        events: list[UtteranceEvent] = []
        if char in ("\b", "backspace"):
            if self._word_buffer:
                self._word_buffer.pop()
            events.append(self._emit("char_echo", "backspace"))
            return events
        if char in ("\n", "\r", "enter"):
            if self._word_buffer:
                events.append(self._emit("word_echo", "".join(self._word_buffer)))
                self._word_buffer.clear()
            return events
        if len(char) != 1 or not char.isprintable():
            raise ValueError(f"echo_keystroke takes one printable character, got {char!r}")
        events.append(self._emit("char_echo", char))
        if char in WORD_BOUNDARY_CHARS:
            if self._word_buffer:
                events.append(self._emit("word_echo", "".join(self._word_buffer)))
                self._word_buffer.clear()
        else:
            self._word_buffer.append(char)
        return events

    # -- verification and undo -------------------------------------------------

    def verify_last(self) -> str:
        if self.last_delta is None:
            raise NoModificationYet("no modification has been applied yet")
        snapshot = self.host.snapshot()
        sentences = describe_delta(self.last_delta, snapshot)
        return " ".join(sentences)

    def undo_last(self) -> UtteranceEvent:
        if self.last_delta is None:
            raise NoModificationYet("no modification has been applied yet")
        delta = self.last_delta

        def txn(scene: Scene):
            revert(delta, scene)

        try:
            self.host.run(txn)
        except StaleDeltaError as e:
            return self._emit("error_notice", str(e))
        self.last_delta = None
        return self._emit("reply", "Reverted the last modification.")

    def tick(self, dt: float) -> list[str]:
        return self.host.run(lambda scene: scene.tick(dt))

    def save_transcript(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for entry in self.transcript:
                f.write(entry.to_json() + "\n")


def _gateway_notice(error: GatewayError) -> str:
    return f"The language model could not be reached: {error}"


def _display_name(object_id: str, scene: Scene) -> str:
    if object_id == "player":
        return "You"
    obj = scene.objects.get(object_id)
    return obj.name if obj else object_id


def _fmt_num(x) -> str:
    return f"{x:g}"


def _fmt_vec(v: Vec3) -> str:
    return f"({_fmt_num(v.x)}, {_fmt_num(v.y)}, {_fmt_num(v.z)})"


def describe_delta(delta: SceneDelta, scene: Scene) -> list[str]:
    """Ground-truth rendering of a delta into spoken sentences, in the
    order the changes applied."""
    sentences: list[str] = []
    for entry in delta.entries:
        if entry.object_id == "scene":
            if entry.field_path == "ambient_light_intensity":
                sentences.append(
                    f"Ambient light changed from {_fmt_num(entry.old)} "
                    f"to {_fmt_num(entry.new)}."
                )
            continue  # spawn_counter bookkeeping stays silent
        name = _display_name(entry.object_id, scene)
        path = entry.field_path
        if path == "color":
            old = color_name(entry.old) if entry.old else "unset"
            sentences.append(f"{name} color changed from {old} to {color_name(entry.new)}.")
        elif path == "position":
            verb = "moved" if name != "You" else "moved"
            sentences.append(
                f"{name} {verb} from {_fmt_vec(entry.old)} to {_fmt_vec(entry.new)}."
            )
        elif path == "scale":
            sentences.append(
                f"{name} scale changed from {_fmt_vec(entry.old)} to {_fmt_vec(entry.new)}."
            )
        elif path == "yaw":
            sentences.append(
                f"{name} turned from {_fmt_num(entry.old)} to {_fmt_num(entry.new)} degrees."
            )
        elif path == "tags":
            old_tags, new_tags = set(entry.old), set(entry.new)
            if "textured" in old_tags - new_tags:
                sentences.append(f"{name} material was simplified.")
        elif path == "audio.volume":
            sentences.append(
                f"{name} volume changed from {_fmt_num(entry.old)} to {_fmt_num(entry.new)}."
            )
        elif path == "audio.pitch":
            sentences.append(
                f"{name} pitch changed from {_fmt_num(entry.old)} to {_fmt_num(entry.new)}."
            )
        elif path == "audio.max_distance":
            sentences.append(
                f"{name} audio range changed from {_fmt_num(entry.old)} "
                f"to {_fmt_num(entry.new)} meters."
            )
        elif path == "audio.muted":
            sentences.append(f"{name} was {'muted' if entry.new else 'unmuted'}.")
        elif path == "light.intensity":
            sentences.append(
                f"{name} light intensity changed from {_fmt_num(entry.old)} "
                f"to {_fmt_num(entry.new)}."
            )
        elif path == "text.font_size":
            sentences.append(
                f"{name} text size changed from {_fmt_num(entry.old)} "
                f"to {_fmt_num(entry.new)}."
            )
        else:
            sentences.append(f"{name} {path} changed.")
    for object_id in delta.created_ids:
        sentences.append(f"Created {_display_name(object_id, scene)}.")
    if not sentences:
        sentences.append("No fields changed.")
    return sentences
