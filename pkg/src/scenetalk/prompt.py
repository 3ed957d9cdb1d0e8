"""Prompt construction and reply parsing.

Every model request is assembled the same way: one system message holding
the bundled accessibility and error-prevention rules, a generated grammar
summary of the modification language, and the output-format contract;
then the truncated conversation history; then one user message fusing the
current scene graph text with the user's words.

Model replies carry their intent in a fenced ```sml block whose first
line is a `#mode:` header; parse_envelope turns that into a typed
ResponseEnvelope or raises MalformedEnvelope so the session can run its
repair flow.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from importlib import resources as importlib_resources

from .sml import (
    ArgKind,
    Command,
    SIGNATURES,
    SmlError,
    SmlProgram,
    TargetKind,
    format_program,
    parse_text,
)

CLARIFY_TEMPLATE = (
    "It seems like your request is not clear. Could you please provide "
    "more details or clarify what you would like to achieve?"
)
ERROR_RECOVERY_TEMPLATE = "I apologize for the error. Let's try a different approach."

SECTION_PREFIX = "The following is a section about"
TOKEN_CHARS = 4  # crude budget estimate: characters per token
DEFAULT_TOKEN_BUDGET = 16000
DEFAULT_MAX_TURNS = 20


class MalformedEnvelope(ValueError):
    """The model reply violated the output-format contract."""


class EnvelopeMode(str, enum.Enum):
    MODIFY = "modify"
    ANSWER = "answer"
    CLARIFY = "clarify"
    OUT_OF_SCOPE = "out_of_scope"
    ERROR_RECOVERY = "error_recovery"


_HEADER_WORDS = {
    "modify": EnvelopeMode.MODIFY,
    "answer": EnvelopeMode.ANSWER,
    "clarify": EnvelopeMode.CLARIFY,
    "out-of-scope": EnvelopeMode.OUT_OF_SCOPE,
    "error-recovery": EnvelopeMode.ERROR_RECOVERY,
}
_MODE_HEADER = {mode: word for word, mode in _HEADER_WORDS.items()}


@dataclass(frozen=True)
class ResponseEnvelope:
    mode: EnvelopeMode
    reply_text: str
    program: SmlProgram | None = None
    raw: str = ""


def _read_resource(name: str) -> str:
    root = importlib_resources.files("scenetalk.resources.instructions")
    return (root / name).read_text(encoding="utf-8")


def _paragraphs(text: str) -> list[str]:
    return [p.strip() for p in re.split(r"\n\s*\n", text) if p.strip()]


@dataclass(frozen=True)
class InstructionSet:
    """The two bundled rule sets plus the out-of-scope task list.

    Rules load verbatim from resource files, one rule per paragraph;
    section header paragraphs are part of the prompt text and therefore
    kept in order within the rule list."""

    accessibility_rules: tuple[str, ...]
    error_prevention_rules: tuple[str, ...]
    out_of_scope_tasks: tuple[str, ...]

    @classmethod
    def load_default(cls, extra_out_of_scope: tuple[str, ...] = ()) -> "InstructionSet":
        oos = [
            line.strip()
            for line in _read_resource("out_of_scope.txt").splitlines()
            if line.strip()
        ]
        return cls(
            accessibility_rules=tuple(_paragraphs(_read_resource("accessibility.txt"))),
            error_prevention_rules=tuple(_paragraphs(_read_resource("error_prevention.txt"))),
            out_of_scope_tasks=tuple(oos) + tuple(extra_out_of_scope),
        )

    def section_headers(self) -> list[str]:
        return [r for r in self.accessibility_rules if r.startswith(SECTION_PREFIX)]


@dataclass(frozen=True)
class Turn:
    role: str  # "user" | "assistant"
    text: str
    timestamp: float


@dataclass
class ConversationHistory:
    """Chronological user/assistant turns with exchange-based truncation.

    max_turns counts exchanges (a user turn plus the assistant turns that
    answer it); truncation keeps the most recent max_turns exchanges."""

    max_turns: int = DEFAULT_MAX_TURNS
    turns: list[Turn] = field(default_factory=list)

    def add(self, role: str, text: str, timestamp: float) -> None:
        if role not in ("user", "assistant"):
            raise ValueError(f"bad history role {role!r}")
        self.turns.append(Turn(role, text, timestamp))

    def truncated(self) -> list[Turn]:
        if self.max_turns <= 0:
            return []
        count = 0
        start = 0
        for i in range(len(self.turns) - 1, -1, -1):
            if self.turns[i].role == "user":
                count += 1
                if count == self.max_turns:
                    start = i
                    break
        else:
            return list(self.turns)
        return self.turns[start:]


def grammar_summary() -> str:
    """One line per command, generated from the signature table so the
    prompt can never drift from the parser."""
    lines = ["Scene modification language, one statement per line:"]
    for cmd in Command:
        sig = SIGNATURES[cmd]
        parts = [cmd.value]
        if sig.target == TargetKind.OBJECT:
            parts.append('"<object>"')
        elif sig.target == TargetKind.OBJECT_OR_PLAYER:
            parts.append('"<object>"|player')
        for kind, name in zip(sig.args, sig.arg_names):
            rendering = {
                ArgKind.NUMBER: f"<{name}>",
                ArgKind.VECTOR: f"(<x>, <y>, <z>)",
                ArgKind.COLOR: "#RRGGBB",
                ArgKind.REF: f'"<{name}>"',
                ArgKind.REF_OR_PLAYER: f'"<{name}>"|player',
                ArgKind.SHAPE: "cube|sphere|cylinder|capsule|plane",
            }[kind]
            parts.append(rendering)
        lines.append("  " + " ".join(parts))
    lines.append("There is no command that deletes an object.")
    return "\n".join(lines)


FORMAT_CONTRACT = (
    "Reply format: write the sentence you would speak to the user as plain text. "
    "When the request requires changing the scene, also include exactly one fenced "
    "code block tagged sml whose first line is `#mode: modify` and whose remaining "
    "lines are one statement each. For every other intent include one fenced sml "
    "block containing only a mode header: `#mode: answer` for questions you have "
    "answered, `#mode: clarify` when you need more details, `#mode: out-of-scope` "
    "for unsupported requests, `#mode: error-recovery` when recovering from a "
    "failure. Never use commands outside the grammar above."
)


def system_message(instructions: InstructionSet) -> str:
    sections = [
        "\n\n".join(instructions.accessibility_rules),
        "\n\n".join(instructions.error_prevention_rules),
        grammar_summary(),
        FORMAT_CONTRACT,
    ]
    return "\n\n".join(sections)


def build_prompt(
    instructions: InstructionSet,
    history: ConversationHistory,
    ssg_text: str,
    user_input: str,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
) -> list[dict]:
    """Assemble the ordered message list for one model call.

    Oldest history turns are dropped first when the 4-chars/token budget
    estimate would be exceeded; the system message and the current user
    message are never dropped."""
    if not user_input:
        raise ValueError("user_input must be non-empty")
    system = {"role": "system", "content": system_message(instructions)}
    current = {
        "role": "user",
        "content": f"Current scene:\n{ssg_text}\nUser request: {user_input}",
    }
    kept = history.truncated()
    budget_chars = token_budget * TOKEN_CHARS
    fixed_cost = len(system["content"]) + len(current["content"])
    while kept and fixed_cost + sum(len(t.text) for t in kept) > budget_chars:
        kept = kept[1:]
    middle = [{"role": t.role, "content": t.text} for t in kept]
    return [system, *middle, current]


_FENCE_RE = re.compile(r"```sml[ \t]*\n(.*?)```", re.DOTALL)


def parse_envelope(model_text: str) -> ResponseEnvelope:
    """Parse a model reply into mode, spoken text, and optional program."""
    matches = list(_FENCE_RE.finditer(model_text))
    if len(matches) > 1:
        raise MalformedEnvelope(f"expected one sml block, found {len(matches)}")
    if not matches:
        if "```sml" in model_text:
            raise MalformedEnvelope("unterminated sml block")
        return ResponseEnvelope(
            mode=EnvelopeMode.ANSWER, reply_text=model_text.strip(), raw=model_text
        )
    match = matches[0]
    body = match.group(1)
    first, _, rest = body.partition("\n")
    header = first.strip()
    if not header.startswith("#mode:"):
        raise MalformedEnvelope(f"sml block must start with a #mode: header, got {header!r}")
    mode_word = header[len("#mode:") :].strip()
    mode = _HEADER_WORDS.get(mode_word)
    if mode is None:
        raise MalformedEnvelope(f"unknown mode {mode_word!r}")
    try:
        program = parse_text(rest)
    except SmlError as e:
        raise MalformedEnvelope(f"program does not parse: {e}") from e
    if mode == EnvelopeMode.MODIFY and not program.statements:
        raise MalformedEnvelope("modify mode requires at least one statement")
    if mode != EnvelopeMode.MODIFY and program.statements:
        raise MalformedEnvelope(f"{mode_word} mode must not carry statements")
    reply_text = (model_text[: match.start()] + model_text[match.end() :]).strip()
    return ResponseEnvelope(
        mode=mode,
        reply_text=reply_text,
        program=program if program.statements else None,
        raw=model_text,
    )


def render_envelope(
    mode: EnvelopeMode, reply_text: str, program: SmlProgram | None = None
) -> str:
    """Inverse of parse_envelope for tests and scripted backends."""
    body = f"#mode: {_MODE_HEADER[mode]}\n"
    if program is not None and program.statements:
        body += format_program(program)
    text = reply_text.rstrip()
    return f"{text}\n\n```sml\n{body}```\n"


def clarification_reply(reason: str | None = None) -> str:
    if reason:
        return f"{CLARIFY_TEMPLATE} {reason}"
    return CLARIFY_TEMPLATE


def ambiguity_reason(candidates) -> str:
    return f"Did you mean: {', '.join(candidates)}?"


def not_found_reason(ref: str) -> str:
    return f"No object named '{ref}' exists."


def out_of_scope_reply(task: str) -> str:
    return (
        f"Sorry, that request is out of scope: {task} is not supported "
        "in this environment."
    )


def error_recovery_reply(context: str | None = None) -> str:
    if context:
        return f"I apologize for the error. Let's try a different approach {context}."
    return ERROR_RECOVERY_TEMPLATE
