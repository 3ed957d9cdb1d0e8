"""Prompt assembly and reply-envelope parsing."""

import pytest
from hypothesis import given, strategies as st

from scenetalk.prompt import (
    CLARIFY_TEMPLATE,
    ConversationHistory,
    ERROR_RECOVERY_TEMPLATE,
    EnvelopeMode,
    InstructionSet,
    MalformedEnvelope,
    ambiguity_reason,
    build_prompt,
    clarification_reply,
    error_recovery_reply,
    grammar_summary,
    not_found_reason,
    out_of_scope_reply,
    parse_envelope,
    render_envelope,
    system_message,
)
from scenetalk.sml import Command, parse_text

from sml_gen import programs


@pytest.fixture(scope="module")
def instructions():
    return InstructionSet.load_default()


def test_instruction_files_load(instructions):
    assert len(instructions.accessibility_rules) > 10
    assert len(instructions.error_prevention_rules) == 3
    assert instructions.out_of_scope_tasks == (
        "zoom/magnifier",
        "edge enhancement",
        "color change on textured materials",
        "object deletion",
    )


def test_six_section_headers(instructions):
    headers = instructions.section_headers()
    topics = ["colors", "object and text size", "spatial relationship",
              "scene brightness", "audio sources", "description brevity"]
    assert len(headers) == 6
    for topic, header in zip(topics, headers):
        assert topic in header


def test_extra_out_of_scope_tasks():
    augmented = InstructionSet.load_default(extra_out_of_scope=("teleportation",))
    assert augmented.out_of_scope_tasks[-1] == "teleportation"
    assert len(augmented.out_of_scope_tasks) == 5


def test_system_message_contains_meter_sentence(instructions):
    assert "each unit is a meter" in system_message(instructions)


def test_system_message_contains_every_rule(instructions):
    text = system_message(instructions)
    for rule in instructions.accessibility_rules + instructions.error_prevention_rules:
        assert rule in text


def test_grammar_summary_lists_all_commands_and_no_delete():
    summary = grammar_summary()
    for cmd in Command:
        assert cmd.value in summary
    assert "delete" not in summary.replace("deletes an object", "")
    assert "no command that deletes" in summary


def test_build_prompt_first_turn(instructions):
    messages = build_prompt(instructions, ConversationHistory(), "ssg here", "hello")
    assert len(messages) == 2
    assert messages[0]["role"] == "system"
    assert messages[1]["role"] == "user"
    assert "ssg here" in messages[1]["content"]
    assert "hello" in messages[1]["content"]


def test_build_prompt_rejects_empty_input(instructions):
    with pytest.raises(ValueError):
        build_prompt(instructions, ConversationHistory(), "ssg", "")


def test_history_truncation_keeps_recent_exchanges(instructions):
    history = ConversationHistory(max_turns=20)
    for i in range(50):
        history.add("user", f"question {i}", float(i))
        history.add("assistant", f"answer {i}", float(i) + 0.5)
    kept = history.truncated()
    assert len(kept) == 40
    assert kept[0].text == "question 30"
    assert kept[-1].text == "answer 49"
    messages = build_prompt(instructions, history, "ssg", "latest")
    assert len(messages) == 42
    assert messages[1]["content"] == "question 30"


def test_budget_drops_oldest_first(instructions):
    history = ConversationHistory(max_turns=50)
    for i in range(10):
        history.add("user", f"q{i} " + "x" * 400, float(i))
        history.add("assistant", f"a{i} " + "y" * 400, float(i) + 0.5)
    messages = build_prompt(instructions, history, "ssg", "latest", token_budget=2000)
    assert messages[0]["role"] == "system"
    assert messages[-1]["role"] == "user"
    middle = messages[1:-1]
    assert len(middle) < 20
    if middle:
        assert middle[-1]["content"].startswith("a9")


def test_parse_envelope_modify():
    text = 'Making the sign bigger.\n\n```sml\n#mode: modify\nscale-by "Park Sign" 2.0\n```\n'
    envelope = parse_envelope(text)
    assert envelope.mode == EnvelopeMode.MODIFY
    assert envelope.reply_text == "Making the sign bigger."
    assert len(envelope.program.statements) == 1
    assert envelope.program.statements[0].command == Command.SCALE_BY


def test_parse_envelope_plain_text_is_answer():
    envelope = parse_envelope("The bench is red.")
    assert envelope.mode == EnvelopeMode.ANSWER
    assert envelope.reply_text == "The bench is red."
    assert envelope.program is None


def test_parse_envelope_clarify_empty_program():
    text = "Which cat do you mean?\n\n```sml\n#mode: clarify\n```\n"
    envelope = parse_envelope(text)
    assert envelope.mode == EnvelopeMode.CLARIFY
    assert envelope.program is None


def test_parse_envelope_hyphenated_modes():
    for word, mode in (("out-of-scope", EnvelopeMode.OUT_OF_SCOPE),
                       ("error-recovery", EnvelopeMode.ERROR_RECOVERY)):
        envelope = parse_envelope(f"reply\n```sml\n#mode: {word}\n```")
        assert envelope.mode == mode


def test_parse_envelope_rejections():
    with pytest.raises(MalformedEnvelope):
        parse_envelope("a\n```sml\n#mode: modify\nmute \"x\"\n```\nb\n```sml\n#mode: answer\n```")
    with pytest.raises(MalformedEnvelope):
        parse_envelope("```sml\n#mode: wizardry\n```")
    with pytest.raises(MalformedEnvelope):
        parse_envelope('```sml\n#mode: modify\nexplode "cube"\n```')
    with pytest.raises(MalformedEnvelope):
        parse_envelope("```sml\n#mode: modify\n```")
    with pytest.raises(MalformedEnvelope):
        parse_envelope('```sml\n#mode: answer\nmute "x"\n```')
    with pytest.raises(MalformedEnvelope):
        parse_envelope("```sml\n#mode: modify\nmute")
    with pytest.raises(MalformedEnvelope):
        parse_envelope("```sml\nmute \"x\"\n```")


@given(
    st.sampled_from(list(EnvelopeMode)),
    st.text(min_size=1, max_size=80).filter(lambda s: "```" not in s and s.strip()),
    programs(max_size=3),
)
def test_render_parse_identity(mode, reply, prog):
    if mode == EnvelopeMode.MODIFY and not prog.statements:
        return
    program = prog if mode == EnvelopeMode.MODIFY else None
    envelope = parse_envelope(render_envelope(mode, reply, program))
    assert envelope.mode == mode
    assert envelope.reply_text == reply.strip()
    if mode == EnvelopeMode.MODIFY:
        assert envelope.program == program
    else:
        assert envelope.program is None


def test_templates_verbatim():
    assert clarification_reply() == (
        "It seems like your request is not clear. Could you please provide "
        "more details or clarify what you would like to achieve?"
    )
    assert clarification_reply() == CLARIFY_TEMPLATE
    assert error_recovery_reply() == "I apologize for the error. Let's try a different approach."
    assert error_recovery_reply() == ERROR_RECOVERY_TEMPLATE


def test_clarification_suffixes():
    assert clarification_reply(ambiguity_reason(["White Cat", "Black Cat"])) == (
        CLARIFY_TEMPLATE + " Did you mean: White Cat, Black Cat?"
    )
    assert clarification_reply(not_found_reason("dragon")) == (
        CLARIFY_TEMPLATE + " No object named 'dragon' exists."
    )


def test_out_of_scope_reply_names_capability():
    text = out_of_scope_reply("object deletion")
    assert "object deletion" in text
    assert "out of scope" in text
    magnifier = out_of_scope_reply("zoom/magnifier")
    assert "zoom/magnifier" in magnifier


def test_error_recovery_with_context():
    text = error_recovery_reply("to stop the apple from moving")
    assert text == (
        "I apologize for the error. Let's try a different approach "
        "to stop the apple from moving."
    )
