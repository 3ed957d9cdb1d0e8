"""Command line entry points: an interactive REPL and the streaming server."""

from __future__ import annotations

from pathlib import Path

import click

from .gateway import (
    Backend,
    HttpBackend,
    ProviderConfig,
    RecordingBackend,
    ReplayBackend,
    ScriptedBackend,
)
from .harness import default_scripted_backend
from .scene import SceneHost
from .scenefile import BUNDLED_SCENES, load_bundled, load_scene
from .session import NavCommand, NoModificationYet, Session
from .ssg import build_ssg, serialize_ssg

NAV_KEYS = {
    "f": "move_forward",
    "b": "move_back",
    "l": "strafe_left",
    "r": "strafe_right",
}

HELP_TEXT = """Commands:
  :nav f|b|l|r [meters]   move forward/back or strafe left/right
  :ssg                    print the scene graph the model sees
  :verify                 describe the last applied modification
  :undo                   revert the last applied modification
  :help                   show this message
  :quit                   exit
Anything else is sent to the scene assistant."""


def _resolve_scene(spec: str):
    if spec in BUNDLED_SCENES:
        return load_bundled(spec)
    path = Path(spec)
    if path.exists():
        return load_scene(path)
    raise click.UsageError(
        f"--scene {spec!r} is neither a bundled scene id "
        f"({', '.join(BUNDLED_SCENES)}) nor an existing file"
    )


def _resolve_backend(kind: str, cassette: str | None, rules: str | None) -> Backend:
    if kind == "scripted":
        if rules:
            return ScriptedBackend.from_json(rules)
        return default_scripted_backend()
    if kind == "replay":
        if not cassette:
            raise click.UsageError("--backend replay requires --cassette")
        return ReplayBackend(cassette)
    backend: Backend = HttpBackend(ProviderConfig.from_env())
    if cassette:
        backend = RecordingBackend(backend, cassette)
    return backend


def _build_session(scene: str, backend: str, cassette: str | None,
                   rules: str | None, max_turns: int) -> Session:
    return Session(
        SceneHost(_resolve_scene(scene)),
        _resolve_backend(backend, cassette, rules),
        max_turns=max_turns,
    )


_SHARED_OPTIONS = [
    click.option("--scene", default="demo_room", show_default=True,
                 help="Bundled scene id or path to a scene file."),
    click.option("--backend", type=click.Choice(["scripted", "http", "replay"]),
                 default="scripted", show_default=True),
    click.option("--cassette", default=None, type=click.Path(),
                 help="Record http exchanges to, or replay them from, this file."),
    click.option("--rules", default=None, type=click.Path(exists=True),
                 help="Scripted backend rule file (JSON)."),
    click.option("--max-turns", default=20, show_default=True,
                 help="History turns kept for prompting."),
]


def _shared_options(fn):
    for option in reversed(_SHARED_OPTIONS):
        fn = option(fn)
    return fn


@click.group()
def main():
    """Talk to a 3D scene through an assistive conversational runtime."""


@main.command()
@_shared_options
@click.option("--transcript", default=None, type=click.Path(),
              help="Write the session transcript (JSON lines) here on exit.")
def repl(scene, backend, cassette, rules, max_turns, transcript):
    """Interactive session in the terminal."""
    session = _build_session(scene, backend, cassette, rules, max_turns)
    session.add_listener(lambda event: click.echo(f"[{event.kind}] {event.text}"))
    click.echo(f"Scene {session.host.snapshot().name!r} loaded. :help for commands.")
    while True:
        try:
            line = click.prompt("you", prompt_suffix="> ", default="",
                                show_default=False).strip()
        except (EOFError, KeyboardInterrupt, click.Abort):
            break
        if not line:
            continue
        if line.startswith(":"):
            if _meta_command(session, line):
                break
            continue
        session.handle_user_input(line)
    if transcript:
        session.save_transcript(transcript)
        click.echo(f"Transcript written to {transcript}")


def _meta_command(session: Session, line: str) -> bool:
    """Handle a :command line; returns True when the REPL should exit."""
    parts = line.split()
    command, args = parts[0], parts[1:]
    if command in (":quit", ":q", ":exit"):
        return True
    if command == ":help":
        click.echo(HELP_TEXT)
    elif command == ":ssg":
        click.echo(serialize_ssg(build_ssg(session.host.snapshot())))
    elif command == ":verify":
        try:
            click.echo(session.verify_last())
        except NoModificationYet:
            click.echo("Nothing to verify yet: no modification has been applied.")
    elif command == ":undo":
        try:
            session.undo_last()
        except NoModificationYet:
            click.echo("Nothing to undo yet: no modification has been applied.")
    elif command == ":nav":
        if not args or args[0] not in NAV_KEYS:
            click.echo("Usage: :nav f|b|l|r [meters]")
            return False
        try:
            magnitude = float(args[1]) if len(args) > 1 else 0.0
            session.navigate(NavCommand(NAV_KEYS[args[0]], magnitude))
        except ValueError as e:
            click.echo(str(e))
            return False
        p = session.host.snapshot().player
        click.echo(f"You are at ({p.position.x:g}, {p.position.y:g}, "
                   f"{p.position.z:g}) facing {p.yaw:g} degrees.")
    else:
        click.echo(f"Unknown command {command}. :help for commands.")
    return False


@main.command()
@_shared_options
@click.option("--listen", default="127.0.0.1:8787", show_default=True,
              help="host:port to serve on.")
def serve(scene, backend, cassette, rules, max_turns, listen):
    """Serve the session over HTTP + WebSocket for browser clients."""
    import uvicorn

    from .server import create_app

    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise click.UsageError(f"--listen {listen!r} must look like host:port")
    session = _build_session(scene, backend, cassette, rules, max_turns)
    app = create_app(session)
    click.echo(f"Serving {session.host.snapshot().name!r} on {listen}")
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")


if __name__ == "__main__":
    main()
