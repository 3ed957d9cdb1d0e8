"""Record a real wire stream for the client state-sync tests.

Drives the backend's websocket server with the deterministic scripted
backend and captures everything an observer connection receives, plus
the final authoritative snapshot. Regenerate with:

    python3 frontend/scripts/record_fixture.py
"""

import json
from pathlib import Path

from starlette.testclient import TestClient

from scenetalk.harness import default_scripted_backend, deterministic_clock
from scenetalk.scene import SceneHost
from scenetalk.scenefile import load_bundled
from scenetalk.server import create_app
from scenetalk.session import Session

OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures" / "wire-stream.json"

# (kind, payload, observer messages expected in response)
STEPS = [
    ("user_input", "What is the color of the cube?", 1),          # reply
    ("user_input", "Make the color of the cube the same as the sphere.", 2),
    ("nav", {"kind": "move_forward", "magnitude": 0.5}, 1),        # pseudo-delta
    ("nav", {"kind": "pan_right", "magnitude": 90.0}, 1),
    ("user_input", "Can you make it smaller?", 2),                 # reply + delta
    ("user_input", "Move speaker one much closer to me", 2),
    ("user_input", "Make the sunlight brighter.", 2),
    ("user_input", "Mute all speakers", 2),                        # two-entry delta
    ("user_input", "Paint the torch green", 1),                    # guardrail: reply only
    ("user_input", "Select speaker one.", 2),                      # creates highlight marker
    ("snapshot", None, 0),                                         # observer resyncs
]


def main() -> None:
    session = Session(
        SceneHost(load_bundled("demo_room")),
        default_scripted_backend(),
        clock=deterministic_clock(),
    )
    app = create_app(session)
    client = TestClient(app)
    received = []
    with client.websocket_connect("/stream?role=observer") as observer:
        with client.websocket_connect("/stream?role=driver") as driver:
            received.append(observer.receive_json())
            driver.receive_json()
            for kind, payload, expected in STEPS:
                if kind == "user_input":
                    driver.send_text(json.dumps({"type": "user_input", "text": payload}))
                elif kind == "nav":
                    driver.send_text(json.dumps({"type": "nav", **payload}))
                else:
                    observer.send_text(json.dumps({"type": "snapshot"}))
                    received.append(observer.receive_json())
                    continue
                for _ in range(expected):
                    received.append(observer.receive_json())
    final = client.get("/snapshot").json()
    OUT.write_text(json.dumps(
        {"stream": received, "final_snapshot": final},
        indent=2, ensure_ascii=False,
    ) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(received)} messages)")


if __name__ == "__main__":
    main()
