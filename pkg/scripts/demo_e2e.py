"""Walk one email through the whole reply workflow with the mock provider.

Usage: python3 scripts/demo_e2e.py
"""

from __future__ import annotations

import json

from fastapi.testclient import TestClient

from qareply.gateway import MockProvider
from qareply.service import SessionStore, create_app

EMAIL = {
    "subject": "Team offsite",
    "sender_name": "Ann Chen",
    "sender_address": "ann@example.com",
    "body": (
        "Hi Bob. We are planning the offsite for October 24th. "
        "Can you attend the full day? "
        "Please tell us your dietary restrictions. Thanks!"
    ),
}


def main() -> None:
    client = TestClient(create_app(MockProvider(), SessionStore()))

    r = client.post("/sessions", json={
        "email": EMAIL,
        "user": {"name": "Bob Doe", "address": "bob@example.com", "locale": "en"},
    })
    data = r.json()
    sid = data["session_id"]
    questions = data["question_set"]["questions"]
    print(f"session {sid[:8]}…  {len(questions)} questions\n")
    for q in questions:
        span = q["anchor"]
        quoted = EMAIL["body"][span["start"]:span["start"] + span["length"]]
        print(f"  Q{q['id']}: {q['question']}")
        print(f"       anchor [{span['start']}:{span['start'] + span['length']}] = {quoted!r}")

    answers = [
        {"question_id": questions[0]["id"], "selected": [0]},
        {"question_id": questions[1]["id"], "custom_options": ["vegetarian, no nuts"]},
    ]
    client.post(f"/sessions/{sid}/answers", json={"answers": answers})
    client.post(f"/sessions/{sid}/preferences",
                json={"formality": "casual", "tone": "friendly",
                      "relationship": "my colleague"})

    draft = client.post(f"/sessions/{sid}/draft").json()
    print(f"\ndraft #{draft['generation_index']} (digest {draft['prompt_digest'][:12]}…):\n")
    print(draft["text"])

    record = client.post(f"/sessions/{sid}/finalize",
                         json={"final_text": draft["text"]}).json()
    print("\nmetrics:", json.dumps(record, indent=2))


if __name__ == "__main__":
    main()
