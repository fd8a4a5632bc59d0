#!/usr/bin/env python3
"""Walkthrough: a full wizard-of-oz session over the wire protocol.

Drives the real FastAPI app (in-process via the starlette test client, so
the demo needs no free port) through create -> pre -> chat with suggestion
pushes, a stance filter, a wizard selection with provenance -> forced close
-> post questionnaire -> corpus export. The same frames work over a live
`oumwoz serve` deployment.
"""

import json
import tempfile
from pathlib import Path

from starlette.testclient import TestClient

from oumwoz.argbase import base_from_tree, parse_tree
from oumwoz.responder import FEATURE_DIM, GateModel, ResponderConfig, UnigramModel
from oumwoz.retrieval import build_index
from oumwoz.service import BotRuntime, ChatService, SessionStore, TopicResources, create_app

TREE = """\
COVID-19 vaccination is worthwhile
\tPro: vaccines reduce severe illness
\tPro: herd immunity protects the vulnerable
\tCon: mandates limit personal freedom
\tCon: rushed approval eroded public trust
"""

base = base_from_tree(parse_tree(TREE, "indented_text"), topic_id="vaccination")
index = build_index(base)

tmp = tempfile.mkdtemp(prefix="oumwoz-demo-")
service = ChatService(
    store=SessionStore(Path(tmp)),
    topics={"vaccination": TopicResources(base, index)},
    bot=BotRuntime(
        gate=GateModel([0.0] * FEATURE_DIM, 0.0),
        free_model=UnigramModel.from_texts(["Why do you think that?"]),
        responder_config=ResponderConfig(
            hedges=["It could be argued that"],
            question_templates=["Why do you think that?"],
        ),
        chitchat_templates=["How was your weekend?"],
    ),
)
client = TestClient(create_app(service))

created = client.post("/sessions", json={"topic": "vaccination", "mode": "wizard"}).json()
sid = created["session_id"]
print(f"session {sid}")

client.post(
    f"/sessions/{sid}/pre",
    params={"token": created["participant_token"]},
    json={
        "stance": "vaccinated",
        "response": {"good_reasons": 3, "intellect": [4, 4, 4], "morality": [5, 5, 5]},
    },
)

wizard_url = f"/sessions/{sid}/chat?role=wizard&token={created['wizard_token']}"
participant_url = f"/sessions/{sid}/chat?role=participant&token={created['participant_token']}"

with client.websocket_connect(wizard_url) as wizard, \
        client.websocket_connect(participant_url) as participant:
    print("wizard sees:", wizard.receive_json()["type"])
    print("participant sees:", participant.receive_json()["type"])

    participant.send_json({"type": "utterance", "seq": 1,
                           "text": "I worry approval was rushed, do vaccines even reduce severe illness?"})
    participant.receive_json()  # ack
    push = wizard.receive_json()
    print(f"suggestions pushed: {len(push['items'])} items, top = "
          f"[{push['items'][0]['stance']}] {push['items'][0]['text']!r}")

    wizard.send_json({"type": "filter", "seq": 2, "stance": "pro"})
    refreshed = wizard.receive_json()
    print(f"after pro filter: {[item['stance'] for item in refreshed['items']]}")

    top = refreshed["items"][0]
    wizard.send_json({"type": "select", "seq": 3,
                      "argument_id": top["argument_id"], "rank": top["rank"]})
    wizard.receive_json()
    composed = f"I hear you, but {top['text']}."
    wizard.send_json({
        "type": "utterance", "seq": 4, "text": composed,
        "provenance": {"argument_id": top["argument_id"], "selection_rank": top["rank"],
                       "edited": True, "stance": top["stance"]},
    })
    wizard.receive_json()
    print("participant receives:", participant.receive_json()["text"])

    participant.send_json({"type": "close", "seq": 5, "force": True})
    participant.receive_json()

client.post(
    f"/sessions/{sid}/post",
    params={"token": created["participant_token"]},
    json={
        "response": {"good_reasons": 5, "intellect": [3, 4, 4], "morality": [4, 5, 5]},
        "experience": {"enjoyable": 6, "engaging": 6, "natural": 5, "clear": 6,
                       "persuasive": 4, "confusing": 2, "frustrating": 1,
                       "too_complicated": 2, "boring": 2},
    },
)

corpus = client.get("/corpus/export").text.strip().splitlines()
record = json.loads(corpus[0])
print(f"\ncorpus export: {len(corpus)} session(s); phases survived a round trip")
print(f"wizard turn provenance: {record['turns'][1]['provenance']}")
print(f"write-ahead log at {tmp}")
