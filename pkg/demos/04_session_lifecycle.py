#!/usr/bin/env python3
"""Walkthrough: one dialogue session from creation to exported log.

Phases move strictly created -> pre_done -> chatting -> closed -> post_done.
Turns alternate, the close respects the minimum chat duration, and the
export is a single JSON record that re-imports losslessly.
"""

import json

from oumwoz.errors import TooEarly
from oumwoz.oum import ExperienceRatings, QuestionnaireResponse, compute_oum_scores
from oumwoz.session import create_session, import_session

# A fake clock stepping 2 minutes per event keeps the demo instant.
state = {"t": 0.0}


def clock():
    state["t"] += 120.0
    return state["t"]


session = create_session("veganism", "wizard", duration_bounds=(900, 1200), clock=clock)
print(f"created {session.session_id!r}, phase {session.phase}")

pre = QuestionnaireResponse(good_reasons=3, intellect=(5, 5, 4), morality=(5, 6, 5))
session.submit_pre("non_vegan", pre)
print(f"pre questionnaire in, phase {session.phase}")

session.post_agent_turn("Hello! What do you make of veganism?", {"mode": "wizard"})
session.record_action("search", terms=["emissions"])
session.record_action("select", argument_id="a1", rank=4)
session.post_participant_turn("honestly I never thought much about it")
session.post_agent_turn(
    "Some say a plant based diet is the single biggest personal emissions cut.",
    {"mode": "wizard", "argument_id": "a1", "selection_rank": 4, "edited": True, "stance": "pro"},
)
session.post_participant_turn("that is a bigger effect than I expected")

try:
    session.close()
except TooEarly as err:
    print(f"close refused: {err}")

# a few more exchanges pass the 15-minute minimum
session.post_agent_turn("Does that change how you see vegans' reasons?", {"mode": "wizard"})
session.post_participant_turn("a little, yes")
session.close()
print(f"closed after {session.elapsed_seconds() / 60:.0f} minutes, forced={session.forced_close}")

post = QuestionnaireResponse(good_reasons=5, intellect=(4, 4, 4), morality=(5, 5, 5))
session.submit_post(post, ExperienceRatings({
    "enjoyable": 6, "engaging": 6, "natural": 5, "clear": 6, "persuasive": 5,
    "confusing": 2, "frustrating": 1, "too_complicated": 2, "boring": 2,
}))
print(f"post questionnaire in, phase {session.phase}")

scores = compute_oum_scores(pre, post)
print(f"OUM change: good_reasons {scores.good_reasons:+.2f}, "
      f"intellect {scores.intellect:+.2f}, morality {scores.morality:+.2f}")

record = session.to_export()
print(f"\nexport has {len(record['turns'])} turns / {len(record['actions'])} actions")
print(f"round-trips: {import_session(record) == session}")
print("\nfirst exported turn:")
print(json.dumps(record["turns"][0], indent=2))
