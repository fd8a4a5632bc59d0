"""A hand-designed 5-dialogue wizard corpus with hand-computable statistics.

Argument turns across the corpus: 10 (of 14 agent turns), 7 edited,
6 selected from the top 10, 5 pro / 5 con. Dialogues with a search action:
2 of 5; with a pro/con stance filter: 2 of 5 (the fifth only toggles the
filter off). Dialogues 1-4 carry post questionnaires; dialogue 5 does not.

Expected report values (computed by hand from the counts above):
  actions: edit 70.00, search 40.00, filter 40.00, top10 60.00,
           pro 50.00, con 50.00, arg_use 71.43
  oum (n=4): good_reasons [+2, 0, -1, +2], morality [+1, 0, -1/3, +1],
             intellect [+1/3, 0, -1, +1]
  experience means: 5.50 for every metric (ratings 6, 5, 4, 7)
"""

from oumwoz.oum import ExperienceRatings, QuestionnaireResponse
from oumwoz.session import create_session

_METRICS = (
    "enjoyable", "engaging", "natural", "clear", "persuasive",
    "confusing", "frustrating", "too_complicated", "boring",
)


def _clock(start):
    state = {"t": float(start)}

    def tick():
        state["t"] += 60.0
        return state["t"]

    return tick


def _q(gr, intellect, morality):
    return QuestionnaireResponse(good_reasons=gr, intellect=intellect, morality=morality)


def _experience(value):
    return ExperienceRatings({m: value for m in _METRICS})


def _arg(argument_id, rank, edited, stance):
    return {
        "mode": "wizard",
        "argument_id": argument_id,
        "selection_rank": rank,
        "edited": edited,
        "stance": stance,
    }


def _dialogue(session_id, start, agent_turns, actions, pre, post, exp):
    session = create_session(
        "veganism", "wizard", clock=_clock(start), session_id=session_id
    )
    session.submit_pre("vegan", pre)
    for kind, payload in actions:
        session.record_action(kind, **payload)
    for i, provenance in enumerate(agent_turns):
        text = (
            "Why do you think that?"
            if provenance is None or "argument_id" not in provenance
            else f"Some people argue point {provenance['argument_id']}."
        )
        session.post_agent_turn(text, provenance)
        session.post_participant_turn(f"participant reply {i}")
    session.close(force=True)
    if post is not None:
        session.submit_post(post, exp)
    return session.to_export()


def build_five_dialogues():
    d1 = _dialogue(
        "fx1", 1000,
        [
            _arg("arg1", 3, True, "pro"),
            _arg("arg2", 12, False, "con"),
            {"mode": "wizard"},
            _arg("arg3", 1, True, "pro"),
        ],
        [
            ("search", {"terms": ["health"]}),
            ("stance_filter", {"stance": "pro"}),
            ("select", {"argument_id": "arg1", "rank": 3}),
        ],
        _q(3, (4, 4, 4), (6, 6, 6)),
        _q(5, (3, 4, 4), (4, 5, 6)),
        _experience(6),
    )
    d2 = _dialogue(
        "fx2", 2000,
        [
            _arg("argA", 5, True, "con"),
            {"mode": "wizard"},
            _arg("argB", 15, False, "con"),
        ],
        [("stance_filter", {"stance": "con"})],
        _q(4, (5, 5, 5), (3, 3, 3)),
        _q(4, (5, 5, 5), (3, 3, 3)),
        _experience(5),
    )
    d3 = _dialogue(
        "fx3", 3000,
        [
            {"mode": "wizard"},
            _arg("argC", 2, True, "pro"),
        ],
        [("search", {"terms": ["environment", "animal welfare"]})],
        _q(5, (2, 2, 2), (4, 4, 4)),
        _q(4, (3, 3, 3), (5, 4, 4)),
        _experience(4),
    )
    d4 = _dialogue(
        "fx4", 4000,
        [
            _arg("argD", 1, True, "pro"),
            _arg("argE", 8, True, "con"),
            _arg("argF", 30, False, "con"),
        ],
        [],
        _q(2, (6, 5, 4), (7, 7, 7)),
        _q(4, (4, 4, 4), (6, 6, 6)),
        _experience(7),
    )
    d5 = _dialogue(
        "fx5", 5000,
        [
            _arg("argG", 11, True, "pro"),
            {"mode": "wizard"},
        ],
        [("stance_filter", {"stance": "off"})],
        _q(4, (4, 4, 4), (4, 4, 4)),
        None,
        None,
    )
    return [d1, d2, d3, d4, d5]
