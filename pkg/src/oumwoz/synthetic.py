"""Deterministic synthetic log corpus with planted, hand-checkable statistics.

The generator builds full session logs through the real session API, so the
records are schema-faithful. Every aggregate the analytics reports compute
is planted as an exact integer design:

* 301 wizard dialogues; 207 contain a search action, 216 a pro/con stance
  filter; 1368 agent turns of which 903 (3 per dialogue) use an argument;
  676 argument turns edited, 191 selected from rank <= 10, 428 pro / 475 con.
  Resulting action percentages: edit 74.86, search 68.77, filter 71.76,
  top-10 21.15, pro 47.40, con 52.60, argument use 66.01.
* 240 of the wizard dialogues carry post questionnaires. Their good-reasons
  changes are 126 zeros, 51 at +1, 35 at +2, 19 at -1 and 9 at -2, printing
  as 52.5 / 35.8 (1.41) / 11.7 (-1.32) with overall exactly 0.35.
* 49 control-bot and 150 argu-bot dialogues with their own planted score
  and rating distributions (control good-reasons overall 4/49, argu 0.22).
* Wizard experience ratings average 6.05 for "enjoyable" (sum 1452 over
  240) and analogous planted means for the other metrics.
* Positive-lexicon and subjunctive marker frequencies are noisy monotone
  functions of the good-reasons score, planted so their Spearman rho with
  the score lands near +0.18 / -0.18.

Everything is a pure function of the seed.
"""

from __future__ import annotations

import random

from .oum import ExperienceRatings, QuestionnaireResponse
from .session import create_session

WIZARD_TOTAL = 301
WIZARD_SCORED = 240
CONTROL_TOTAL = 49
ARGU_TOTAL = 150

ARG_TURNS_PER_DIALOGUE = 3
EXTRA_AGENT_TURN_DIALOGUES = 164  # 137 dialogues get 4 agent turns, 164 get 5
EDITED_TOTAL = 676
TOP10_TOTAL = 191
PRO_TOTAL = 428
SEARCH_DIALOGUES = 207
FILTER_DIALOGUES = 216

# good-reasons change -> (pre, post) rating
_GR_RATINGS = {2: (3, 5), 1: (4, 5), 0: (4, 4), -1: (4, 3), -2: (5, 3)}

# per-category change (in thirds) -> per-question differences pre - post
_THIRDS_DIFFS = {
    0: (0, 0, 0),
    1: (1, 0, 0), 2: (1, 1, 0), 3: (1, 1, 1), 4: (2, 1, 1), 5: (2, 2, 1), 6: (2, 2, 2),
}

GR_WIZARD = {0: 126, 1: 51, 2: 35, -1: 19, -2: 9}
GR_CONTROL = {0: 39, 1: 4, 2: 2, -1: 4}
GR_ARGU = {0: 98, 1: 18, 2: 18, -1: 11, -2: 5}

# thirds -> count; e.g. Fraction(1,3) change appears 10 times
MORALITY_WIZARD = {0: 135, 1: 10, 2: 10, 3: 20, 4: 10, 5: 5, 6: 6,
                   -1: 20, -2: 10, -3: 10, -4: 4}
INTELLECT_WIZARD = {0: 129, 1: 10, 2: 10, 3: 25, 4: 10, 5: 10, 6: 5,
                    -1: 15, -2: 10, -3: 12, -4: 4}
MORALITY_CONTROL = {0: 34, 1: 3, 2: 3, 3: 3, 4: 1, -1: 2, -2: 1, -3: 2}
INTELLECT_CONTROL = {0: 31, 1: 4, 2: 4, 3: 4, 4: 1, -1: 2, -2: 1, -3: 2}
MORALITY_ARGU = {0: 96, 1: 10, 2: 8, 3: 10, -1: 10, -2: 6, -3: 10}
INTELLECT_ARGU = {0: 83, 1: 12, 2: 10, 3: 19, -1: 10, -2: 6, -3: 10}

EXPERIENCE_TARGETS = {
    "wizard": {
        "enjoyable": 6.05, "engaging": 6.02, "natural": 5.77, "clear": 6.32,
        "persuasive": 4.92, "confusing": 2.33, "frustrating": 1.98,
        "too_complicated": 2.11, "boring": 2.15,
    },
    "argu_bot": {
        "enjoyable": 5.13, "engaging": 5.09, "natural": 3.81, "clear": 5.28,
        "persuasive": 4.33, "confusing": 3.58, "frustrating": 3.09,
        "too_complicated": 2.93, "boring": 3.27,
        "consistent": 4.56, "knowledgeable": 5.32,
    },
    "control_bot": {
        "enjoyable": 4.24, "engaging": 4.02, "natural": 2.96, "clear": 3.92,
        "persuasive": 3.16, "confusing": 4.82, "frustrating": 4.27,
        "too_complicated": 2.47, "boring": 4.08,
        "consistent": 3.59, "knowledgeable": 3.06,
    },
}

# Correlation planting: marker insertions per dialogue follow
# round(mu + sigma*gauss + beta*score), clipped at zero. With seed 7 these
# land the planted Spearman rho at +0.178 / -0.186.
_POS_MARKER = ("good", 10.0, 5.2, 0.82)
_SUB_MARKER = ("would you", 8.0, 4.2, -0.76)

_ARGUMENT_SENTENCES = [
    "a plant based diet lowers the strain on farmland",
    "animal farming drives a large share of emissions",
    "nutrition needs differ from person to person",
    "local sourcing can matter more than diet choice",
    "food traditions carry real cultural weight",
    "industrial farming treats animals as commodities",
]

_PARTICIPANT_LINES = [
    "I mostly eat what my family cooks",
    "that seems overstated to me",
    "I had not considered that angle",
    "where did you read that",
    "I suppose it depends on the person",
    "fair enough, tell me more",
]

_FREE_LINES = [
    "Why do you feel that way?",
    "What makes you say that?",
    "How did you come to that view?",
]

_SEARCH_TERM_POOL = [["health"], ["protein sources"], ["environment"], ["animal welfare"]]


def _expand(count_map) -> list:
    values = []
    for value, count in count_map.items():
        values.extend([value] * count)
    return values


def _questionnaires(gr, morality_thirds, intellect_thirds):
    gr_pre, gr_post = _GR_RATINGS[gr]
    signs = 1 if morality_thirds >= 0 else -1
    m_diffs = tuple(signs * d for d in _THIRDS_DIFFS[abs(morality_thirds)])
    signs = 1 if intellect_thirds >= 0 else -1
    i_diffs = tuple(signs * d for d in _THIRDS_DIFFS[abs(intellect_thirds)])
    pre = QuestionnaireResponse(
        good_reasons=gr_pre, intellect=(4, 4, 4), morality=(5, 5, 5)
    )
    post = QuestionnaireResponse(
        good_reasons=gr_post,
        intellect=tuple(4 - d for d in i_diffs),
        morality=tuple(5 - d for d in m_diffs),
    )
    return pre, post


def _experience_values(mode: str, n: int, rng: random.Random) -> list[dict]:
    """Per-session rating dicts whose per-metric means hit the targets."""
    per_metric: dict[str, list[int]] = {}
    for metric, target in EXPERIENCE_TARGETS[mode].items():
        floor = int(target)
        high = round((target - floor) * n)
        values = [floor] * (n - high) + [floor + 1] * high
        rng.shuffle(values)
        per_metric[metric] = values
    return [
        {metric: values[i] for metric, values in per_metric.items()}
        for i in range(n)
    ]


def _marker_insertions(rng: random.Random, score: int, spec) -> int:
    _, mu, sigma, beta = spec
    return max(0, round(mu + sigma * rng.gauss(0, 1) + beta * score))


def _logical_clock(start: float, step: float = 45.0):
    state = {"t": start}

    def tick():
        state["t"] += step
        return state["t"]

    return tick


def _build_wizard_session(idx, plan, rng) -> dict:
    session = create_session(
        "veganism", "wizard",
        clock=_logical_clock(1_000_000_000.0 + idx * 10_000.0),
        session_id=f"wiz-{idx:04d}",
    )
    session.submit_pre(rng.choice(["vegan", "non_vegan"]), plan["pre"])

    for terms in plan["searches"]:
        session.record_action("search", terms=terms)
    for stance in plan["filters"]:
        session.record_action("stance_filter", stance=stance)

    # Spread marker insertions across the agent turns (the per-sentence
    # frequency only depends on the totals).
    n_agent = plan["agent_turns"]
    arg_slots = plan["arg_slots"]
    pos_base, pos_extra = divmod(plan["pos_markers"], n_agent)
    sub_base, sub_extra = divmod(plan["sub_markers"], n_agent)

    arg_turn_positions = set(rng.sample(range(n_agent), len(arg_slots)))
    slot_iter = iter(arg_slots)
    for position in range(n_agent):
        pos_here = pos_base + (1 if position < pos_extra else 0)
        sub_here = sub_base + (1 if position < sub_extra else 0)
        suffix = ""
        if pos_here:
            suffix += " " + " ".join(["good"] * pos_here)
        if sub_here:
            suffix += " " + " ".join(["would you say"] * sub_here)
        if position in arg_turn_positions:
            edited, rank, stance = next(slot_iter)
            argument_id = f"veg-{rng.randrange(1, 400)}"
            session.record_action("select", argument_id=argument_id, rank=rank)
            text = f"Some argue that {rng.choice(_ARGUMENT_SENTENCES)}{suffix}."
            session.post_agent_turn(
                text,
                {
                    "mode": "wizard",
                    "argument_id": argument_id,
                    "selection_rank": rank,
                    "edited": edited,
                    "stance": stance,
                },
            )
        else:
            text = f"{rng.choice(_FREE_LINES)[:-1]}{suffix}?"
            session.post_agent_turn(text, {"mode": "wizard"})
        session.post_participant_turn(rng.choice(_PARTICIPANT_LINES))

    session.close(force=True)
    if plan["post"] is not None:
        session.submit_post(plan["post"], plan["experience"])
    return session.to_export()


def _build_bot_session(idx, mode, pre, post, experience, rng) -> dict:
    session = create_session(
        "veganism", mode,
        clock=_logical_clock(2_000_000_000.0 + idx * 10_000.0),
        session_id=f"{mode[:4]}-{idx:04d}",
    )
    session.submit_pre(rng.choice(["vegan", "non_vegan"]), pre)
    for i in range(2):
        if mode == "argu_bot" and i == 1:
            session.post_agent_turn(
                f"It could be argued that {rng.choice(_ARGUMENT_SENTENCES)}.",
                {"mode": "argu_bot", "argument_id": f"veg-{rng.randrange(1, 400)}",
                 "edited": False, "pgen": 0.4, "stance": rng.choice(["pro", "con"])},
            )
        elif mode == "argu_bot":
            session.post_agent_turn("Hello! What do you think about veganism?", {"mode": "argu_bot", "pgen": 0.8})
        else:
            session.post_agent_turn("Hello! How has your week been?", {"mode": "control"})
        session.post_participant_turn(rng.choice(_PARTICIPANT_LINES))
    session.close(force=True)
    session.submit_post(post, experience)
    return session.to_export()


def build_replica_corpus(seed: int = 7) -> list[dict]:
    rng = random.Random(seed)

    # --- wizard score plans -------------------------------------------------
    gr_values = _expand(GR_WIZARD)
    morality_values = _expand(MORALITY_WIZARD)
    intellect_values = _expand(INTELLECT_WIZARD)
    rng.shuffle(gr_values)
    rng.shuffle(morality_values)
    rng.shuffle(intellect_values)
    experiences = _experience_values("wizard", WIZARD_SCORED, rng)

    # --- argument-turn attribute slots, exact totals ------------------------
    n_arg = WIZARD_TOTAL * ARG_TURNS_PER_DIALOGUE
    edited_flags = [True] * EDITED_TOTAL + [False] * (n_arg - EDITED_TOTAL)
    ranks = [1 + i % 10 for i in range(TOP10_TOTAL)] + [
        11 + i % 40 for i in range(n_arg - TOP10_TOTAL)
    ]
    stances = ["pro"] * PRO_TOTAL + ["con"] * (n_arg - PRO_TOTAL)
    rng.shuffle(edited_flags)
    rng.shuffle(ranks)
    rng.shuffle(stances)
    slots = list(zip(edited_flags, ranks, stances))

    extra_turn = [True] * EXTRA_AGENT_TURN_DIALOGUES + [False] * (
        WIZARD_TOTAL - EXTRA_AGENT_TURN_DIALOGUES
    )
    has_search = [True] * SEARCH_DIALOGUES + [False] * (WIZARD_TOTAL - SEARCH_DIALOGUES)
    has_filter = [True] * FILTER_DIALOGUES + [False] * (WIZARD_TOTAL - FILTER_DIALOGUES)
    scored = [True] * WIZARD_SCORED + [False] * (WIZARD_TOTAL - WIZARD_SCORED)
    rng.shuffle(extra_turn)
    rng.shuffle(has_search)
    rng.shuffle(has_filter)
    rng.shuffle(scored)

    corpus = []
    scored_i = 0
    for idx in range(WIZARD_TOTAL):
        if scored[idx]:
            gr = gr_values[scored_i]
            pre, post = _questionnaires(gr, morality_values[scored_i], intellect_values[scored_i])
            experience = ExperienceRatings(experiences[scored_i])
            scored_i += 1
        else:
            gr = 0
            pre = QuestionnaireResponse(good_reasons=4, intellect=(4, 4, 4), morality=(5, 5, 5))
            post = None
            experience = None
        plan = {
            "pre": pre,
            "post": post,
            "experience": experience,
            "agent_turns": 5 if extra_turn[idx] else 4,
            "arg_slots": [slots[idx * ARG_TURNS_PER_DIALOGUE + k] for k in range(ARG_TURNS_PER_DIALOGUE)],
            "searches": [rng.choice(_SEARCH_TERM_POOL)] if has_search[idx] else [],
            "filters": [rng.choice(["pro", "con"])] if has_filter[idx] else [],
            "pos_markers": _marker_insertions(rng, gr, _POS_MARKER),
            "sub_markers": _marker_insertions(rng, gr, _SUB_MARKER),
        }
        corpus.append(_build_wizard_session(idx, plan, rng))

    # --- bots ---------------------------------------------------------------
    for mode, total, gr_map, mor_map, int_map in (
        ("control_bot", CONTROL_TOTAL, GR_CONTROL, MORALITY_CONTROL, INTELLECT_CONTROL),
        ("argu_bot", ARGU_TOTAL, GR_ARGU, MORALITY_ARGU, INTELLECT_ARGU),
    ):
        gr_values = _expand(gr_map)
        morality_values = _expand(mor_map)
        intellect_values = _expand(int_map)
        rng.shuffle(gr_values)
        rng.shuffle(morality_values)
        rng.shuffle(intellect_values)
        experiences = _experience_values(mode, total, rng)
        for idx in range(total):
            pre, post = _questionnaires(gr_values[idx], morality_values[idx], intellect_values[idx])
            corpus.append(
                _build_bot_session(idx, mode, pre, post, ExperienceRatings(experiences[idx]), rng)
            )
    return corpus
