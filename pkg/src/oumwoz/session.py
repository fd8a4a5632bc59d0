"""Dialogue lifecycle: phases, alternating turns, questionnaires, export.

Phase order is fixed: created -> pre_done -> chatting -> closed -> post_done.
Posting the first turn is what moves pre_done to chatting; closing requires
the minimum chat duration unless forced. Sessions that never get a post
questionnaire stay at closed and are excluded from OUM analytics downstream.
"""

from __future__ import annotations

import datetime as _dt
import time
import uuid
from dataclasses import dataclass, field
from typing import Callable

from .errors import (
    AlternationViolation,
    TooEarly,
    ValidationError,
    WrongPhase,
)
from .oum import ExperienceRatings, QuestionnaireResponse

LOG_SCHEMA_VERSION = 1

TOPICS = ("veganism", "brexit", "vaccination")
MODES = ("wizard", "argu_bot", "control_bot")
PHASES = ("created", "pre_done", "chatting", "closed", "post_done")

PARTICIPANT = "participant"
AGENT = "agent"

TOPIC_STANCES = {
    "veganism": ("vegan", "non_vegan"),
    "brexit": ("leave", "remain"),
    "vaccination": ("vaccinated", "unvaccinated"),
}

# Chat-time windows in seconds: wizards get 15-20 minutes, bots 10-15.
DEFAULT_DURATION_BOUNDS = {
    "wizard": (900, 1200),
    "argu_bot": (600, 900),
    "control_bot": (600, 900),
}

ACTION_KINDS = ("search", "stance_filter", "select", "edit_commit", "free_compose")

_PROVENANCE_KEYS = {"argument_id", "selection_rank", "edited", "pgen", "mode", "stance"}


def _iso(ts: float) -> str:
    return _dt.datetime.fromtimestamp(round(ts, 6), tz=_dt.timezone.utc).isoformat()


def _from_iso(s: str) -> float:
    return _dt.datetime.fromisoformat(s).timestamp()


@dataclass
class Turn:
    index: int
    speaker: str
    text: str
    timestamp: str  # ISO-8601
    provenance: dict | None = None

    def __post_init__(self):
        if self.speaker not in (PARTICIPANT, AGENT):
            raise ValidationError(f"unknown speaker {self.speaker!r}")
        if not self.text or not self.text.strip():
            raise ValidationError("turn text must be non-empty")
        if self.provenance is not None:
            if self.speaker != AGENT:
                raise ValidationError("only agent turns carry provenance")
            unknown = set(self.provenance) - _PROVENANCE_KEYS
            if unknown:
                raise ValidationError(f"unknown provenance keys {sorted(unknown)}")
            if "edited" in self.provenance and not self.provenance.get("argument_id"):
                raise ValidationError("edited flag requires an argument_id")
            rank = self.provenance.get("selection_rank")
            if rank is not None and rank < 1:
                raise ValidationError("selection_rank must be >= 1")

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "speaker": self.speaker,
            "text": self.text,
            "timestamp_iso8601": self.timestamp,
            "provenance": dict(self.provenance) if self.provenance else None,
        }


@dataclass
class WizardAction:
    timestamp: str  # ISO-8601
    kind: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ValidationError(f"unknown action kind {self.kind!r}")
        if self.kind == "select":
            rank = self.payload.get("rank")
            if rank is None or rank < 1:
                raise ValidationError("select actions need rank >= 1")
            if not self.payload.get("argument_id"):
                raise ValidationError("select actions need an argument_id")
        if self.kind == "stance_filter" and self.payload.get("stance") not in ("pro", "con", "off"):
            raise ValidationError("stance_filter payload must be pro, con or off")
        if self.kind == "search" and not isinstance(self.payload.get("terms"), list):
            raise ValidationError("search payload needs a terms list")
        if self.kind == "edit_commit" and not self.payload.get("argument_id"):
            raise ValidationError("edit_commit actions need an argument_id")

    def to_dict(self) -> dict:
        return {"timestamp": self.timestamp, "kind": self.kind, "payload": dict(self.payload)}


@dataclass(eq=False)
class DialogueSession:
    session_id: str
    topic: str
    mode: str
    duration_bounds: tuple[int, int]
    clock: Callable[[], float] = time.time
    phase: str = "created"
    participant_stance: str | None = None
    pre: QuestionnaireResponse | None = None
    post: QuestionnaireResponse | None = None
    experience: ExperienceRatings | None = None
    turns: list[Turn] = field(default_factory=list)
    actions: list[WizardAction] = field(default_factory=list)
    started_at: str | None = None
    closed_at: str | None = None
    forced_close: bool = False

    # -- helpers ----------------------------------------------------------

    def _require_phase(self, *allowed: str) -> None:
        if self.phase not in allowed:
            raise WrongPhase("/".join(allowed), self.phase)

    def _now(self) -> float:
        return self.clock()

    def chat_started_at(self) -> float | None:
        if self.turns:
            return _from_iso(self.turns[0].timestamp)
        return _from_iso(self.started_at) if self.started_at else None

    def elapsed_seconds(self) -> float:
        start = self.chat_started_at()
        if start is None:
            return 0.0
        end = _from_iso(self.closed_at) if self.closed_at else self._now()
        return end - start

    def last_participant_utterances(self) -> tuple[str | None, str | None]:
        """(last, previous) participant utterances, most recent first."""
        texts = [t.text for t in self.turns if t.speaker == PARTICIPANT]
        last = texts[-1] if texts else None
        prev = texts[-2] if len(texts) > 1 else None
        return last, prev

    def agent_turns(self) -> list[Turn]:
        return [t for t in self.turns if t.speaker == AGENT]

    # -- lifecycle --------------------------------------------------------

    def submit_pre(self, stance: str, response: QuestionnaireResponse) -> "DialogueSession":
        self._require_phase("created")
        allowed = TOPIC_STANCES.get(self.topic)
        if allowed and stance not in allowed:
            raise ValidationError(f"stance for {self.topic} must be one of {allowed}, got {stance!r}")
        if not stance:
            raise ValidationError("participant stance is required")
        self.participant_stance = stance
        self.pre = response
        self.phase = "pre_done"
        return self

    def _append_turn(self, speaker: str, text: str, provenance: dict | None) -> Turn:
        self._require_phase("pre_done", "chatting")
        if self.turns and self.turns[-1].speaker == speaker:
            raise AlternationViolation(f"two consecutive {speaker} turns")
        turn = Turn(
            index=len(self.turns),
            speaker=speaker,
            text=text,
            timestamp=_iso(self._now()),
            provenance=provenance,
        )
        self.turns.append(turn)
        if self.phase == "pre_done":
            self.phase = "chatting"
        return turn

    def post_participant_turn(self, text: str) -> Turn:
        return self._append_turn(PARTICIPANT, text, None)

    def post_agent_turn(self, text: str, provenance: dict | None = None) -> Turn:
        return self._append_turn(AGENT, text, provenance)

    def record_action(self, kind: str, **payload) -> WizardAction:
        self._require_phase("pre_done", "chatting")
        action = WizardAction(timestamp=_iso(self._now()), kind=kind, payload=payload)
        self.actions.append(action)
        return action

    def close(self, force: bool = False) -> "DialogueSession":
        self._require_phase("chatting")
        elapsed = self.elapsed_seconds()
        min_duration = self.duration_bounds[0]
        if elapsed < min_duration and not force:
            raise TooEarly(min_duration - elapsed)
        self.closed_at = _iso(self._now())
        self.forced_close = bool(force and elapsed < min_duration)
        self.phase = "closed"
        return self

    def submit_post(
        self,
        response: QuestionnaireResponse,
        experience: ExperienceRatings | None = None,
    ) -> "DialogueSession":
        self._require_phase("closed")
        if experience is not None and experience.has_bot_metrics() and self.mode == "wizard":
            raise ValidationError("consistent/knowledgeable ratings apply to bot modes only")
        self.post = response
        self.experience = experience
        self.phase = "post_done"
        return self

    # -- export -----------------------------------------------------------

    def to_export(self) -> dict:
        return {
            "schema_version": LOG_SCHEMA_VERSION,
            "session_id": self.session_id,
            "topic": self.topic,
            "mode": self.mode,
            "participant_stance": self.participant_stance,
            "pre": self.pre.to_dict() if self.pre else None,
            "post": self.post.to_dict() if self.post else None,
            "experience": self.experience.to_dict() if self.experience else None,
            "turns": [t.to_dict() for t in self.turns],
            "actions": [a.to_dict() for a in self.actions],
            "started_at": self.started_at,
            "closed_at": self.closed_at,
            "forced_close": self.forced_close,
        }

    def __eq__(self, other) -> bool:
        return isinstance(other, DialogueSession) and self.to_export() == other.to_export()


def create_session(
    topic: str,
    mode: str,
    duration_bounds: tuple[int, int] | None = None,
    clock: Callable[[], float] = time.time,
    session_id: str | None = None,
) -> DialogueSession:
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    if not topic:
        raise ValidationError("topic is required")
    bounds = duration_bounds or DEFAULT_DURATION_BOUNDS[mode]
    if bounds[0] > bounds[1]:
        raise ValidationError(f"min duration exceeds max: {bounds}")
    session = DialogueSession(
        session_id=session_id or uuid.uuid4().hex,
        topic=topic,
        mode=mode,
        duration_bounds=tuple(bounds),
        clock=clock,
    )
    session.started_at = _iso(session._now())
    return session


def import_session(record: dict, clock: Callable[[], float] = time.time) -> DialogueSession:
    """Rebuild a session from its export record (inverse of to_export)."""
    if record.get("schema_version") != LOG_SCHEMA_VERSION:
        from .errors import SchemaVersionMismatch

        raise SchemaVersionMismatch(LOG_SCHEMA_VERSION, record.get("schema_version"))
    session = DialogueSession(
        session_id=record["session_id"],
        topic=record["topic"],
        mode=record["mode"],
        duration_bounds=tuple(DEFAULT_DURATION_BOUNDS[record["mode"]]),
        clock=clock,
        participant_stance=record.get("participant_stance"),
        pre=QuestionnaireResponse.from_dict(record["pre"]) if record.get("pre") else None,
        post=QuestionnaireResponse.from_dict(record["post"]) if record.get("post") else None,
        experience=ExperienceRatings(record["experience"]) if record.get("experience") else None,
        turns=[
            Turn(
                index=t["index"],
                speaker=t["speaker"],
                text=t["text"],
                timestamp=t["timestamp_iso8601"],
                provenance=t.get("provenance"),
            )
            for t in record.get("turns", [])
        ],
        actions=[
            WizardAction(timestamp=a["timestamp"], kind=a["kind"], payload=a.get("payload", {}))
            for a in record.get("actions", [])
        ],
        started_at=record.get("started_at"),
        closed_at=record.get("closed_at"),
        forced_close=record.get("forced_close", False),
    )
    if session.post is not None:
        session.phase = "post_done"
    elif session.closed_at is not None:
        session.phase = "closed"
    elif session.turns:
        session.phase = "chatting"
    elif session.pre is not None:
        session.phase = "pre_done"
    else:
        session.phase = "created"
    return session
