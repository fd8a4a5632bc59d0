"""Network front door: session endpoints plus a bidirectional chat channel.

Wire protocol: JSON frames {type, session_id, seq, payload...}. Direct
replies echo the request's seq; server-initiated pushes (suggestions, agent
utterances, phase changes) carry their own per-connection push counter.
Unknown frame types produce an error frame and leave the channel open.

Durability: every accepted mutation is appended (flushed and fsynced) to a
per-session JSONL write-ahead log BEFORE any acknowledgment or push goes
out. A snapshot in the export schema is written at close and refreshed at
post_done; on startup the store replays whatever logs it finds.
"""

from __future__ import annotations

import json
import os
import secrets
import time
from pathlib import Path

from fastapi import FastAPI, Query, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse

from . import responder as rsp
from .argbase import ArgumentBase, load_base
from .config import ServiceConfig
from .errors import (
    AlternationViolation,
    BadToken,
    OumwozError,
    TooEarly,
    UnknownSession,
    ValidationError,
    WrongPhase,
)
from .oum import ExperienceRatings, QuestionnaireResponse
from .retrieval import (
    RetrievalIndex,
    SuggestionQuery,
    build_index,
    load_index,
    tfidf_suggest,
)
from .session import DialogueSession, create_session
from .textproc import data_file

ROLES = ("participant", "wizard")


def _read_lines(path: Path) -> list[str]:
    out = []
    for line in path.read_text("utf-8").splitlines():
        line = line.split("#", 1)[0].strip() if line.lstrip().startswith("#") else line.strip()
        if line:
            out.append(line)
    return out


def _default_lines(name: str) -> list[str]:
    out = []
    for line in data_file(name).read_text("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


class TopicResources:
    """Argument base, retrieval index and text lookup for one topic."""

    def __init__(self, base: ArgumentBase, index: RetrievalIndex, pipeline=None):
        self.base = base
        self.index = index
        self.pipeline = pipeline  # TokenPipelineConfig the index was built with
        self.texts = {r.id: r.text for r in base.records}
        self.stances = {r.id: r.topic_stance for r in base.records}


class SessionStore:
    """Sessions plus their per-session write-ahead logs under one directory."""

    def __init__(self, data_dir: Path, clock=time.time):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.clock = clock
        self.sessions: dict[str, DialogueSession] = {}
        self.tokens: dict[str, dict[str, str]] = {}
        self.filters: dict[str, str | None] = {}
        self._wal_handles: dict[str, object] = {}
        self._replay_all()

    # -- WAL ---------------------------------------------------------------

    def _wal_path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.wal.jsonl"

    def _snapshot_path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.json"

    def append(self, session_id: str, event: dict) -> None:
        """Durably record one event before anything is acknowledged."""
        handle = self._wal_handles.get(session_id)
        if handle is None:
            handle = open(self._wal_path(session_id), "a", encoding="utf-8")
            self._wal_handles[session_id] = handle
        handle.write(json.dumps(event, ensure_ascii=False) + "\n")
        handle.flush()
        os.fsync(handle.fileno())

    def write_snapshot(self, session: DialogueSession) -> None:
        path = self._snapshot_path(session.session_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(session.to_export(), ensure_ascii=False) + "\n", "utf-8")
        os.replace(tmp, path)

    def _replay_all(self) -> None:
        for wal in sorted(self.data_dir.glob("*.wal.jsonl")):
            self._replay_one(wal)

    def _replay_one(self, wal: Path) -> None:
        import datetime as _dt

        def iso_to_epoch(value: str) -> float:
            return _dt.datetime.fromisoformat(value).timestamp()

        session: DialogueSession | None = None
        replay_ts = {"value": 0.0}
        replay_clock = lambda: replay_ts["value"]  # noqa: E731
        with open(wal, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError:
                    break  # torn tail write: everything acked precedes it
                if event.get("ts"):
                    replay_ts["value"] = iso_to_epoch(event["ts"])
                kind = event["event"]
                if kind == "created":
                    replay_ts["value"] = iso_to_epoch(event["started_at"])
                    session = create_session(
                        topic=event["topic"],
                        mode=event["mode"],
                        duration_bounds=tuple(event["duration_bounds"]),
                        clock=replay_clock,
                        session_id=event["session_id"],
                    )
                    self.tokens[session.session_id] = event["tokens"]
                    self.filters[session.session_id] = None
                elif session is None:
                    break
                elif kind == "pre":
                    session.submit_pre(
                        event["stance"], QuestionnaireResponse.from_dict(event["response"])
                    )
                elif kind == "turn":
                    if event["speaker"] == "participant":
                        session.post_participant_turn(event["text"])
                    else:
                        session.post_agent_turn(event["text"], event.get("provenance"))
                elif kind == "action":
                    session.record_action(event["kind"], **event.get("payload", {}))
                    if event["kind"] == "stance_filter":
                        stance = event.get("payload", {}).get("stance")
                        self.filters[session.session_id] = None if stance == "off" else stance
                elif kind == "close":
                    session.close(force=event.get("force", False))
                    session.forced_close = event.get("forced_close", session.forced_close)
                elif kind == "post":
                    session.submit_post(
                        QuestionnaireResponse.from_dict(event["response"]),
                        ExperienceRatings(event["experience"]) if event.get("experience") else None,
                    )
        if session is not None:
            session.clock = self.clock
            self.sessions[session.session_id] = session

    # -- operations (each durably logged) -----------------------------------

    def create(self, topic: str, mode: str, duration_bounds=None) -> tuple[DialogueSession, dict]:
        session = create_session(topic, mode, duration_bounds, clock=self.clock)
        tokens = {role: secrets.token_urlsafe(16) for role in ROLES}
        self.sessions[session.session_id] = session
        self.tokens[session.session_id] = tokens
        self.filters[session.session_id] = None
        self.append(
            session.session_id,
            {
                "event": "created",
                "session_id": session.session_id,
                "topic": topic,
                "mode": mode,
                "duration_bounds": list(session.duration_bounds),
                "tokens": tokens,
                "started_at": session.started_at,
            },
        )
        return session, tokens

    def get(self, session_id: str) -> DialogueSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        return session

    def check_token(self, session_id: str, role: str, token: str) -> None:
        if session_id not in self.sessions:
            raise UnknownSession(f"no session {session_id!r}")
        if token != self.tokens.get(session_id, {}).get(role):
            raise BadToken(f"bad {role} token for session {session_id}")

    def submit_pre(self, session_id: str, stance: str, response: QuestionnaireResponse):
        session = self.get(session_id)
        session.submit_pre(stance, response)
        self.append(
            session_id,
            {"event": "pre", "stance": stance, "response": response.to_dict()},
        )

    def add_turn(self, session_id: str, speaker: str, text: str, provenance: dict | None):
        session = self.get(session_id)
        if speaker == "participant":
            turn = session.post_participant_turn(text)
        else:
            turn = session.post_agent_turn(text, provenance)
        self.append(
            session_id,
            {
                "event": "turn",
                "speaker": speaker,
                "text": text,
                "provenance": provenance,
                "ts": turn.timestamp,
            },
        )
        return turn

    def add_action(self, session_id: str, kind: str, payload: dict):
        session = self.get(session_id)
        action = session.record_action(kind, **payload)
        if kind == "stance_filter":
            stance = payload.get("stance")
            self.filters[session_id] = None if stance == "off" else stance
        self.append(
            session_id,
            {"event": "action", "kind": kind, "payload": payload, "ts": action.timestamp},
        )

    def close_session(self, session_id: str, force: bool = False):
        session = self.get(session_id)
        session.close(force=force)
        self.append(
            session_id,
            {
                "event": "close",
                "force": force,
                "forced_close": session.forced_close,
                "ts": session.closed_at,
            },
        )
        self.write_snapshot(session)

    def submit_post(self, session_id, response: QuestionnaireResponse, experience):
        session = self.get(session_id)
        session.submit_post(response, experience)
        self.append(
            session_id,
            {
                "event": "post",
                "response": response.to_dict(),
                "experience": experience.to_dict() if experience else None,
            },
        )
        self.write_snapshot(session)

    def exportable_sessions(self) -> list[DialogueSession]:
        return [
            s
            for s in self.sessions.values()
            if s.phase in ("closed", "post_done")
        ]


class BotRuntime:
    """Everything the bot modes need to answer a participant."""

    def __init__(
        self,
        gate: rsp.GateModel,
        free_model: rsp.UnigramModel,
        responder_config: rsp.ResponderConfig,
        chitchat_templates: list[str],
        opener: str = "Hello! What do you think about {topic}?",
    ):
        self.gate = gate
        self.free_model = free_model
        self.responder_config = responder_config
        self.chitchat_templates = chitchat_templates
        self.opener = opener

    @classmethod
    def from_config(cls, config: ServiceConfig) -> "BotRuntime":
        hedges = _read_lines(config.hedges) if config.hedges else _default_lines("hedges.txt")
        questions = (
            _read_lines(config.question_templates)
            if config.question_templates
            else _default_lines("question_templates.txt")
        )
        chitchat = (
            _read_lines(config.chitchat_templates)
            if config.chitchat_templates
            else _default_lines("chitchat_templates.txt")
        )
        gate = (
            rsp.load_gate(config.gate_model)
            if config.gate_model
            else rsp.GateModel(weights=[0.0] * rsp.FEATURE_DIM, bias=0.0)
        )
        free_model = rsp.UnigramModel()
        if config.free_model_corpus:
            from .analytics import load_corpus

            free_model = rsp.UnigramModel.from_texts(
                rsp.free_turn_texts(load_corpus(config.free_model_corpus))
            )
        important = (
            frozenset(_read_lines(config.important_terms)) if config.important_terms else frozenset()
        )
        gold = frozenset(_read_lines(config.gold_ids)) if config.gold_ids else frozenset()
        return cls(
            gate=gate,
            free_model=free_model,
            responder_config=rsp.ResponderConfig(
                hedges=hedges,
                question_templates=questions,
                gold_ids=gold,
                important_terms=important,
            ),
            chitchat_templates=chitchat,
        )


class ChatService:
    """Ties the store, per-topic resources and the bot runtime together."""

    def __init__(
        self,
        store: SessionStore,
        topics: dict[str, TopicResources],
        bot: BotRuntime,
        duration_bounds: dict[str, tuple[int, int]] | None = None,
        rng_seed: int = 0,
    ):
        self.store = store
        self.topics = topics
        self.bot = bot
        self.duration_bounds = duration_bounds or {}
        self.rng_seed = rng_seed

    @classmethod
    def from_config(cls, config: ServiceConfig) -> "ChatService":
        from .textproc import TokenPipelineConfig, load_stopwords

        if config.stopwords:
            pipeline = TokenPipelineConfig(stopwords=frozenset(load_stopwords(config.stopwords)))
        else:
            pipeline = TokenPipelineConfig()
        topics = {}
        for topic, base_path in config.bases.items():
            base = load_base(base_path)
            if topic in config.indexes and Path(config.indexes[topic]).exists():
                index = load_index(config.indexes[topic])
                if index.pipeline_fingerprint != pipeline.fingerprint():
                    raise ValidationError(
                        f"index for {topic!r} was built with a different text pipeline"
                    )
            else:
                index = build_index(base, pipeline)
            topics[topic] = TopicResources(base, index, pipeline)
        return cls(
            store=SessionStore(config.data_dir),
            topics=topics,
            bot=BotRuntime.from_config(config),
            duration_bounds=config.duration_bounds,
        )

    # -- suggestion + bot plumbing ------------------------------------------

    def resources_for(self, session: DialogueSession) -> TopicResources | None:
        return self.topics.get(session.topic)

    def suggestions_for(self, session: DialogueSession) -> list[dict]:
        resources = self.resources_for(session)
        if resources is None:
            return []
        last, previous = session.last_participant_utterances()
        if not last:
            return []
        query = SuggestionQuery(
            last_utterance=last,
            previous_utterance=previous,
            stance_filter=self.store.filters.get(session.session_id),
        )
        results = tfidf_suggest(resources.index, query, config=resources.pipeline)
        return [
            {
                "argument_id": s.argument_id,
                "text": resources.texts[s.argument_id],
                "stance": resources.stances[s.argument_id],
                "final_score": s.final_score,
                "rank": rank,
            }
            for rank, s in enumerate(results, start=1)
        ]

    def search_for(self, session: DialogueSession, terms: list[str]) -> list[dict]:
        from .retrieval import keyword_search

        resources = self.resources_for(session)
        if resources is None:
            return []
        results = keyword_search(
            resources.index,
            terms,
            stance_filter=self.store.filters.get(session.session_id),
            limit=50,
            config=resources.pipeline,
        )
        return [
            {
                "argument_id": s.argument_id,
                "text": resources.texts[s.argument_id],
                "stance": resources.stances[s.argument_id],
                "final_score": s.final_score,
                "rank": rank,
            }
            for rank, s in enumerate(results, start=1)
        ]

    def bot_reply(self, session: DialogueSession) -> rsp.BotReply:
        if session.mode == "control_bot":
            return rsp.control_respond(len(session.agent_turns()), self.bot.chitchat_templates)
        resources = self.resources_for(session)
        if resources is None:
            raise ValidationError(f"no argument base configured for topic {session.topic!r}")
        last, previous = session.last_participant_utterances()
        state = rsp.ResponderState(
            last_utterance=last or "",
            previous_utterance=previous,
            turn_index=len(session.turns),
            previous_bot_utterances=tuple(t.text for t in session.agent_turns()),
        )
        responder_config = self.bot.responder_config
        if responder_config.pipeline is None and resources.pipeline is not None:
            import dataclasses

            responder_config = dataclasses.replace(responder_config, pipeline=resources.pipeline)
        return rsp.respond(
            state,
            resources.index,
            resources.texts,
            self.bot.gate,
            self.bot.free_model,
            responder_config,
            rng_seed=self.rng_seed + len(session.turns),
        )

    def opening_turn(self, session: DialogueSession) -> tuple[str, dict]:
        if session.mode == "control_bot":
            reply = rsp.control_respond(0, self.bot.chitchat_templates)
            return reply.text, {"mode": "control"}
        text = self.bot.opener.replace("{topic}", session.topic)
        return text, {"mode": "argu_bot"}


def _provenance_for(reply: rsp.BotReply, mode: str) -> dict:
    provenance = {
        "mode": "control" if reply.mode == "control" else mode,
        "pgen": reply.pgen,
    }
    if reply.argument_id:
        provenance["argument_id"] = reply.argument_id
        provenance["edited"] = False
        provenance["stance"] = reply.stance
    return provenance


def _error_payload(exc: Exception) -> dict:
    code = getattr(exc, "code", "error")
    detail = str(exc)
    return {"type": "error", "code": code, "detail": detail}


def create_app(service: ChatService) -> FastAPI:
    import asyncio

    app = FastAPI(title="oumwoz")
    connections: dict[tuple[str, str], WebSocket] = {}
    push_seq: dict[tuple[str, str], int] = {}
    session_locks: dict[str, asyncio.Lock] = {}

    def lock_for(session_id: str) -> asyncio.Lock:
        return session_locks.setdefault(session_id, asyncio.Lock())

    def next_push_seq(key: tuple[str, str]) -> int:
        push_seq[key] = push_seq.get(key, 0) + 1
        return push_seq[key]

    async def push(session_id: str, role: str, frame: dict) -> None:
        key = (session_id, role)
        socket = connections.get(key)
        if socket is None:
            return
        frame = dict(frame)
        frame.setdefault("seq", next_push_seq(key))
        frame["session_id"] = session_id
        try:
            await socket.send_json(frame)
        except Exception:
            connections.pop(key, None)

    def phase_payload(session: DialogueSession) -> dict:
        elapsed = session.elapsed_seconds()
        return {
            "type": "phase",
            "value": session.phase,
            "elapsed_seconds": elapsed,
            "min_remaining_seconds": max(0.0, session.duration_bounds[0] - elapsed),
            "max_seconds": session.duration_bounds[1],
        }

    async def push_phase(session: DialogueSession) -> None:
        for role in ROLES:
            await push(session.session_id, role, phase_payload(session))

    # -- HTTP ----------------------------------------------------------------

    @app.post("/sessions")
    async def create_session_endpoint(body: dict):
        topic = body.get("topic")
        mode = body.get("mode")
        bounds = body.get("duration_bounds")
        if bounds is not None:
            bounds = tuple(bounds)
        elif mode in service.duration_bounds:
            bounds = service.duration_bounds[mode]
        try:
            session, tokens = service.store.create(topic, mode, bounds)
        except OumwozError as exc:
            return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=400)
        return {
            "session_id": session.session_id,
            "wizard_token": tokens["wizard"],
            "participant_token": tokens["participant"],
        }

    @app.post("/sessions/{session_id}/pre")
    async def submit_pre(session_id: str, body: dict, token: str = Query("")):
        try:
            service.store.check_token(session_id, "participant", token)
            response = QuestionnaireResponse.from_dict(body.get("response", {}))
            service.store.submit_pre(session_id, body.get("stance"), response)
        except UnknownSession as exc:
            return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=404)
        except BadToken as exc:
            return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=401)
        except WrongPhase as exc:
            return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=409)
        except OumwozError as exc:
            return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=400)
        session = service.store.get(session_id)
        return {"session_id": session_id, "phase": session.phase}

    @app.post("/sessions/{session_id}/post")
    async def submit_post(session_id: str, body: dict, token: str = Query("")):
        try:
            service.store.check_token(session_id, "participant", token)
            response = QuestionnaireResponse.from_dict(body.get("response", {}))
            experience = None
            if body.get("experience") is not None:
                experience = ExperienceRatings(body["experience"])
            service.store.submit_post(session_id, response, experience)
        except UnknownSession as exc:
            return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=404)
        except BadToken as exc:
            return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=401)
        except WrongPhase as exc:
            return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=409)
        except OumwozError as exc:
            return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=400)
        session = service.store.get(session_id)
        return {"session_id": session_id, "phase": session.phase}

    @app.get("/sessions/{session_id}/export")
    async def export_session(session_id: str):
        try:
            session = service.store.get(session_id)
        except UnknownSession as exc:
            return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=404)
        return JSONResponse(session.to_export())

    @app.get("/corpus/export")
    async def export_corpus():
        lines = [
            json.dumps(s.to_export(), ensure_ascii=False)
            for s in service.store.exportable_sessions()
        ]
        return PlainTextResponse("\n".join(lines) + ("\n" if lines else ""))

    # -- chat channel ----------------------------------------------------------

    @app.websocket("/sessions/{session_id}/chat")
    async def chat(socket: WebSocket, session_id: str, role: str = Query(...), token: str = Query("")):
        if role not in ROLES:
            await socket.close(code=4400)
            return
        try:
            session = service.store.get(session_id)
            service.store.check_token(session_id, role, token)
        except (UnknownSession, BadToken):
            await socket.close(code=4401)
            return
        await socket.accept()
        key = (session_id, role)
        previous = connections.get(key)
        if previous is not None:
            try:
                await previous.send_json(
                    {"type": "superseded", "session_id": session_id, "seq": next_push_seq(key)}
                )
                await previous.close()
            except Exception:
                pass
        connections[key] = socket

        await push(session_id, role, phase_payload(session))

        # Bot modes open the dialogue as soon as the participant arrives.
        if (
            role == "participant"
            and session.mode in ("argu_bot", "control_bot")
            and session.phase == "pre_done"
            and not session.turns
        ):
            text, provenance = service.opening_turn(session)
            service.store.add_turn(session_id, "agent", text, provenance)
            await push(session_id, "participant", {"type": "utterance", "text": text})

        try:
            while True:
                try:
                    frame = await socket.receive_json()
                except json.JSONDecodeError:
                    await socket.send_json(
                        {"type": "error", "code": "malformed_input", "detail": "frame is not JSON", "session_id": session_id}
                    )
                    continue
                async with lock_for(session_id):
                    await handle_frame(session_id, role, socket, frame)
        except WebSocketDisconnect:
            if connections.get(key) is socket:
                connections.pop(key, None)

    async def handle_frame(session_id: str, role: str, socket: WebSocket, frame: dict) -> None:
        seq = frame.get("seq")
        kind = frame.get("type")
        session = service.store.get(session_id)

        async def reply(payload: dict) -> None:
            payload = dict(payload)
            payload["session_id"] = session_id
            if seq is not None:
                payload["seq"] = seq
            await socket.send_json(payload)

        try:
            if kind == "utterance" and role == "participant":
                service.store.add_turn(session_id, "participant", frame.get("text", ""), None)
                await reply({"type": "ack", "turn_index": len(session.turns) - 1})
                if session.mode == "wizard":
                    await push(
                        session_id,
                        "wizard",
                        {"type": "suggestions", "items": service.suggestions_for(session)},
                    )
                else:
                    bot_reply = service.bot_reply(session)
                    provenance = _provenance_for(bot_reply, session.mode)
                    service.store.add_turn(session_id, "agent", bot_reply.text, provenance)
                    await push(session_id, "participant", {"type": "utterance", "text": bot_reply.text})
            elif kind == "utterance" and role == "wizard":
                provenance = frame.get("provenance") or {"mode": "wizard"}
                provenance.setdefault("mode", "wizard")
                service.store.add_turn(session_id, "agent", frame.get("text", ""), provenance)
                await reply({"type": "ack", "turn_index": len(session.turns) - 1})
                await push(session_id, "participant", {"type": "utterance", "text": frame.get("text", "")})
            elif kind == "search" and role == "wizard":
                terms = frame.get("terms", [])
                service.store.add_action(session_id, "search", {"terms": terms})
                await reply({"type": "suggestions", "items": service.search_for(session, terms)})
            elif kind == "filter" and role == "wizard":
                stance = frame.get("stance")
                service.store.add_action(session_id, "stance_filter", {"stance": stance})
                await reply({"type": "suggestions", "items": service.suggestions_for(session)})
            elif kind == "select" and role == "wizard":
                service.store.add_action(
                    session_id,
                    "select",
                    {"argument_id": frame.get("argument_id"), "rank": frame.get("rank")},
                )
                await reply({"type": "ack"})
            elif kind == "close":
                service.store.close_session(session_id, force=bool(frame.get("force")))
                await reply({"type": "ack"})
                await push_phase(session)
            else:
                await reply({"type": "error", "code": "unknown_type", "detail": f"unknown frame {kind!r} for role {role}"})
        except (WrongPhase, AlternationViolation, TooEarly, ValidationError, OumwozError) as exc:
            await reply(_error_payload(exc))

    return app
