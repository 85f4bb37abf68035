"""Wire service hosting interactive sessions over the documented protocol.

The engine stays authoritative: the client can only submit actions from
the viewpoint character's repertoire, and each session's requests are
serialized by a per-session lock. See docs/protocol.md for the message
schemas.
"""

from __future__ import annotations

import itertools
import threading
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .errors import StoryEngineError
from .scenario import StoryElements, load_story_elements
from .session import Session, storify
from .simulation import GroundAction

PROTOCOL_VERSION = 1


class ActRequest(BaseModel):
    concept: str
    args: list[str] = []


class SessionStart(BaseModel):
    seed: int = 0


class HostedSession:
    def __init__(self, token: str, session: Session):
        self.token = token
        self.session = session
        self.lock = threading.Lock()
        self.events: list[dict] = []  # per-turn messages in emission order


def _action_payload(session: Session) -> list[dict]:
    available = {(a.concept, a.args) for a in session.available_vc_actions()}
    out = [{"concept": "Idle", "args_template": [], "applicable": True}]
    for concept in session.elements.vc_repertoire:
        schema = session.world.actions.get(concept)
        params = [f"?{name}:{sort}" for name, sort in schema.params] if schema else []
        grounded = sorted(args for c, args in available if c == concept)
        if grounded:
            for args in grounded:
                out.append({"concept": concept, "args_template": list(args), "applicable": True})
        else:
            out.append({"concept": concept, "args_template": params, "applicable": False})
    return out


def create_app(scenario_path=None, elements: Optional[StoryElements] = None) -> FastAPI:
    if elements is None:
        elements = load_story_elements(scenario_path)
    app = FastAPI(title="story engine session service")
    sessions: dict[str, HostedSession] = {}
    counter = itertools.count(1)
    registry_lock = threading.Lock()

    def hosted(token: str) -> HostedSession:
        entry = sessions.get(token)
        if entry is None:
            raise HTTPException(status_code=404, detail="invalid session token")
        return entry

    @app.post("/sessions")
    def start_session(req: SessionStart):
        with registry_lock:
            token = f"s{next(counter):06d}"
            sessions[token] = HostedSession(token, Session(elements, req.seed))
        return {"protocol_version": PROTOCOL_VERSION, "token": token}

    @app.get("/sessions/{token}/state")
    def state(token: str):
        entry = hosted(token)
        with entry.lock:
            session = entry.session
            return {
                "protocol_version": PROTOCOL_VERSION,
                "turn": session.turn,
                "terminated": session.terminated,
                "story": storify(session.fabula),
                "debrief": [
                    {
                        "turn": a["turn"],
                        "case_id": a["case_id"],
                        "narrative_concept": elements.library.get(a["case_id"]).narrative_concept,
                        "competences": sorted(elements.library.get(a["case_id"]).competences),
                    }
                    for a in session.run_log()["applied_cases"]
                ],
            }

    @app.get("/sessions/{token}/actions")
    def actions(token: str):
        entry = hosted(token)
        with entry.lock:
            return {
                "protocol_version": PROTOCOL_VERSION,
                "actions": _action_payload(entry.session),
            }

    @app.post("/sessions/{token}/act")
    def act(token: str, req: ActRequest):
        entry = hosted(token)
        with entry.lock:
            session = entry.session
            if session.terminated:
                raise HTTPException(status_code=409, detail="session terminated")
            action = GroundAction(elements.vc, req.concept, tuple(req.args))
            listed = {(a.concept, a.args) for a in session.available_vc_actions()}
            if (req.concept, tuple(req.args)) not in listed:
                raise HTTPException(
                    status_code=400,
                    detail=f"action {req.concept}{tuple(req.args)} is not applicable",
                )
            try:
                result = session.step(action)
            except StoryEngineError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            message = {"type": "turn", "payload": result.to_dict()}
            entry.events.append(message)
            return {"protocol_version": PROTOCOL_VERSION, "result": result.to_dict()}

    @app.get("/sessions/{token}/events")
    def events(token: str, since: int = 0):
        entry = hosted(token)
        with entry.lock:
            return {
                "protocol_version": PROTOCOL_VERSION,
                "next": len(entry.events),
                "events": entry.events[since:],
            }

    @app.get("/sessions/{token}/log")
    def log(token: str):
        entry = hosted(token)
        with entry.lock:
            return {"protocol_version": PROTOCOL_VERSION, "log": entry.session.run_log()}

    return app


def serve(scenario_path, host: str = "127.0.0.1", port: int = 8000):
    import uvicorn

    uvicorn.run(create_app(scenario_path), host=host, port=port)
