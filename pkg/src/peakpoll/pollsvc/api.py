"""HTTP wire protocol over the poll engine.

Endpoints (JSON bodies, UTF-8):

    POST /polls                      -> 201 {poll_id}
    POST /polls/{poll_id}/sessions   -> 201 {session_id, query, progress} | {session_id, done, result}
    GET  /sessions/{id}/next         -> 200 {query, progress} | {done, result}
    POST /sessions/{id}/answer       -> 200 (same shape as next)
    GET  /sessions/{id}/result       -> 200 {ranking, queries_used, verified, fell_back}
    GET  /polls/{poll_id}/aggregate  -> 200 {status, ranking?, winner?, margins, respondents}

Cardinal positions travel as decimal strings and are parsed exactly. The
answer body accepts an optional "asked" echo of the question number being
answered; a stale echo is rejected so a duplicated submission cannot answer
the following question by accident.
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .service import (
    NoCompletedSessionsError,
    PollService,
    PollValidationError,
    UnknownPollError,
    UnknownSessionError,
    WrongSessionStateError,
)


class CreatePollRequest(BaseModel):
    name: str = "poll"
    alternatives: list[str]
    mode: Literal["ordinal-known", "cardinal-known", "unknown-positions"]
    axis: Optional[list[str]] = None
    positions: Optional[dict[str, str]] = None
    robust: bool = False


class AnswerRequest(BaseModel):
    prefer: Literal["left", "right"]
    asked: Optional[int] = Field(default=None, ge=0)


def create_app(service: PollService, ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="peakpoll", docs_url=None, redoc_url=None)
    app.state.service = service
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/polls", status_code=201)
    def create_poll(req: CreatePollRequest):
        try:
            poll_id = service.create_poll(req.model_dump())
        except PollValidationError as err:
            raise HTTPException(status_code=400, detail={"errors": err.errors})
        return {"poll_id": poll_id}

    @app.post("/polls/{poll_id}/sessions", status_code=201)
    def open_session(poll_id: str):
        try:
            session_id, view = service.open_session(poll_id)
        except UnknownPollError:
            raise HTTPException(status_code=404, detail="unknown poll")
        return {"session_id": session_id, **view}

    @app.get("/sessions/{session_id}/next")
    def session_next(session_id: str):
        try:
            return service.session_next(session_id)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail="unknown session")
        except WrongSessionStateError as err:
            raise HTTPException(status_code=409, detail=str(err))

    @app.post("/sessions/{session_id}/answer")
    def submit_answer(session_id: str, req: AnswerRequest):
        try:
            return service.submit_answer(session_id, req.prefer, req.asked)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail="unknown session")
        except WrongSessionStateError as err:
            raise HTTPException(status_code=409, detail=str(err))

    @app.get("/sessions/{session_id}/result")
    def session_result(session_id: str):
        try:
            return service.session_result_payload(session_id)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail="unknown session")
        except WrongSessionStateError as err:
            raise HTTPException(status_code=409, detail=str(err))

    @app.get("/polls/{poll_id}/aggregate")
    def poll_aggregate(poll_id: str):
        try:
            return service.poll_aggregate(poll_id)
        except UnknownPollError:
            raise HTTPException(status_code=404, detail="unknown poll")
        except NoCompletedSessionsError:
            raise HTTPException(status_code=409, detail="no completed sessions yet")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
