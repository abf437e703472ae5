"""Poll/session engine: resumable elicitation conversations over an event log.

Every session runs one elicitation program (the same generators the library
entry points drive), advanced one human answer at a time. State transitions
are event-sourced: the answer events fully determine the conversation, so
replaying the log after a crash lands every open session on the identical
pending query. "query" and "completed" lines are audit records; replay
checks them against the reconstructed state instead of applying them.

Progress responses carry (asked, bound) where bound is the active
algorithm's worst case; for robust sessions the bound covers the as-if run
plus verification, and stretches by the full-sort budget once the answer
count shows the fallback engaged.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Callable, Optional

from ..core import (
    AlternativeNames,
    CardinalLayout,
    InconsistentAnswersError,
    OrdinalAxis,
    Profile,
    Ranking,
    is_single_peaked,
)
from ..elicit import (
    ElicitReport,
    ElicitationContext,
    Program,
    ProgramOutcome,
    cardinal_bound,
    cardinal_ranking_program,
    mergesort_bound,
    mergesort_program,
    other_vote_bound,
    positions_bound,
    ranking_given_other_vote_program,
    ranking_given_positions_program,
    robust_program,
)
from ..spverify import CondorcetCycleError, aggregate_ranking, median_peak_winner, pairwise_matrix
from .store import EventLog

MODES = ("ordinal-known", "cardinal-known", "unknown-positions")

#: consecutive fallbacks after which a robust poll switches its known vote
FALLBACK_SWITCH_STREAK = 3

DEFAULT_SESSION_TIMEOUT = 30 * 60.0


class PollValidationError(ValueError):
    """Bad poll definition; ``errors`` maps field name to message."""

    def __init__(self, errors: dict[str, str]):
        super().__init__("; ".join(f"{k}: {v}" for k, v in errors.items()))
        self.errors = errors


class UnknownPollError(KeyError):
    pass


class UnknownSessionError(KeyError):
    pass


class WrongSessionStateError(RuntimeError):
    pass


class NoCompletedSessionsError(RuntimeError):
    pass


@dataclass
class PollState:
    poll_id: str
    name: str
    names: AlternativeNames
    mode: str
    robust: bool
    axis: Optional[OrdinalAxis]
    layout: Optional[CardinalLayout]
    created_at: str
    spec: dict  # canonical creation payload, for snapshots
    known_vote: Optional[Ranking] = None
    fallback_streak: int = 0
    last_verified: Optional[Ranking] = None
    completed_rankings: list[Ranking] = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.names.m


@dataclass
class SessionState:
    session_id: str
    poll_id: str
    algorithm: str
    known_vote: Optional[Ranking]
    created_at: str
    last_activity: float
    state: str = "awaiting-answer"  # awaiting-answer | completed | expired | failed
    answers: list[bool] = field(default_factory=list)
    pending: Optional[tuple[int, int]] = None
    result: Optional[ElicitReport] = None
    program: Optional[Program] = None  # live generator; rebuilt on load

    @property
    def queries_used(self) -> int:
        return len(self.answers)


def _now_iso(epoch: float) -> str:
    return datetime.fromtimestamp(epoch, tz=timezone.utc).isoformat(timespec="milliseconds")


def _iso_epoch(ts: str) -> float:
    return datetime.fromisoformat(ts).timestamp()


def build_program(algorithm: str, poll: PollState, known_vote: Optional[Ranking]) -> Program:
    m = poll.m
    if algorithm == "positions":
        return ranking_given_positions_program(poll.axis)
    if algorithm == "cardinal":
        return cardinal_ranking_program(poll.layout)
    if algorithm == "other_vote":
        return ranking_given_other_vote_program(known_vote)
    if algorithm == "sort":
        return mergesort_program(m)
    if algorithm == "robust_positions":
        return robust_program(ElicitationContext(axis=poll.axis), m)
    if algorithm == "robust_cardinal":
        return robust_program(ElicitationContext(cardinal=poll.layout), m)
    if algorithm == "robust_other_vote":
        return robust_program(ElicitationContext(known_vote=known_vote), m)
    raise ValueError(f"unknown algorithm tag {algorithm!r}")


def base_bound(algorithm: str, m: int) -> int:
    if algorithm == "positions":
        return positions_bound(m)
    if algorithm == "cardinal":
        return cardinal_bound(m)
    if algorithm == "other_vote":
        return other_vote_bound(m)
    if algorithm == "sort":
        return mergesort_bound(m)
    if algorithm.startswith("robust_"):
        return base_bound(algorithm[len("robust_") :], m) + (m - 1)
    raise ValueError(f"unknown algorithm tag {algorithm!r}")


def report_payload(report: ElicitReport, names: AlternativeNames) -> dict:
    return {
        "ranking": [names.names[a] for a in report.ranking.order],
        "queries_used": report.queries_used,
        "verified": report.verified,
        "fell_back": report.fell_back,
    }


def canonical_report_bytes(report: ElicitReport, names: AlternativeNames) -> bytes:
    return json.dumps(report_payload(report, names), sort_keys=True).encode()


class PollService:
    def __init__(
        self,
        data_dir,
        *,
        session_timeout: float = DEFAULT_SESSION_TIMEOUT,
        now_fn: Callable[[], float] = time.time,
        durable: bool = True,
        compact_every: int = 100,
        id_factory: Optional[Callable[[], str]] = None,
    ):
        self._log = EventLog(data_dir, durable=durable)
        self._timeout = session_timeout
        self._now = now_fn
        self._compact_every = compact_every
        self._new_id = id_factory or (lambda: uuid.uuid4().hex[:12])
        self._polls: dict[str, PollState] = {}
        self._sessions: dict[str, SessionState] = {}
        # one engine lock: per-session transitions are serialized and
        # poll-level mutations (known-vote updates, aggregates) are atomic
        self._lock = threading.RLock()
        self._recover()

    # --- recovery -----------------------------------------------------------

    def _recover(self) -> None:
        snap = self._log.read_snapshot()
        applied = 0
        if snap is not None:
            applied = snap["applied"]
            self._restore_snapshot(snap["state"])
        for event in self._log.read_events(skip=applied):
            self._apply(event)

    def _restore_snapshot(self, state: dict) -> None:
        for pd in state["polls"]:
            poll = self._poll_from_spec(pd["poll_id"], pd["spec"], pd["created_at"])
            poll.known_vote = Ranking(tuple(pd["known_vote"])) if pd["known_vote"] else None
            poll.fallback_streak = pd["fallback_streak"]
            poll.last_verified = Ranking(tuple(pd["last_verified"])) if pd["last_verified"] else None
            poll.completed_rankings = [Ranking(tuple(r)) for r in pd["completed"]]
            self._polls[poll.poll_id] = poll
        for sd in state["sessions"]:
            session = SessionState(
                session_id=sd["session_id"],
                poll_id=sd["poll_id"],
                algorithm=sd["algorithm"],
                known_vote=Ranking(tuple(sd["known_vote"])) if sd["known_vote"] else None,
                created_at=sd["created_at"],
                last_activity=sd["last_activity"],
                state=sd["state"],
            )
            session.answers = [bool(a) for a in sd["answers"]]
            if sd["result"] is not None:
                session.result = ElicitReport(
                    Ranking(tuple(sd["result"]["ranking"])),
                    sd["result"]["queries_used"],
                    sd["result"]["verified"],
                    sd["result"]["fell_back"],
                )
            self._sessions[session.session_id] = session
            if session.state == "awaiting-answer":
                self._replay_program(session)

    def _snapshot_state(self) -> dict:
        return {
            "polls": [
                {
                    "poll_id": p.poll_id,
                    "spec": p.spec,
                    "created_at": p.created_at,
                    "known_vote": list(p.known_vote.order) if p.known_vote else None,
                    "fallback_streak": p.fallback_streak,
                    "last_verified": list(p.last_verified.order) if p.last_verified else None,
                    "completed": [list(r.order) for r in p.completed_rankings],
                }
                for p in self._polls.values()
            ],
            "sessions": [
                {
                    "session_id": s.session_id,
                    "poll_id": s.poll_id,
                    "algorithm": s.algorithm,
                    "known_vote": list(s.known_vote.order) if s.known_vote else None,
                    "created_at": s.created_at,
                    "last_activity": s.last_activity,
                    "state": s.state,
                    "answers": [int(a) for a in s.answers],
                    "result": None
                    if s.result is None
                    else {
                        "ranking": list(s.result.ranking.order),
                        "queries_used": s.result.queries_used,
                        "verified": s.result.verified,
                        "fell_back": s.result.fell_back,
                    },
                }
                for s in self._sessions.values()
            ],
        }

    def _replay_program(self, session: SessionState) -> None:
        """Rebuild the live generator by feeding the recorded answers."""
        poll = self._polls[session.poll_id]
        program = build_program(session.algorithm, poll, session.known_vote)
        try:
            q = next(program)
            for ans in session.answers:
                q = program.send(ans)
        except StopIteration:
            raise RuntimeError(f"session {session.session_id}: recorded answers overrun the program")
        session.program = program
        session.pending = q

    # --- event plumbing -----------------------------------------------------

    def _commit(self, event: dict) -> list[dict]:
        """Apply a state-advancing event and persist it with its audit trail."""
        derived = self._apply(event)
        before = self._log.count
        self._log.append([event] + derived)
        if before // self._compact_every != self._log.count // self._compact_every:
            self._log.write_snapshot(self._snapshot_state(), self._log.count)
        return derived

    def _apply(self, event: dict) -> list[dict]:
        kind = event["type"]
        if kind == "created" and "poll" in event and "session" not in event:
            poll = self._poll_from_spec(event["poll"], event["spec"], event["ts"])
            self._polls[poll.poll_id] = poll
            return []
        if kind == "created" and "session" in event:
            return self._apply_session_created(event)
        if kind == "answer":
            return self._apply_answer(event)
        if kind == "expired":
            session = self._sessions[event["session"]]
            session.state = "expired"
            session.pending = None
            session.program = None
            return []
        if kind in ("query", "completed", "failed"):
            self._assert_audit(event)
            return []
        raise ValueError(f"unknown event type {kind!r}")

    def _assert_audit(self, event: dict) -> None:
        session = self._sessions[event["session"]]
        if event["type"] == "query":
            if session.pending != tuple(event["query"]):
                raise RuntimeError(f"log corruption: session {session.session_id} pending query drifted")
        elif session.state != event["type"]:
            raise RuntimeError(f"log corruption: session {session.session_id} not {event['type']}")

    def _apply_session_created(self, event: dict) -> list[dict]:
        poll = self._polls[event["poll"]]
        kv = Ranking(tuple(event["known_vote"])) if event["known_vote"] else None
        session = SessionState(
            session_id=event["session"],
            poll_id=poll.poll_id,
            algorithm=event["algorithm"],
            known_vote=kv,
            created_at=event["ts"],
            last_activity=_iso_epoch(event["ts"]),
        )
        self._sessions[session.session_id] = session
        program = build_program(session.algorithm, poll, kv)
        session.program = program
        try:
            session.pending = next(program)
        except StopIteration as stop:
            return self._finish_session(session, stop.value, event["ts"])
        return [self._query_event(session, event["ts"])]

    def _apply_answer(self, event: dict) -> list[dict]:
        session = self._sessions[event["session"]]
        if session.state != "awaiting-answer":
            raise RuntimeError(f"answer event for session {session.session_id} in state {session.state}")
        prefer_left = event["prefer"] == "left"
        session.answers.append(prefer_left)
        session.last_activity = _iso_epoch(event["ts"])
        try:
            session.pending = session.program.send(prefer_left)
        except StopIteration as stop:
            return self._finish_session(session, stop.value, event["ts"])
        except InconsistentAnswersError:
            # a non-robust cardinal respondent contradicted themselves across
            # equal-valued midpoints; the session cannot produce a ranking
            session.state = "failed"
            session.pending = None
            session.program = None
            return [{"ts": event["ts"], "type": "failed", "session": session.session_id}]
        return [self._query_event(session, event["ts"])]

    def _finish_session(self, session: SessionState, outcome, ts: str) -> list[dict]:
        if isinstance(outcome, ProgramOutcome):
            ranking, verified, fell_back = outcome.ranking, outcome.verified, outcome.fell_back
        else:
            ranking, verified, fell_back = outcome, False, False
        session.state = "completed"
        session.pending = None
        session.program = None
        session.result = ElicitReport(ranking, session.queries_used, verified, fell_back)
        poll = self._polls[session.poll_id]
        poll.completed_rankings.append(ranking)
        if poll.mode == "unknown-positions":
            if poll.known_vote is None:
                poll.known_vote = ranking
            if poll.robust and session.algorithm == "robust_other_vote":
                if verified:
                    poll.last_verified = ranking
                    poll.fallback_streak = 0
                elif fell_back:
                    poll.fallback_streak += 1
                    if poll.fallback_streak >= FALLBACK_SWITCH_STREAK and poll.last_verified is not None:
                        poll.known_vote = poll.last_verified
                        poll.fallback_streak = 0
        return [
            {
                "ts": ts,
                "type": "completed",
                "session": session.session_id,
                "result": {
                    "ranking": list(ranking.order),
                    "queries_used": session.queries_used,
                    "verified": verified,
                    "fell_back": fell_back,
                },
            }
        ]

    def _query_event(self, session: SessionState, ts: str) -> dict:
        return {
            "ts": ts,
            "type": "query",
            "session": session.session_id,
            "query": list(session.pending),
            "asked": session.queries_used,
        }

    # --- poll creation -------------------------------------------------------

    def _poll_from_spec(self, poll_id: str, spec: dict, created_at: str) -> PollState:
        names = AlternativeNames(tuple(spec["alternatives"]))
        axis = OrdinalAxis(tuple(names.id_of(n) for n in spec["axis"])) if spec.get("axis") else None
        layout = None
        if spec.get("positions"):
            layout = CardinalLayout(tuple(Fraction(spec["positions"][n]) for n in names.names))
        return PollState(
            poll_id=poll_id,
            name=spec["name"],
            names=names,
            mode=spec["mode"],
            robust=bool(spec.get("robust", False)),
            axis=axis,
            layout=layout,
            created_at=created_at,
            spec=spec,
        )

    def create_poll(self, request: dict) -> str:
        errors: dict[str, str] = {}
        name = request.get("name") or "poll"
        alternatives = request.get("alternatives") or []
        mode = request.get("mode")
        if not alternatives:
            errors["alternatives"] = "need at least one alternative"
        elif len(set(alternatives)) != len(alternatives):
            errors["alternatives"] = "alternative names must be unique"
        if mode not in MODES:
            errors["mode"] = f"mode must be one of {', '.join(MODES)}"
        axis = request.get("axis")
        positions = request.get("positions")
        if mode == "ordinal-known":
            if not axis:
                errors["axis"] = "ordinal-known polls need the axis"
            elif sorted(axis) != sorted(alternatives):
                errors["axis"] = "axis must order exactly the declared alternatives"
        elif axis:
            errors["axis"] = "axis only applies to ordinal-known polls"
        if mode == "cardinal-known":
            if not positions:
                errors["positions"] = "cardinal-known polls need positions"
            elif sorted(positions) != sorted(alternatives):
                errors["positions"] = "positions must cover exactly the declared alternatives"
            else:
                try:
                    values = {n: Fraction(v) for n, v in positions.items()}
                except (ValueError, ZeroDivisionError):
                    errors["positions"] = "positions must be decimal strings"
                else:
                    if len(set(values.values())) != len(values):
                        errors["positions"] = "cardinal positions must be pairwise distinct"
        elif positions:
            errors["positions"] = "positions only apply to cardinal-known polls"
        if errors:
            raise PollValidationError(errors)
        spec = {
            "name": name,
            "alternatives": list(alternatives),
            "mode": mode,
            "robust": bool(request.get("robust", False)),
            "axis": list(axis) if axis else None,
            "positions": {n: str(v) for n, v in positions.items()} if positions else None,
        }
        with self._lock:
            poll_id = self._new_id()
            self._commit({"ts": _now_iso(self._now()), "type": "created", "poll": poll_id, "spec": spec})
        return poll_id

    # --- session flow ----------------------------------------------------------

    def _poll(self, poll_id: str) -> PollState:
        try:
            return self._polls[poll_id]
        except KeyError:
            raise UnknownPollError(poll_id) from None

    def _session(self, session_id: str) -> SessionState:
        try:
            session = self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(session_id) from None
        if session.state == "awaiting-answer" and self._now() - session.last_activity > self._timeout:
            self._commit({"ts": _now_iso(self._now()), "type": "expired", "session": session_id})
        return session

    def _choose_algorithm(self, poll: PollState) -> tuple[str, Optional[Ranking]]:
        if poll.mode == "ordinal-known":
            return ("robust_positions" if poll.robust else "positions"), None
        if poll.mode == "cardinal-known":
            return ("robust_cardinal" if poll.robust else "cardinal"), None
        if poll.known_vote is None:
            return "sort", None
        return ("robust_other_vote" if poll.robust else "other_vote"), poll.known_vote

    def session_view(self, session: SessionState) -> dict:
        poll = self._polls[session.poll_id]
        if session.state == "completed":
            return {"done": True, "result": report_payload(session.result, poll.names)}
        if session.state == "failed":
            return {"failed": True, "error": "answers were mutually inconsistent; no ranking exists"}
        if session.state == "expired":
            raise WrongSessionStateError(f"session {session.session_id} expired")
        a, b = session.pending
        bound = base_bound(session.algorithm, poll.m)
        if session.queries_used >= bound:
            bound += mergesort_bound(poll.m)  # robust fallback engaged
        return {
            "query": {"left": poll.names.names[a], "right": poll.names.names[b]},
            "progress": {"asked": session.queries_used, "bound": bound},
        }

    def open_session(self, poll_id: str) -> tuple[str, dict]:
        with self._lock:
            poll = self._poll(poll_id)
            algorithm, kv = self._choose_algorithm(poll)
            session_id = self._new_id()
            self._commit(
                {
                    "ts": _now_iso(self._now()),
                    "type": "created",
                    "session": session_id,
                    "poll": poll_id,
                    "algorithm": algorithm,
                    "known_vote": list(kv.order) if kv else None,
                }
            )
            return session_id, self.session_view(self._sessions[session_id])

    def session_next(self, session_id: str) -> dict:
        with self._lock:
            return self.session_view(self._session(session_id))

    def submit_answer(self, session_id: str, prefer: str, asked: Optional[int] = None) -> dict:
        with self._lock:
            session = self._session(session_id)
            if session.state != "awaiting-answer":
                raise WrongSessionStateError(f"session {session_id} is {session.state}, not awaiting an answer")
            if prefer not in ("left", "right"):
                raise ValueError('prefer must be "left" or "right"')
            if asked is not None and asked != session.queries_used:
                raise WrongSessionStateError(
                    f"answer targets question {asked} but question {session.queries_used} is pending"
                )
            self._commit(
                {
                    "ts": _now_iso(self._now()),
                    "type": "answer",
                    "session": session_id,
                    "prefer": prefer,
                    "asked": session.queries_used,
                }
            )
            return self.session_view(session)

    def session_result(self, session_id: str) -> ElicitReport:
        with self._lock:
            session = self._session(session_id)
            if session.state != "completed":
                raise WrongSessionStateError(f"session {session_id} is {session.state}, not completed")
            return session.result

    def session_result_payload(self, session_id: str) -> dict:
        with self._lock:
            session = self._session(session_id)
            if session.state != "completed":
                raise WrongSessionStateError(f"session {session_id} is {session.state}, not completed")
            return report_payload(session.result, self._polls[session.poll_id].names)

    # --- aggregation -------------------------------------------------------------

    def poll_aggregate(self, poll_id: str) -> dict:
        with self._lock:
            poll = self._poll(poll_id)
            rankings = poll.completed_rankings
            if not rankings:
                raise NoCompletedSessionsError(poll_id)
            profile = Profile(tuple(rankings))
            margins = pairwise_matrix(profile).margins
            out = {
                "status": "partial",
                "margins": [list(row) for row in margins],
                "respondents": len(rankings),
            }
            if len(rankings) % 2 == 1:
                try:
                    agg = aggregate_ranking(profile)
                except CondorcetCycleError:
                    out["status"] = "cyclic"
                    return out
                out["status"] = "complete"
                out["ranking"] = [poll.names.names[a] for a in agg.order]
                out["winner"] = poll.names.names[agg.peak]
                if poll.axis is not None and all(is_single_peaked(r, poll.axis) for r in rankings):
                    # robust polls can collect non-single-peaked truths, for which
                    # the median of peaks is undefined; cross-check only otherwise
                    median = median_peak_winner(profile, poll.axis)
                    if median != agg.peak:
                        raise AssertionError(
                            "median-of-peaks disagrees with the pairwise winner on a single-peaked profile"
                        )
            return out


    # --- maintenance ----------------------------------------------------------------

    def compact(self) -> None:
        with self._lock:
            self._log.write_snapshot(self._snapshot_state(), self._log.count)

    def close(self) -> None:
        self._log.close()
