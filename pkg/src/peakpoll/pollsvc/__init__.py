"""Live elicitation service: event-sourced poll/session engine, HTTP API, CLI."""

from .service import (
    NoCompletedSessionsError,
    PollService,
    PollValidationError,
    UnknownPollError,
    UnknownSessionError,
    WrongSessionStateError,
    canonical_report_bytes,
    report_payload,
)
from .store import EventLog

__all__ = [
    "EventLog",
    "NoCompletedSessionsError",
    "PollService",
    "PollValidationError",
    "UnknownPollError",
    "UnknownSessionError",
    "WrongSessionStateError",
    "canonical_report_bytes",
    "report_payload",
]
