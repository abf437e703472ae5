"""Append-only JSONL event log plus a periodically compacted snapshot.

The log is the source of truth: every state transition is appended (and
flushed) before the caller sees a response, so replaying the log rebuilds
the service state after a crash. The snapshot only accelerates recovery;
the log is never truncated, keeping the full audit trail of every
comparison asked.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional


class EventLog:
    def __init__(self, root: str | Path, durable: bool = True):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.events_path = self.root / "events.jsonl"
        self.snapshot_path = self.root / "snapshot.json"
        self.durable = durable
        self._fh = open(self.events_path, "a", encoding="utf-8")
        self.count = sum(1 for _ in open(self.events_path, encoding="utf-8")) if self.events_path.stat().st_size else 0

    def append(self, events: list[dict]) -> int:
        """Write events as one durability unit; returns the new line count."""
        payload = "".join(json.dumps(e, ensure_ascii=False) + "\n" for e in events)
        self._fh.write(payload)
        self._fh.flush()
        if self.durable:
            os.fsync(self._fh.fileno())
        self.count += len(events)
        return self.count

    def read_events(self, skip: int = 0) -> list[dict]:
        out = []
        with open(self.events_path, encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                if i >= skip and line.strip():
                    out.append(json.loads(line))
        return out

    def write_snapshot(self, state: dict, applied: int) -> None:
        tmp = self.snapshot_path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump({"applied": applied, "state": state}, fh, ensure_ascii=False)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.snapshot_path)

    def read_snapshot(self) -> Optional[dict]:
        if not self.snapshot_path.exists():
            return None
        try:
            with open(self.snapshot_path, encoding="utf-8") as fh:
                return json.load(fh)
        except (json.JSONDecodeError, OSError):
            return None  # half-written snapshot: fall back to full replay

    def close(self) -> None:
        self._fh.close()
