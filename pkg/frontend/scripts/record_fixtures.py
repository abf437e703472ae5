#!/usr/bin/env python3
"""Record real wire traffic into JSON fixtures for the frontend's contract stubs.

Run from the repo root after installing the Python package:

    python3 frontend/scripts/record_fixtures.py
"""

import itertools
import json
import pathlib

from fastapi.testclient import TestClient

from peakpoll.pollsvc import PollService
from peakpoll.pollsvc.api import create_app
from peakpoll.simlab import random_axis, random_sp_ranking, substream

OUT = pathlib.Path(__file__).parent.parent / "tests" / "fixtures"


def client(tmp):
    counter = itertools.count()
    svc = PollService(tmp, durable=False, id_factory=lambda: f"fx{next(counter):03d}")
    return TestClient(create_app(svc))


def record_ordinal10(tmp):
    m = 10
    names = [f"alt{k}" for k in range(m)]
    stream = substream(13, "fig1", m, 1)
    axis = random_axis(m, stream)
    truth = random_sp_ranking(axis, stream)
    rank = {names[a]: truth.rank_of(a) for a in range(m)}

    c = client(tmp)
    poll_req = {"name": "contract poll", "alternatives": names, "mode": "ordinal-known",
                "axis": [names[a] for a in axis.order], "robust": False}
    pid = c.post("/polls", json=poll_req).json()["poll_id"]
    opened = c.post(f"/polls/{pid}/sessions").json()
    sid = opened["session_id"]
    view = {k: v for k, v in opened.items() if k != "session_id"}
    steps = []
    while "query" in view:
        q = view["query"]
        prefer = "left" if rank[q["left"]] < rank[q["right"]] else "right"
        nxt = c.post(f"/sessions/{sid}/answer", json={"prefer": prefer, "asked": view["progress"]["asked"]}).json()
        steps.append({"view": view, "answer": prefer, "asked": view["progress"]["asked"]})
        view = nxt
    result = c.get(f"/sessions/{sid}/result").json()
    fixture = {
        "poll_request": poll_req,
        "poll_id": pid,
        "session_id": sid,
        "steps": steps,
        "final_view": view,
        "result": result,
    }
    (OUT / "ordinal10.json").write_text(json.dumps(fixture, indent=2) + "\n")
    print(f"ordinal10: {len(steps)} questions, result {result['ranking'][:3]}...")


def record_aggregate3(tmp):
    c = client(tmp)
    names = ["a", "b", "c", "d"]
    pid = c.post("/polls", json={"name": "agg", "alternatives": names,
                                 "mode": "unknown-positions"}).json()["poll_id"]
    votes = [["b", "c", "a", "d"], ["c", "d", "b", "a"], ["a", "b", "c", "d"]]
    snapshots = []
    for truth in votes:
        rank = {n: i for i, n in enumerate(truth)}
        body = c.post(f"/polls/{pid}/sessions").json()
        sid, view = body["session_id"], body
        while "query" in view:
            q = view["query"]
            prefer = "left" if rank[q["left"]] < rank[q["right"]] else "right"
            view = c.post(f"/sessions/{sid}/answer", json={"prefer": prefer, "asked": view["progress"]["asked"]}).json()
        snapshots.append(c.get(f"/polls/{pid}/aggregate").content.decode())
    fixture = {"poll_id": pid, "aggregate_after_1": snapshots[0],
               "aggregate_after_2": snapshots[1], "aggregate_after_3": snapshots[2]}
    (OUT / "aggregate3.json").write_text(json.dumps(fixture, indent=2) + "\n")
    print("aggregate3 final:", snapshots[2])


if __name__ == "__main__":
    import tempfile

    record_ordinal10(tempfile.mkdtemp())
    record_aggregate3(tempfile.mkdtemp())
