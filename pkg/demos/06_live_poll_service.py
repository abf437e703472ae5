#!/usr/bin/env python3
"""The live poll engine, driven in-process.

The same generator programs that power the library entry points run here as
resumable conversations: each answer is persisted to an append-only event
log before the next question is issued, so a crashed server resumes every
open session on the identical pending question. `peakpoll serve` exposes
exactly this engine over HTTP for the browser client.
"""

import json
import tempfile

from peakpoll.pollsvc import PollService

data_dir = tempfile.mkdtemp(prefix="peakpoll-demo-")
service = PollService(data_dir)

poll_id = service.create_poll({
    "name": "team dinner",
    "alternatives": ["noodles", "tapas", "sushi", "bbq", "diner"],
    "mode": "ordinal-known",
    "axis": ["diner", "bbq", "noodles", "tapas", "sushi"],
    "robust": True,
})
print("poll:", poll_id)

respondents = [
    ["noodles", "tapas", "bbq", "sushi", "diner"],
    ["sushi", "tapas", "noodles", "bbq", "diner"],
    ["bbq", "noodles", "diner", "tapas", "sushi"],
]
for wishes in respondents:
    rank = {name: k for k, name in enumerate(wishes)}
    sid, view = service.open_session(poll_id)
    while "query" in view:
        q = view["query"]
        prefer = "left" if rank[q["left"]] < rank[q["right"]] else "right"
        view = service.submit_answer(sid, prefer, asked=view["progress"]["asked"])
    result = view["result"]
    print(f"   {sid}: {' > '.join(result['ranking'])}  "
          f"({result['queries_used']} questions, verified={result['verified']})")

print("\naggregate:", json.dumps(service.poll_aggregate(poll_id), indent=2))

print("\nsimulated crash: reopening the data directory mid-flight...")
sid, view = service.open_session(poll_id)
view = service.submit_answer(sid, "left")
revived = PollService(data_dir)
print("   pending before:", view["query"])
print("   pending after: ", revived.session_next(sid)["query"])
print("event log lives at", data_dir + "/events.jsonl")
