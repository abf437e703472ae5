#!/usr/bin/env python3
"""Why nm/2 questions are unavoidable, shown as an executable audit.

The adversary pins alternative k inside the interval [anchor-1, anchor+1]
with the anchors alternating far to the left and right, and keeps every
agent inside [-1, 1]. Consecutive pairs (a odd-block, its partner) are then
so finely balanced that only asking decides them: for any skipped pair the
adversary exhibits exact coordinates that agree with every answer given and
still flip the skipped comparison.
"""

from peakpoll.simlab import (
    NAMED_ELICITORS,
    AdversaryInstance,
    adversary_oracle,
    audit_elicitor,
    base_world,
    counterexample_full,
)

m, n = 8, 3
inst = AdversaryInstance(m, n)
print("interval centers:", [int(p) for p in inst.anchors_layout().positions])

oracles = [adversary_oracle(inst, j) for j in range(n)]
for t in range(m // 2):
    for j in range(n):
        if (t, j) != (0, 2):  # leave one designated comparison unasked
            oracles[j].query(2 * t, 2 * t + 1)
print(f"asked {sum(o.count for o in oracles)} designated comparisons, skipped pair 0 for agent 2")

layout, agents = counterexample_full(inst, 0, 2)
base_layout, base_agents = base_world(inst)
print("base world answer for the skipped pair:",
      "first" if base_layout.ranking_for(base_agents[2]).prefers(0, 1) else "second")
print("flip world answer for the skipped pair:",
      "first" if layout.ranking_for(agents[2]).prefers(0, 1) else "second")
print("both worlds reproduce every answer actually given, so the skipped")
print("comparison is genuinely undetermined.\n")

print("auditing elicitation strategies against the adversary (m=8, n=3):")
for name, elicitor in NAMED_ELICITORS.items():
    result = audit_elicitor(8, 3, elicitor)
    verdict = "CAUGHT" if result.caught else "sound"
    print(f"   {name:>20}: {verdict:7} after {result.total_queries} queries")
