#!/usr/bin/env python3
"""Single-peaked preferences in five minutes.

Alternatives live on a left-to-right axis. A vote is single-peaked when,
walking down from its favorite, every next alternative extends a contiguous
window on that axis — no jumping over unranked neighbors.
"""

from peakpoll import (
    AlternativeNames,
    OrdinalAxis,
    Ranking,
    enumerate_single_peaked,
    format_axis,
    format_ranking,
    is_single_peaked,
    parse_axis,
    parse_ranking,
)

names = AlternativeNames(("a", "b", "c", "d", "e", "f"))
axis = parse_axis("d < b < e < f < a < c", names)
print("axis:", format_axis(axis, names))

good = parse_ranking("f > e > b > a > c > d", names)
bad = parse_ranking("f > e > a > d > c > b", names)
print(f"{format_ranking(good, names)}   single-peaked? {is_single_peaked(good, axis)}")
print(f"{format_ranking(bad, names)}   single-peaked? {is_single_peaked(bad, axis)}")
print("(the second vote ranks d above b, yet b sits between d and the peak f)")

print()
small = OrdinalAxis((0, 1, 2))  # a < b < c
population = enumerate_single_peaked(small)
print(f"every single-peaked vote on a 3-alternative line ({len(population)} of 3! = 6):")
tiny_names = AlternativeNames(("a", "b", "c"))
for vote in sorted(population, key=lambda r: r.order):
    print("  ", format_ranking(vote, tiny_names))

for m in range(1, 9):
    count = len(enumerate_single_peaked(OrdinalAxis(tuple(range(m)))))
    assert count == 2 ** (m - 1)
print("\ncounts follow 2^(m-1):", ", ".join(str(2 ** (m - 1)) for m in range(1, 9)))
