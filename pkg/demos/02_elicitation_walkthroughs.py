#!/usr/bin/env python3
"""The three elicitation algorithms, each on its classic worked instance.

Every algorithm talks to an oracle through strict pairwise comparisons only,
and each run prints the exact conversation: who was compared, what the agent
said, and how few questions sufficed.
"""

from fractions import Fraction

from peakpoll import (
    AlternativeNames,
    CardinalLayout,
    TrueRankingOracle,
    find_ranking_given_cardinal_positions,
    find_ranking_given_other_vote,
    find_ranking_given_positions,
    format_ranking,
    mergesort_elicit,
    parse_axis,
    parse_ranking,
)
from peakpoll.elicit import mergesort_bound, other_vote_bound, positions_bound


def show(names, oracle, report, bound):
    for k, (a, b, ans) in enumerate(oracle.transcript, 1):
        winner = names.names[a] if ans else names.names[b]
        print(f"   q{k}: {names.names[a]} vs {names.names[b]}  ->  {winner}")
    print(f"   => {format_ranking(report.ranking, names)}"
          f"   ({report.queries_used} queries, worst case {bound})")


names = AlternativeNames(("a", "b", "c", "d", "e", "f"))
truth = parse_ranking("f > e > b > a > c > d", names)

print("1) axis known: binary-search the peak, then race the two frontiers")
axis = parse_axis("d < b < e < f < a < c", names)
oracle = TrueRankingOracle(truth)
show(names, oracle, find_ranking_given_positions(oracle, axis), positions_bound(6))

print("\n2) axis unknown, one other vote known: scan for the peak, mark the")
print("   between-peak block, then weave the rest in the known vote's order")
known = parse_ranking("a > d > f > b > c > e", names)
agent = parse_ranking("c > e > b > f > a > d", names)
oracle = TrueRankingOracle(agent)
show(names, oracle, find_ranking_given_other_vote(oracle, known), other_vote_bound(6))

print("\n3) numeric coordinates known: binary-search the sorted pair midpoints;")
print("   logarithmically many questions pin the agent's whole ranking")
five = AlternativeNames(("a", "b", "c", "d", "e"))
layout = CardinalLayout(tuple(Fraction(s) for s in ("0.46", "0.92", "0.42", "0.78", "0.02")))
agent5 = parse_ranking("a > c > d > b > e", five)
oracle = TrueRankingOracle(agent5)
show(five, oracle, find_ranking_given_cardinal_positions(oracle, layout), 2 * 3)

print("\n4) knowing nothing, a comparison sort is the only option")
oracle = TrueRankingOracle(truth)
show(names, oracle, mergesort_elicit(oracle, 6), mergesort_bound(6))
