"""Elicitation algorithms that reconstruct a ranking from comparison queries.

Each algorithm is written once, as a *program*: a generator that yields
(a, b) id pairs and receives back the boolean "a strictly preferred to b".
Programs are driven either by an Oracle (the library entry points below) or
one answer at a time by the poll service, so a live HTTP session and a
library call execute byte-identical query sequences.

Worst-case query counts:

    ranking_given_positions   m - 2 + ceil(log2 m)
    ranking_given_other_vote  4m - 6           (m >= 2)
    cardinal positions        2 ceil(log2 m)
    peak scan                 exactly m - 1
    verification chain        exactly m - 1
    mergesort baseline        m ceil(log2 m)

These hold structurally, for any consistent oracle, and are asserted after
every run.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Generator, Optional

import numpy as np


@lru_cache(maxsize=32)
def _pair_indices(m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(m, 1)

from .core import (
    AlternativeId,
    CardinalLayout,
    InconsistentAnswersError,
    Oracle,
    OrdinalAxis,
    Ranking,
)

Program = Generator[tuple[AlternativeId, AlternativeId], bool, object]

_NIL = -1


def ceil_log2(m: int) -> int:
    if m < 1:
        raise ValueError("m must be >= 1")
    return (m - 1).bit_length()


def positions_bound(m: int) -> int:
    """Worst case for ranking_given_positions."""
    return 0 if m == 1 else m - 2 + ceil_log2(m)


def other_vote_bound(m: int) -> int:
    """Worst case for ranking_given_other_vote."""
    return 0 if m == 1 else 4 * m - 6


def cardinal_bound(m: int) -> int:
    """Worst case for ranking_given_cardinal_positions."""
    return 2 * ceil_log2(m)


def mergesort_bound(m: int) -> int:
    return m * ceil_log2(m)


@dataclass(frozen=True)
class ElicitReport:
    """Outcome of one elicitation run."""

    ranking: Ranking
    queries_used: int
    verified: bool = False
    fell_back: bool = False

    def __post_init__(self):
        if self.verified and self.fell_back:
            raise ValueError("a verified report cannot also be a fallback")


@dataclass(frozen=True)
class ElicitationContext:
    """What the elicitor knows in advance: exactly one of the fields is set,
    or none of them (no prior knowledge, full sort required)."""

    axis: Optional[OrdinalAxis] = None
    known_vote: Optional[Ranking] = None
    cardinal: Optional[CardinalLayout] = None

    def __post_init__(self):
        if sum(x is not None for x in (self.axis, self.known_vote, self.cardinal)) > 1:
            raise ValueError("at most one of axis / known_vote / cardinal may be set")

    @property
    def kind(self) -> str:
        if self.axis is not None:
            return "axis"
        if self.known_vote is not None:
            return "known_vote"
        if self.cardinal is not None:
            return "cardinal"
        return "none"


def run_program(program: Program, oracle: Oracle):
    """Drive a program to completion against an oracle; return its result."""
    try:
        q = next(program)
        while True:
            q = program.send(oracle.query(*q))
    except StopIteration as stop:
        return stop.value


# --- peak search, positions known --------------------------------------------


def peak_position_program(axis: OrdinalAxis) -> Program:
    """Binary search for the agent's peak; returns its 1-based axis position.

    Each probe compares two axis-adjacent alternatives: if the left one is
    preferred the peak lies at or left of it, otherwise strictly right.
    """
    lo, hi = 1, axis.m
    while lo < hi:
        mid = (lo + hi) // 2
        if (yield (axis.at(mid), axis.at(mid + 1))):
            hi = mid
        else:
            lo = mid + 1
    return lo


def ranking_given_positions_program(axis: OrdinalAxis) -> Program:
    """Elicit a full ranking when the axis is known.

    After the peak, the next-ranked alternative is always one of the two
    interval frontiers; one query per step, and the surviving side is flushed
    query-free once the other end of the axis is reached.
    """
    m = axis.m
    t = yield from peak_position_program(axis)
    out = [axis.at(t)]
    lo, hi = t - 1, t + 1
    while lo >= 1 and hi <= m:
        if (yield (axis.at(lo), axis.at(hi))):
            out.append(axis.at(lo))
            lo -= 1
        else:
            out.append(axis.at(hi))
            hi += 1
    while lo >= 1:
        out.append(axis.at(lo))
        lo -= 1
    while hi <= m:
        out.append(axis.at(hi))
        hi += 1
    return Ranking(tuple(out))


# --- peak search and ranking, positions unknown -------------------------------


def peak_scan_program(m: int) -> Program:
    """Linear scan for the peak: exactly m - 1 queries, challenger asked first."""
    s = 0
    for a in range(1, m):
        if (yield (a, s)):
            s = a
    return s


def ranking_given_other_vote_program(known: Ranking) -> Program:
    """Elicit a full ranking given one other agent's complete vote.

    Phases: (1) linear peak scan; (2) one query per alternative the known
    vote ranks above the found peak s, against the known vote's own peak,
    marking the alternatives that lie between the two peaks; (3) seed the
    chain s > (marked, in reverse known-vote order) query-free; (4) integrate
    the rest in known-vote order — compare to the current tail first, and on
    disagreement walk c1 down the chain to the insertion point. The walk
    advances c1 one link per query, which is what caps the total at 4m - 6.
    """
    m = known.m
    v = known.order
    s = yield from peak_scan_program(m)

    between = [False] * m
    for i in range(2, known.rank_of(s)):
        a = v[i - 1]
        if (yield (a, v[0])):
            between[a] = True
    between[v[0]] = True

    nxt = [_NIL] * m
    c2 = s
    for i in range(m, 0, -1):
        a = v[i - 1]
        if between[a] and a != s:
            nxt[c2] = a
            c2 = a
    c1 = s

    for i in range(1, m + 1):
        a = v[i - 1]
        if between[a] or a == s:
            continue
        if (yield (c2, a)):
            nxt[c2] = a
            c2 = a
        else:
            # nil guard: on a non-single-peaked agent the walk may reach the
            # tail; terminate instead of running off the chain
            while nxt[c1] != _NIL and (yield (nxt[c1], a)):
                c1 = nxt[c1]
            nxt[a] = nxt[c1]
            nxt[c1] = a
            c1 = a

    out = []
    cur = s
    while cur != _NIL:
        out.append(cur)
        cur = nxt[cur]
    return Ranking(tuple(out))


# --- cardinal positions known --------------------------------------------------


def _scaled_positions(layout: CardinalLayout) -> tuple[int, list[int]]:
    """Coordinates as exact integers over their least common denominator."""
    denom = 1
    for p in layout.positions:
        denom = denom * p.denominator // gcd(denom, p.denominator)
    return denom, [p.numerator * (denom // p.denominator) for p in layout.positions]


class _SortedPairs:
    """Pairs (a, b), a < b by id, sorted by midpoint value ascending; lazy
    element access since a search touches only O(log m) of them.

    Equal-valued midpoints stay in ascending-(a, b) order (stable). Integer
    sort keys; vectorized when every scaled coordinate fits an unsigned
    64-bit word.
    """

    def __init__(self, m: int, scaled: list[int]):
        if m >= 16 and all(0 <= s < 1 << 64 for s in scaled):
            arr = np.array(scaled, dtype=np.uint64)
            ii, jj = _pair_indices(m)
            sums = arr[ii] + arr[jj]  # uint64 wraparound is intentional
            carry = sums < arr[ii]
            order = np.lexsort((sums, carry))
            self._ii = ii[order]
            self._jj = jj[order]
            self._count = len(order)
        else:
            pairs = [(a, b) for a in range(m) for b in range(a + 1, m)]
            pairs.sort(key=lambda p: scaled[p[0]] + scaled[p[1]])
            self._ii = [p[0] for p in pairs]
            self._jj = [p[1] for p in pairs]
            self._count = len(pairs)

    def __len__(self) -> int:
        return self._count

    def __getitem__(self, k: int) -> tuple[int, int]:
        return int(self._ii[k]), int(self._jj[k])


def cardinal_ranking_program(layout: CardinalLayout) -> Program:
    """Binary search over the sorted midpoints of all alternative pairs.

    A query about a pair reveals which side of the pair's midpoint the agent
    sits on; once the agent is bracketed between two adjacent midpoints, any
    interior point induces its full distance ranking. Sentinel midpoints one
    unit beyond each end keep the final estimate defined when the agent lies
    outside all midpoints. Queries are issued with the lower id first.
    """
    m = layout.m
    if m == 1:
        return Ranking((0,))

    denom, scaled = _scaled_positions(layout)
    pairs = _SortedPairs(m, scaled)

    def key(idx: int) -> int:
        # midpoint value of sorted entry idx, over denominator 2*denom;
        # sentinels sit one whole unit outside the real range
        if idx == 0:
            return key(1) - 2 * denom
        if idx == len(pairs) + 1:
            return key(len(pairs)) + 2 * denom
        a, b = pairs[idx - 1]
        return scaled[a] + scaled[b]

    lo, hi = 0, len(pairs) + 1
    while lo + 1 < hi:
        h = max(lo + 1, (lo + hi - 1) // 2)
        a, b = pairs[h - 1]
        prefer_a = yield (a, b)
        # the preferred alternative's side of the midpoint is the agent's side
        left_id = a if scaled[a] < scaled[b] else b
        agent_left = prefer_a == (left_id == a)
        if agent_left:
            hi = h
        else:
            lo = h

    if key(lo) >= key(hi):
        raise InconsistentAnswersError(
            "answers bracket the agent inside an empty midpoint interval; "
            "the agent is not cardinally single-peaked for this layout"
        )
    est = key(lo) + key(hi)  # agent estimate over denominator 4*denom
    dist = sorted((abs(est - 4 * scaled[a]), a) for a in range(m))
    for (d1, _), (d2, _) in zip(dist, dist[1:]):
        if d1 == d2:
            raise InconsistentAnswersError("agent estimate ties two alternatives")
    return Ranking(tuple(a for _, a in dist))


# --- baseline sort and verification -------------------------------------------


def mergesort_program(m: int) -> Program:
    """Comparison mergesort of ids by preference; left half = first ceil(k/2)."""

    def sort(ids: list[int]):
        if len(ids) <= 1:
            return ids
        mid = (len(ids) + 1) // 2
        left = yield from sort(ids[:mid])
        right = yield from sort(ids[mid:])
        merged = []
        i = j = 0
        while i < len(left) and j < len(right):
            if (yield (left[i], right[j])):
                merged.append(left[i])
                i += 1
            else:
                merged.append(right[j])
                j += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged

    order = yield from sort(list(range(m)))
    return Ranking(tuple(order))


def verify_chain_program(candidate: Ranking) -> Program:
    """Ask all m - 1 adjacent pairs of the candidate, in order.

    True iff every answer confirms the candidate; with transitivity that pins
    the agent's entire ranking, so True means candidate == truth.
    """
    ok = True
    order = candidate.order
    for k in range(len(order) - 1):
        confirmed = yield (order[k], order[k + 1])
        ok = ok and confirmed
    return ok


# --- robust wrapper -------------------------------------------------------------


@dataclass(frozen=True)
class ProgramOutcome:
    """What a session-level program hands back to its driver."""

    ranking: Ranking
    verified: bool
    fell_back: bool


def program_for_context(context: ElicitationContext, m: int) -> Program:
    kind = context.kind
    if kind == "axis":
        return ranking_given_positions_program(context.axis)
    if kind == "known_vote":
        return ranking_given_other_vote_program(context.known_vote)
    if kind == "cardinal":
        return cardinal_ranking_program(context.cardinal)
    return mergesort_program(m)


def robust_program(context: ElicitationContext, m: int, reuse: bool = True) -> Program:
    """Elicit as-if single-peaked, verify with the adjacent-pair chain, and on
    failure fall back to a full mergesort.

    With ``reuse`` (default) the fallback serves repeated pairs from the
    answers already collected, so only novel questions reach the agent;
    disabling it re-asks everything, reproducing memoization-free counts.
    """
    if context.kind == "none":
        raise ValueError("robust elicitation needs an axis, a known vote, or a cardinal layout")
    seen: dict[tuple[int, int], bool] = {}  # (lo, hi) -> "lo preferred"

    def pump(prog: Program):
        # re-yield a sub-program's queries, recording every answer
        try:
            q = next(prog)
        except StopIteration as stop:
            return stop.value
        while True:
            ans = yield q
            a, b = q
            seen[(a, b) if a < b else (b, a)] = ans if a < b else not ans
            try:
                q = prog.send(ans)
            except StopIteration as stop:
                return stop.value

    candidate: Optional[Ranking] = None
    try:
        candidate = yield from pump(program_for_context(context, m))
    except InconsistentAnswersError:
        candidate = None  # treat as a failed verification; fall back

    if candidate is not None:
        ok = yield from pump(verify_chain_program(candidate))
        if ok:
            return ProgramOutcome(candidate, verified=True, fell_back=False)

    merge = mergesort_program(m)
    try:
        q = next(merge)
        while True:
            a, b = q
            key = (a, b) if a < b else (b, a)
            if reuse and key in seen:
                ans = seen[key] if a < b else not seen[key]
            else:
                ans = yield q
                seen[key] = ans if a < b else not ans
            q = merge.send(ans)
    except StopIteration as stop:
        return ProgramOutcome(stop.value, verified=False, fell_back=True)


# --- oracle-driven entry points ---------------------------------------------------


def find_peak_given_positions(oracle: Oracle, axis: OrdinalAxis) -> int:
    """1-based axis position of the agent's peak; at most ceil(log2 m) queries."""
    start = oracle.count
    pos = run_program(peak_position_program(axis), oracle)
    assert oracle.count - start <= ceil_log2(axis.m)
    return pos


def find_ranking_given_positions(oracle: Oracle, axis: OrdinalAxis) -> ElicitReport:
    start = oracle.count
    ranking = run_program(ranking_given_positions_program(axis), oracle)
    used = oracle.count - start
    assert used <= positions_bound(axis.m)
    return ElicitReport(ranking, used)


def find_peak(oracle: Oracle, m: int) -> AlternativeId:
    """The agent's most preferred alternative, in exactly m - 1 queries."""
    start = oracle.count
    s = run_program(peak_scan_program(m), oracle)
    assert oracle.count - start == m - 1
    return s


def find_ranking_given_other_vote(oracle: Oracle, known_vote: Ranking) -> ElicitReport:
    start = oracle.count
    ranking = run_program(ranking_given_other_vote_program(known_vote), oracle)
    used = oracle.count - start
    assert used <= other_vote_bound(known_vote.m) or known_vote.m == 1
    return ElicitReport(ranking, used)


def find_ranking_given_cardinal_positions(oracle: Oracle, layout: CardinalLayout) -> ElicitReport:
    start = oracle.count
    ranking = run_program(cardinal_ranking_program(layout), oracle)
    used = oracle.count - start
    assert used <= cardinal_bound(layout.m)
    return ElicitReport(ranking, used)


def mergesort_elicit(oracle: Oracle, m: int) -> ElicitReport:
    start = oracle.count
    ranking = run_program(mergesort_program(m), oracle)
    used = oracle.count - start
    assert used <= mergesort_bound(m)
    return ElicitReport(ranking, used)


def verify_chain(oracle: Oracle, candidate: Ranking) -> bool:
    """Exactly m - 1 adjacent-pair queries; True iff candidate is the truth."""
    start = oracle.count
    ok = run_program(verify_chain_program(candidate), oracle)
    assert oracle.count - start == candidate.m - 1
    return ok


def robust_elicit(oracle: Oracle, context: ElicitationContext, reuse: bool = True) -> ElicitReport:
    start = oracle.count
    outcome = run_program(robust_program(context, oracle.m, reuse=reuse), oracle)
    return ElicitReport(
        outcome.ranking,
        oracle.count - start,
        verified=outcome.verified,
        fell_back=outcome.fell_back,
    )
