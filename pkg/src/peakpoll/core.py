"""Domain types for preference elicitation over a one-dimensional axis.

Alternatives are integer ids 0..m-1. A Ranking orders them best-first, an
OrdinalAxis orders them left-to-right, and a CardinalLayout pins each one to
an exact rational coordinate. Oracles answer strict pairwise comparison
queries and count every question asked; they are the only channel through
which elicitation algorithms may learn anything about an agent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

AlternativeId = int
AgentPosition = Fraction

#: Largest m accepted by enumerate_single_peaked (2^(m-1) rankings).
ENUMERATION_CAP = 12

_NIL = -1


class IndifferenceError(ValueError):
    """A comparison query was asked about a single alternative (a == b)."""


class InconsistentAnswersError(RuntimeError):
    """The oracle's answers cannot all be true of any one agent."""


@dataclass(frozen=True)
class Ranking:
    """A strict total order over alternatives 0..m-1, best first."""

    order: tuple[AlternativeId, ...]

    def __post_init__(self):
        m = len(self.order)
        if sorted(self.order) != list(range(m)):
            raise ValueError(f"ranking must be a permutation of 0..{m - 1}: {self.order}")

    @property
    def m(self) -> int:
        return len(self.order)

    @property
    def peak(self) -> AlternativeId:
        return self.order[0]

    def rank_of(self, a: AlternativeId) -> int:
        """1-based rank of alternative a (1 = most preferred)."""
        return self._ranks[a] + 1

    @property
    def _ranks(self) -> list[int]:
        # 0-based rank lookup, built lazily; frozen dataclass so stash in __dict__
        cached = self.__dict__.get("_ranks_cache")
        if cached is None:
            cached = [0] * len(self.order)
            for idx, a in enumerate(self.order):
                cached[a] = idx
            object.__setattr__(self, "_ranks_cache", cached)
        return cached

    def prefers(self, a: AlternativeId, b: AlternativeId) -> bool:
        return self._ranks[a] < self._ranks[b]

    def __iter__(self) -> Iterator[AlternativeId]:
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class OrdinalAxis:
    """Left-to-right positions of alternatives; position 1 is leftmost."""

    order: tuple[AlternativeId, ...]

    def __post_init__(self):
        m = len(self.order)
        if sorted(self.order) != list(range(m)):
            raise ValueError(f"axis must be a permutation of 0..{m - 1}: {self.order}")

    @property
    def m(self) -> int:
        return len(self.order)

    def at(self, position: int) -> AlternativeId:
        """Alternative at 1-based ordinal position."""
        if not 1 <= position <= len(self.order):
            raise IndexError(f"position {position} out of 1..{len(self.order)}")
        return self.order[position - 1]

    def position_of(self, a: AlternativeId) -> int:
        """1-based ordinal position of alternative a."""
        return self._positions[a] + 1

    @property
    def _positions(self) -> list[int]:
        cached = self.__dict__.get("_pos_cache")
        if cached is None:
            cached = [0] * len(self.order)
            for idx, a in enumerate(self.order):
                cached[a] = idx
            object.__setattr__(self, "_pos_cache", cached)
        return cached

    def reversed(self) -> "OrdinalAxis":
        return OrdinalAxis(tuple(reversed(self.order)))


@dataclass(frozen=True)
class CardinalLayout:
    """Exact rational coordinate for every alternative."""

    positions: tuple[Fraction, ...]  # indexed by alternative id

    def __post_init__(self):
        if len(set(self.positions)) != len(self.positions):
            raise ValueError("cardinal positions must be pairwise distinct")

    @property
    def m(self) -> int:
        return len(self.positions)

    def position(self, a: AlternativeId) -> Fraction:
        return self.positions[a]

    def induced_axis(self) -> OrdinalAxis:
        """Alternatives sorted by coordinate ascending."""
        return OrdinalAxis(tuple(sorted(range(self.m), key=self.positions.__getitem__)))

    def ranking_for(self, agent: AgentPosition) -> Ranking:
        """Sort alternatives by distance to the agent's coordinate.

        Raises InconsistentAnswersError-free ValueError if the agent sits on a
        midpoint (the induced order would contain a tie).
        """
        keyed = sorted((abs(agent - p), a) for a, p in enumerate(self.positions))
        for (d1, _), (d2, _) in zip(keyed, keyed[1:]):
            if d1 == d2:
                raise ValueError(f"agent at {agent} is equidistant from two alternatives")
        return Ranking(tuple(a for _, a in keyed))


@dataclass(frozen=True)
class Profile:
    """A sequence of votes over the same m alternatives."""

    votes: tuple[Ranking, ...]

    def __post_init__(self):
        if self.votes:
            m = self.votes[0].m
            for v in self.votes:
                if v.m != m:
                    raise ValueError("all votes in a profile must rank the same alternatives")

    @property
    def n(self) -> int:
        return len(self.votes)

    @property
    def m(self) -> int:
        if not self.votes:
            raise ValueError("empty profile has no alternative count")
        return self.votes[0].m


class Oracle:
    """Answers strict comparison queries about one agent's preferences.

    query(a, b) is True iff the agent strictly prefers a to b. Every call
    increments ``count`` and is appended to ``transcript``. Stateful: confine
    one oracle to one elicitation conversation at a time.
    """

    __slots__ = ("m", "count", "transcript")

    def __init__(self, m: int):
        self.m = m
        self.count = 0
        self.transcript: list[tuple[AlternativeId, AlternativeId, bool]] = []

    def query(self, a: AlternativeId, b: AlternativeId) -> bool:
        if a == b:
            raise IndifferenceError(f"query({a}, {a}): preferences are strict, indifference is undefined")
        if not (0 <= a < self.m and 0 <= b < self.m):
            raise ValueError(f"query({a}, {b}): ids must lie in 0..{self.m - 1}")
        ans = self._decide(a, b)
        self.count += 1
        self.transcript.append((a, b, ans))
        return ans

    def answer(self, a: AlternativeId, b: AlternativeId) -> bool:
        """Alias for query: True iff a is strictly preferred to b."""
        return self.query(a, b)

    def _decide(self, a: AlternativeId, b: AlternativeId) -> bool:
        raise NotImplementedError


def query(oracle: Oracle, a: AlternativeId, b: AlternativeId) -> bool:
    """Ask ``oracle`` whether the agent strictly prefers a to b."""
    return oracle.query(a, b)


class TrueRankingOracle(Oracle):
    """Simulated agent whose preferences are a fixed known ranking."""

    __slots__ = ("truth", "_ranks")

    def __init__(self, truth: Ranking):
        super().__init__(truth.m)
        self.truth = truth
        self._ranks = truth._ranks

    def _decide(self, a, b):
        return self._ranks[a] < self._ranks[b]


class CardinalAgentOracle(Oracle):
    """Simulated agent at an exact coordinate, ranking by distance."""

    __slots__ = ("layout", "agent")

    def __init__(self, layout: CardinalLayout, agent: AgentPosition):
        super().__init__(layout.m)
        self.layout = layout
        self.agent = Fraction(agent)

    def _decide(self, a, b):
        da = abs(self.agent - self.layout.positions[a])
        db = abs(self.agent - self.layout.positions[b])
        if da == db:
            raise IndifferenceError(
                f"agent at {self.agent} is equidistant from {a} and {b} (sits on their midpoint)"
            )
        return da < db


def make_true_ranking_oracle(truth: Ranking) -> TrueRankingOracle:
    return TrueRankingOracle(truth)


class MemoizingOracle(Oracle):
    """Serves repeated questions about an unordered pair from a cache.

    Only novel pairs are forwarded to the inner oracle; the wrapper's own
    count/transcript record forwarded queries only, so count still equals
    transcript length.
    """

    __slots__ = ("inner", "_cache")

    def __init__(self, inner: Oracle):
        super().__init__(inner.m)
        self.inner = inner
        self._cache: dict[tuple[int, int], bool] = {}  # (lo, hi) -> "lo preferred"

    def query(self, a, b):
        if a == b:
            raise IndifferenceError(f"query({a}, {a}): preferences are strict, indifference is undefined")
        key = (a, b) if a < b else (b, a)
        if key in self._cache:
            lo_pref = self._cache[key]
            return lo_pref if a < b else not lo_pref
        ans = self.inner.query(a, b)
        self._cache[key] = ans if a < b else not ans
        self.count += 1
        self.transcript.append((a, b, ans))
        return ans

    def seed(self, transcript: Iterable[tuple[AlternativeId, AlternativeId, bool]]) -> None:
        """Preload the cache with already-obtained answers."""
        for a, b, ans in transcript:
            key = (a, b) if a < b else (b, a)
            self._cache.setdefault(key, ans if a < b else not ans)


def make_memoizing_oracle(inner: Oracle) -> MemoizingOracle:
    return MemoizingOracle(inner)


def is_single_peaked(vote: Ranking, axis: OrdinalAxis) -> bool:
    """True iff every top-k prefix of the vote is a contiguous axis interval.

    Equivalently: walking the vote from the peak downward, each alternative
    extends the occupied interval by one step left or right.
    """
    if vote.m != axis.m:
        raise ValueError(f"vote over {vote.m} alternatives vs axis over {axis.m}")
    pos = axis._positions
    it = iter(vote.order)
    try:
        first = next(it)
    except StopIteration:
        return True
    lo = hi = pos[first]
    for a in it:
        p = pos[a]
        if p == lo - 1:
            lo = p
        elif p == hi + 1:
            hi = p
        else:
            return False
    return True


def enumerate_single_peaked(axis: OrdinalAxis, cap: int = ENUMERATION_CAP) -> set[Ranking]:
    """All rankings single-peaked w.r.t. ``axis``; there are exactly 2^(m-1).

    Generates by recursive interval extension (peak first, then extend left or
    right), not by filtering all m! permutations.
    """
    m = axis.m
    if m > cap:
        raise ValueError(f"m={m} exceeds enumeration cap {cap}")
    out: set[Ranking] = set()
    order = axis.order

    def extend(lo: int, hi: int, prefix: list[AlternativeId]):
        if len(prefix) == m:
            out.add(Ranking(tuple(prefix)))
            return
        if lo > 0:
            prefix.append(order[lo - 1])
            extend(lo - 1, hi, prefix)
            prefix.pop()
        if hi < m - 1:
            prefix.append(order[hi + 1])
            extend(lo, hi + 1, prefix)
            prefix.pop()

    for peak_pos in range(m):
        extend(peak_pos, peak_pos, [order[peak_pos]])
    return out


# --- text formats ------------------------------------------------------------
#
# Ranking:  names joined by " > "       e.g.  "c > e > b > f > a > d"
# Axis:     names joined by " < "       e.g.  "d < b < e < f < a < c"
# Profile file: first line "#alternatives: a,b,c,..." (declares the name←→id
# mapping), then one ranking per line, UTF-8, LF.


@dataclass(frozen=True)
class AlternativeNames:
    """Display names for alternatives; index in the tuple is the id."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("alternative names must be unique")
        for n in self.names:
            if not n or n != n.strip():
                raise ValueError(f"bad alternative name: {n!r}")

    @property
    def m(self) -> int:
        return len(self.names)

    def id_of(self, name: str) -> AlternativeId:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown alternative name: {name!r}") from None

    @property
    def _index(self) -> dict[str, int]:
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {n: i for i, n in enumerate(self.names)}
            object.__setattr__(self, "_index_cache", cached)
        return cached


def format_ranking(ranking: Ranking, names: AlternativeNames) -> str:
    return " > ".join(names.names[a] for a in ranking.order)


def parse_ranking(text: str, names: AlternativeNames) -> Ranking:
    parts = [p.strip() for p in text.strip().split(">")]
    return Ranking(tuple(names.id_of(p) for p in parts))


def format_axis(axis: OrdinalAxis, names: AlternativeNames) -> str:
    return " < ".join(names.names[a] for a in axis.order)


def parse_axis(text: str, names: AlternativeNames) -> OrdinalAxis:
    parts = [p.strip() for p in text.strip().split("<")]
    return OrdinalAxis(tuple(names.id_of(p) for p in parts))


def format_profile(profile: Profile, names: AlternativeNames) -> str:
    lines = ["#alternatives: " + ",".join(names.names)]
    lines.extend(format_ranking(v, names) for v in profile.votes)
    return "\n".join(lines) + "\n"


def parse_profile(text: str) -> tuple[Profile, AlternativeNames]:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines or not lines[0].startswith("#alternatives:"):
        raise ValueError('profile must start with "#alternatives: a,b,c,..."')
    names = AlternativeNames(tuple(n.strip() for n in lines[0].split(":", 1)[1].split(",")))
    votes = tuple(parse_ranking(ln, names) for ln in lines[1:])
    return Profile(votes), names
