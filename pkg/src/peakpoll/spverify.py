"""Profile aggregation and single-peaked consistency analysis.

Aggregation follows pairwise majorities: for single-peaked profiles with an
odd number of voters there are no cycles and no ties, so the majority
relation is itself a ranking, and its top equals the median of the voters'
peaks. Consistency analysis goes the other way: brute-force discovery of
axes a profile is single-peaked on, and an exact feasibility decision for
whether numeric coordinates could explain the profile.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional

from .core import AlternativeId, OrdinalAxis, Profile, Ranking, is_single_peaked

#: Largest m for brute-force axis discovery (m!/2 candidate axes).
AXIS_SEARCH_CAP = 8

#: Largest m + n for the exact realizability decision (one variable each).
FEASIBILITY_VARIABLE_CAP = 20


class EvenElectorateError(ValueError):
    """Pairwise aggregation needs an odd number of votes (no ties possible)."""


class CondorcetCycleError(RuntimeError):
    """The pairwise majorities contain a cycle; no consistent ranking exists."""


@dataclass(frozen=True)
class PairwiseMatrix:
    """Net pairwise support: margins[a][b] = #(a over b) - #(b over a)."""

    margins: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        m = len(self.margins)
        for a in range(m):
            if self.margins[a][a] != 0:
                raise ValueError("diagonal must be zero")
            for b in range(m):
                if self.margins[a][b] != -self.margins[b][a]:
                    raise ValueError("margins must be antisymmetric")
                if a != b and (abs(self.margins[a][b]) > self.n or (self.margins[a][b] - self.n) % 2):
                    raise ValueError("margin magnitude/parity inconsistent with n")

    @property
    def m(self) -> int:
        return len(self.margins)


def pairwise_matrix(profile: Profile) -> PairwiseMatrix:
    if profile.n == 0:
        raise ValueError("empty profile")
    m = profile.m
    margins = [[0] * m for _ in range(m)]
    for vote in profile.votes:
        ranks = vote._ranks
        for a in range(m):
            for b in range(a + 1, m):
                d = 1 if ranks[a] < ranks[b] else -1
                margins[a][b] += d
                margins[b][a] -= d
    return PairwiseMatrix(tuple(tuple(row) for row in margins), profile.n)


def aggregate_ranking(profile: Profile) -> Ranking:
    """The ranking that agrees with every pairwise election.

    Requires odd n (rules out ties). Raises CondorcetCycleError when the
    majority relation is not a strict total order, which signals a profile
    that is not single-peaked with respect to any common axis.
    """
    if profile.n % 2 == 0:
        raise EvenElectorateError(f"need an odd number of votes, got {profile.n}")
    margins = pairwise_matrix(profile).margins
    m = profile.m
    wins = [sum(1 for b in range(m) if margins[a][b] > 0) for a in range(m)]
    order = sorted(range(m), key=lambda a: -wins[a])
    for i, a in enumerate(order):
        for b in order[i + 1 :]:
            if margins[a][b] <= 0:
                raise CondorcetCycleError(f"pairwise majorities cycle around {a} and {b}")
    return Ranking(tuple(order))


def median_peak_winner(profile: Profile, axis: OrdinalAxis) -> AlternativeId:
    """The alternative at the median of the voters' peak positions.

    With multiplicity: a shared peak counts once per voter. For single-peaked
    profiles with odd n this is the Condorcet winner, i.e. the top of
    aggregate_ranking.
    """
    if profile.n % 2 == 0:
        raise EvenElectorateError(f"need an odd number of votes, got {profile.n}")
    for vote in profile.votes:
        if not is_single_peaked(vote, axis):
            raise ValueError("median-of-peaks needs every vote single-peaked on the axis")
    positions = sorted(axis.position_of(v.peak) for v in profile.votes)
    return axis.at(positions[(profile.n - 1) // 2])


def find_consistent_axes_bruteforce(
    profile: Profile, cap: int = AXIS_SEARCH_CAP, m: Optional[int] = None
) -> set[OrdinalAxis]:
    """Every axis (canonical orientation) all votes are single-peaked on.

    An axis and its reversal admit the same votes; the canonical one is the
    lexicographically smaller id sequence. Exhaustive, so capped.
    """
    if profile.n:
        m = profile.m
    elif m is None:
        raise ValueError("an empty profile needs an explicit alternative count")
    if m > cap:
        raise ValueError(f"m={m} exceeds brute-force cap {cap}")
    out = set()
    for perm in itertools.permutations(range(m)):
        if perm > perm[::-1]:
            continue
        axis = OrdinalAxis(perm)
        if all(is_single_peaked(v, axis) for v in profile.votes):
            out.add(axis)
    return out


# --- exact feasibility of cardinal explanations --------------------------------
#
# Variables: one coordinate per alternative (0..m-1) and one per voter
# (m..m+n-1). A voter j preferring a to b, with a left of b on the axis,
# means j sits left of their midpoint: 2*r_j - r(a) - r(b) < 0; preferring b
# means > 0. Axis order adds r(x) - r(y) < 0 for axis-adjacent x, y. The
# system is homogeneous, so strict feasibility is equivalent to feasibility
# of "<= -1" rows (scale any strict solution up), which Fourier-Motzkin
# elimination decides exactly over the integers.

Constraint = tuple[tuple[int, ...], int]  # (coefficients, rhs) meaning coeffs . x <= rhs


def _normalize(coeffs: tuple[int, ...], rhs: int) -> Constraint:
    g = 0
    for c in coeffs:
        g = gcd(g, c)
    g = gcd(g, rhs)
    if g > 1:
        coeffs = tuple(c // g for c in coeffs)
        rhs = rhs // g
    return coeffs, rhs


def fourier_motzkin_feasible(constraints: Iterable[Constraint], nvars: int) -> bool:
    """Decide whether integer-coefficient rows coeffs . x <= rhs admit a real solution."""
    rows = set()
    for coeffs, rhs in constraints:
        if any(coeffs):
            rows.add(_normalize(tuple(coeffs), rhs))
        elif rhs < 0:
            return False
    remaining = list(range(nvars))
    while remaining:
        # eliminate the variable producing the fewest pairings
        def cost(v):
            pos = sum(1 for c, _ in rows if c[v] > 0)
            neg = sum(1 for c, _ in rows if c[v] < 0)
            return pos * neg - pos - neg
        var = min(remaining, key=cost)
        remaining.remove(var)
        pos, neg, keep = [], [], set()
        for coeffs, rhs in rows:
            if coeffs[var] > 0:
                pos.append((coeffs, rhs))
            elif coeffs[var] < 0:
                neg.append((coeffs, rhs))
            else:
                keep.add((coeffs, rhs))
        for pc, pr in pos:
            for nc, nr in neg:
                scale_p = -nc[var]
                scale_n = pc[var]
                coeffs = tuple(scale_p * a + scale_n * b for a, b in zip(pc, nc))
                rhs = scale_p * pr + scale_n * nr
                if any(coeffs):
                    keep.add(_normalize(coeffs, rhs))
                elif rhs < 0:
                    return False
        rows = keep
    return all(rhs >= 0 for _, rhs in rows)


def realizability_constraints(profile: Profile, axis: OrdinalAxis) -> tuple[list[Constraint], int]:
    """The strict system as unit-margin rows, plus the variable count."""
    m, n = profile.m, profile.n
    nvars = m + n
    rows: list[Constraint] = []

    def row(pairs, rhs=-1):
        coeffs = [0] * nvars
        for var, c in pairs:
            coeffs[var] = c
        return tuple(coeffs), rhs

    for k in range(1, m):
        rows.append(row([(axis.at(k), 1), (axis.at(k + 1), -1)]))
    for j, vote in enumerate(profile.votes):
        rj = m + j
        for p1 in range(1, m):
            for p2 in range(p1 + 1, m + 1):
                a, b = axis.at(p1), axis.at(p2)
                if vote.prefers(a, b):
                    rows.append(row([(rj, 2), (a, -1), (b, -1)]))
                else:
                    rows.append(row([(rj, -2), (a, 1), (b, 1)]))
    return rows, nvars


def is_cardinally_realizable(profile: Profile, axis: OrdinalAxis) -> bool:
    """Can coordinates for alternatives and voters explain every vote by
    distance, with the alternatives laid out in axis order?

    False whenever some vote is not even ordinally single-peaked on the axis
    (a numeric explanation induces the ordinal one). Decided exactly; never a
    tolerance artifact.
    """
    if profile.m + profile.n > FEASIBILITY_VARIABLE_CAP:
        raise ValueError(
            f"{profile.m} alternatives + {profile.n} votes exceeds the "
            f"{FEASIBILITY_VARIABLE_CAP}-variable exact-elimination guard"
        )
    if any(not is_single_peaked(v, axis) for v in profile.votes):
        return False
    rows, nvars = realizability_constraints(profile, axis)
    return fourier_motzkin_feasible(rows, nvars)
