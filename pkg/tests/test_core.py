"""Core types, oracles, and single-peakedness checks."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from peakpoll.core import (
    AlternativeNames,
    CardinalAgentOracle,
    CardinalLayout,
    IndifferenceError,
    MemoizingOracle,
    OrdinalAxis,
    Profile,
    Ranking,
    TrueRankingOracle,
    enumerate_single_peaked,
    format_axis,
    format_profile,
    format_ranking,
    is_single_peaked,
    parse_axis,
    parse_profile,
    parse_ranking,
    query,
)
from peakpoll.elicit import find_ranking_given_other_vote

# Letters a..f map to ids 0..5 throughout.
A, B, C, D, E, F = range(6)

# Axis d < b < e < f < a < c with the single-peaked vote f > e > b > a > c > d
# and the non-single-peaked vote f > e > a > d > c > b.
AXIS_DBEFAC = OrdinalAxis((D, B, E, F, A, C))
VOTE_FEBACD = Ranking((F, E, B, A, C, D))
VOTE_FEADCB = Ranking((F, E, A, D, C, B))


def rankings(m):
    return st.permutations(range(m)).map(lambda p: Ranking(tuple(p)))


def axes(m):
    return st.permutations(range(m)).map(lambda p: OrdinalAxis(tuple(p)))


class TestRankingAndAxis:
    def test_ranking_rank_of_is_one_based(self):
        r = Ranking((C, E, B, F, A, D))
        assert r.rank_of(C) == 1
        assert r.rank_of(D) == 6
        assert r.peak == C

    def test_ranking_must_be_permutation(self):
        with pytest.raises(ValueError):
            Ranking((0, 0, 1))

    def test_axis_positions_are_one_based(self):
        assert AXIS_DBEFAC.at(1) == D
        assert AXIS_DBEFAC.at(6) == C
        assert AXIS_DBEFAC.position_of(F) == 4

    def test_cardinal_layout_rejects_duplicates(self):
        with pytest.raises(ValueError):
            CardinalLayout((Fraction(1, 2), Fraction(1, 2)))

    def test_cardinal_layout_induced_axis_sorts_by_position(self):
        layout = CardinalLayout((Fraction("0.46"), Fraction("0.92"), Fraction("0.42"),
                                 Fraction("0.78"), Fraction("0.02")))
        assert layout.induced_axis().order == (E, C, A, D, B)

    def test_profile_rejects_mismatched_sizes(self):
        with pytest.raises(ValueError):
            Profile((Ranking((0, 1)), Ranking((0, 1, 2))))


class TestOracle:
    def test_query_true_for_preferred(self):
        oracle = TrueRankingOracle(Ranking((C, E, B, F, A, D)))
        assert query(oracle, C, D) is True
        assert oracle.count == 1

    def test_cardinal_agent_prefers_closer(self):
        # agent at .52 with r(b)=.92 and r(e)=.02 prefers b
        layout = CardinalLayout((Fraction("0.46"), Fraction("0.92"), Fraction("0.42"),
                                 Fraction("0.78"), Fraction("0.02")))
        oracle = CardinalAgentOracle(layout, Fraction("0.52"))
        assert oracle.query(B, E) is True

    def test_identical_arguments_rejected(self):
        oracle = TrueRankingOracle(Ranking((0, 1)))
        with pytest.raises(IndifferenceError):
            oracle.query(1, 1)
        assert oracle.count == 0

    def test_two_alternative_truth(self):
        oracle = TrueRankingOracle(Ranking((0, 1)))
        assert oracle.query(0, 1) is True
        assert oracle.count == 1

    def test_known_vote_example_query(self):
        oracle = TrueRankingOracle(VOTE_FEBACD)
        assert oracle.query(E, F) is False

    @given(rankings(6), st.integers(0, 5), st.integers(0, 5))
    def test_strictness_symmetry(self, truth, a, b):
        if a == b:
            return
        oracle = TrueRankingOracle(truth)
        assert oracle.query(a, b) == (not oracle.query(b, a))

    @given(rankings(5))
    def test_all_pairs_reconstruct_truth(self, truth):
        oracle = TrueRankingOracle(truth)
        wins = [0] * truth.m
        for a, b in itertools.combinations(range(truth.m), 2):
            if oracle.query(a, b):
                wins[a] += 1
            else:
                wins[b] += 1
        rebuilt = Ranking(tuple(sorted(range(truth.m), key=lambda x: -wins[x])))
        assert rebuilt == truth
        assert oracle.count == truth.m * (truth.m - 1) // 2
        assert len(oracle.transcript) == oracle.count


class TestMemoizingOracle:
    def test_repeat_served_from_cache(self):
        inner = TrueRankingOracle(Ranking((0, 1, 2)))
        memo = MemoizingOracle(inner)
        memo.query(0, 1)
        memo.query(0, 1)
        assert inner.count == 1
        assert memo.count == 1

    def test_reverse_served_negated(self):
        inner = TrueRankingOracle(Ranking((0, 1, 2)))
        memo = MemoizingOracle(inner)
        first = memo.query(0, 1)
        second = memo.query(1, 0)
        assert inner.count == 1
        assert second == (not first)

    def test_wrapping_known_vote_elicitation_never_costs_more(self):
        known = Ranking((A, D, F, B, C, E))
        truth = Ranking((C, E, B, F, A, D))
        plain = TrueRankingOracle(truth)
        find_ranking_given_other_vote(plain, known)
        wrapped_inner = TrueRankingOracle(truth)
        find_ranking_given_other_vote(MemoizingOracle(wrapped_inner), known)
        assert wrapped_inner.count <= plain.count
        assert wrapped_inner.count < plain.count  # this run repeats a pair


class TestSinglePeaked:
    def test_single_peaked_example(self):
        assert is_single_peaked(VOTE_FEBACD, AXIS_DBEFAC) is True

    def test_non_single_peaked_example(self):
        assert is_single_peaked(VOTE_FEADCB, AXIS_DBEFAC) is False

    @pytest.mark.parametrize("m", [1, 2])
    def test_tiny_votes_always_single_peaked(self, m):
        for vote in itertools.permutations(range(m)):
            for axis in itertools.permutations(range(m)):
                assert is_single_peaked(Ranking(vote), OrdinalAxis(axis))

    @given(st.integers(2, 7).flatmap(lambda m: st.tuples(rankings(m), axes(m))))
    def test_reversal_invariance(self, vote_axis):
        vote, axis = vote_axis
        assert is_single_peaked(vote, axis) == is_single_peaked(vote, axis.reversed())

    def test_mismatched_sizes_rejected(self):
        with pytest.raises(ValueError):
            is_single_peaked(Ranking((0, 1)), OrdinalAxis((0, 1, 2)))


class TestEnumerateSinglePeaked:
    def test_single_alternative(self):
        assert enumerate_single_peaked(OrdinalAxis((0,))) == {Ranking((0,))}

    def test_three_alternatives_on_line(self):
        got = enumerate_single_peaked(OrdinalAxis((A, B, C)))
        expected = {
            Ranking((A, B, C)),
            Ranking((B, A, C)),
            Ranking((B, C, A)),
            Ranking((C, B, A)),
        }
        assert got == expected

    @pytest.mark.parametrize("m", range(1, 9))
    def test_count_matches_brute_force_filter(self, m):
        axis = OrdinalAxis(tuple(range(m)))
        fast = enumerate_single_peaked(axis)
        brute = {
            Ranking(p)
            for p in itertools.permutations(range(m))
            if is_single_peaked(Ranking(p), axis)
        }
        assert fast == brute
        assert len(fast) == 2 ** (m - 1)

    def test_cap_enforced(self):
        with pytest.raises(ValueError):
            enumerate_single_peaked(OrdinalAxis(tuple(range(13))))


class TestTextFormats:
    NAMES = AlternativeNames(("a", "b", "c", "d", "e", "f"))

    def test_ranking_roundtrip(self):
        text = "c > e > b > f > a > d"
        r = parse_ranking(text, self.NAMES)
        assert r == Ranking((C, E, B, F, A, D))
        assert format_ranking(r, self.NAMES) == text

    def test_axis_roundtrip(self):
        text = "d < b < e < f < a < c"
        axis = parse_axis(text, self.NAMES)
        assert axis == AXIS_DBEFAC
        assert format_axis(axis, self.NAMES) == text

    def test_profile_roundtrip(self):
        names = AlternativeNames(("a", "b", "c", "d"))
        profile = Profile((
            Ranking((B, C, A, D)),
            Ranking((C, D, B, A)),
            Ranking((A, B, C, D)),
        ))
        text = format_profile(profile, names)
        assert text.startswith("#alternatives: a,b,c,d\n")
        parsed, parsed_names = parse_profile(text)
        assert parsed == profile
        assert parsed_names == names

    def test_profile_without_header_rejected(self):
        with pytest.raises(ValueError):
            parse_profile("a > b\n")


class TestCardinalImpliesOrdinal:
    @given(st.data())
    def test_distance_rankings_single_peaked_on_induced_axis(self, data):
        m = data.draw(st.integers(2, 8))
        positions = data.draw(st.lists(st.integers(0, 10**6), min_size=m, max_size=m, unique=True))
        layout = CardinalLayout(tuple(Fraction(p, 10**6) for p in positions))
        agent = Fraction(data.draw(st.integers(0, 2 * 10**6)), 2 * 10**6)
        try:
            ranking = layout.ranking_for(agent)
        except ValueError:
            return  # agent sat on a midpoint; no strict ranking exists
        assert is_single_peaked(ranking, layout.induced_axis())


class TestMemoizerFidelity:
    @given(rankings(6), st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=40))
    def test_cached_answers_always_match_the_agent(self, truth, script):
        memo = MemoizingOracle(TrueRankingOracle(truth))
        reference = TrueRankingOracle(truth)
        for a, b in script:
            if a == b:
                continue
            assert memo.query(a, b) == reference.query(a, b)
        assert memo.count == len(memo.transcript) <= reference.count
