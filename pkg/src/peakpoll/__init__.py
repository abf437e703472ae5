"""peakpoll: query-efficient elicitation and aggregation of single-peaked preferences."""

from .core import (
    AgentPosition,
    AlternativeId,
    AlternativeNames,
    CardinalAgentOracle,
    CardinalLayout,
    IndifferenceError,
    InconsistentAnswersError,
    MemoizingOracle,
    Oracle,
    OrdinalAxis,
    Profile,
    Ranking,
    TrueRankingOracle,
    enumerate_single_peaked,
    format_axis,
    format_profile,
    format_ranking,
    is_single_peaked,
    make_memoizing_oracle,
    make_true_ranking_oracle,
    parse_axis,
    parse_profile,
    parse_ranking,
    query,
)
from .elicit import (
    ElicitReport,
    ElicitationContext,
    find_peak,
    find_peak_given_positions,
    find_ranking_given_cardinal_positions,
    find_ranking_given_other_vote,
    find_ranking_given_positions,
    mergesort_elicit,
    robust_elicit,
    verify_chain,
)

__all__ = [name for name in dir() if not name.startswith("_")]
