"""Simulation lab: random instances, adversarial worlds, experiment runner.

Randomness comes from Philox (counter-based) streams keyed by
(seed, experiment, m, cell), so any (m, run) cell can be regenerated in
isolation and reruns are byte-identical; frozen stream vectors live in the
test suite. The adversary half builds the interval worlds that force any
sound elicitor to ask every designated within-block pair, and the audit
harness turns that argument into an executable check.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .core import (
    AgentPosition,
    CardinalLayout,
    Oracle,
    OrdinalAxis,
    Ranking,
    TrueRankingOracle,
    is_single_peaked,
)
from .elicit import (
    ElicitationContext,
    cardinal_bound,
    find_ranking_given_cardinal_positions,
    find_ranking_given_other_vote,
    find_ranking_given_positions,
    mergesort_elicit,
    other_vote_bound,
    positions_bound,
    robust_elicit,
)

_U64 = 1 << 64


class RngStream:
    """Buffered uint64 stream off a Philox generator; all draws route here."""

    def __init__(self, entropy: Sequence[int], block: int = 1024):
        self._gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=tuple(entropy))))
        self._block = block
        self._buf = np.empty(0, dtype=np.uint64)
        self._pos = 0

    def _refill(self):
        self._buf = self._gen.integers(0, _U64, size=self._block, dtype=np.uint64, endpoint=False)
        self._pos = 0

    def u64(self) -> int:
        if self._pos >= len(self._buf):
            self._refill()
        v = int(self._buf[self._pos])
        self._pos += 1
        return v

    def u64_block(self, k: int) -> list[int]:
        out = []
        while k:
            if self._pos >= len(self._buf):
                self._refill()
            take = min(k, len(self._buf) - self._pos)
            out.extend(int(v) for v in self._buf[self._pos : self._pos + take])
            self._pos += take
            k -= take
        return out

    def below(self, n: int) -> int:
        """Unbiased uniform integer in [0, n) by single-word rejection."""
        limit = _U64 - (_U64 % n)
        while True:
            u = self.u64()
            if u < limit:
                return u % n

    def bit(self) -> int:
        return self.below(2)


_EXPERIMENT_TAGS = {"fig1": 1, "fig2": 2, "robust": 3, "adversary": 4}


def substream(seed: int, experiment: str, m: int, cell: int) -> RngStream:
    """The rng owned by one experiment cell; cell 0 is setup, runs start at 1."""
    return RngStream((seed, _EXPERIMENT_TAGS[experiment], m, cell))


# --- generators -----------------------------------------------------------------


def random_axis(m: int, rng: RngStream) -> OrdinalAxis:
    """Uniformly random axis via Fisher-Yates, draws taken high index first."""
    order = list(range(m))
    for i in range(m - 1, 0, -1):
        j = rng.below(i + 1)
        order[i], order[j] = order[j], order[i]
    return OrdinalAxis(tuple(order))


def random_sp_ranking(axis: OrdinalAxis, rng: RngStream) -> Ranking:
    """Uniform peak, then a uniform left/right choice wherever both interval
    extensions exist; no draw is consumed once one side is exhausted."""
    m = axis.m
    peak = rng.below(m)
    lo = hi = peak
    out = [axis.order[peak]]
    while len(out) < m:
        if lo > 0 and hi < m - 1:
            go_left = rng.bit() == 0
        else:
            go_left = lo > 0
        if go_left:
            lo -= 1
            out.append(axis.order[lo])
        else:
            hi += 1
            out.append(axis.order[hi])
    return Ranking(tuple(out))


def _midpoint_hit(nums: list[int], g: int) -> bool:
    # is 2g the sum of two distinct coordinates? (65-bit exact via carry split)
    from .elicit import _pair_indices

    arr = np.array(nums, dtype=np.uint64)
    ii, jj = _pair_indices(len(nums))
    sums = arr[ii] + arr[jj]
    carry = sums < arr[ii]
    target_low = np.uint64((2 * g) & (_U64 - 1))
    target_carry = g >= (1 << 63)
    return bool(np.any((sums == target_low) & (carry == target_carry)))


def random_cardinal_instance(m: int, rng: RngStream) -> tuple[CardinalLayout, AgentPosition, Ranking]:
    """Coordinates uniform on the 2^-64 grid of [0, 1); collisions and
    agent-on-midpoint draws are rejected and redrawn."""
    nums = rng.u64_block(m)
    seen = set()
    for i in range(m):
        while nums[i] in seen:
            nums[i] = rng.u64()
        seen.add(nums[i])
    g = rng.u64()
    while m > 1 and _midpoint_hit(nums, g):
        g = rng.u64()
    layout = CardinalLayout(tuple(Fraction(v, _U64) for v in nums))
    agent = Fraction(g, _U64)
    truth = Ranking(tuple(sorted(range(m), key=lambda a: abs(g - nums[a]))))
    return layout, agent, truth


def perturb_swap(truth: Ranking, rng: RngStream, swaps: int = 1) -> Ranking:
    """Swap an adjacent pair at a uniform rank, ``swaps`` times."""
    if truth.m < 2:
        raise ValueError("need at least two alternatives to swap")
    order = list(truth.order)
    for _ in range(swaps):
        k = rng.below(truth.m - 1)
        order[k], order[k + 1] = order[k + 1], order[k]
    return Ranking(tuple(order))


def perturb_to_non_single_peaked(truth: Ranking, axis: OrdinalAxis, rng: RngStream, swaps: int = 1) -> Ranking:
    """Redraw perturb_swap until the result is not single-peaked on ``axis``.

    A single adjacent swap can leave a vote single-peaked (swapping the top
    two always does), so experiments that need "deviant with probability
    alpha" exactly use this rejection form.
    """
    if truth.m < 3:
        raise ValueError("every ranking over fewer than 3 alternatives is single-peaked")
    while True:
        cand = perturb_swap(truth, rng, swaps)
        if not is_single_peaked(cand, axis):
            return cand


def random_non_sp_ranking(m: int, axis: OrdinalAxis, rng: RngStream) -> Ranking:
    """A uniformly random ranking that is not single-peaked on ``axis``.

    The deviant model matching the robustness analysis: agents that are not
    single-peaked have unrestricted preferences, rather than merely perturbed
    ones. Rejection is cheap (only 2^(m-1) of m! rankings are single-peaked).
    """
    if m < 3:
        raise ValueError("every ranking over fewer than 3 alternatives is single-peaked")
    while True:
        order = list(range(m))
        for i in range(m - 1, 0, -1):
            j = rng.below(i + 1)
            order[i], order[j] = order[j], order[i]
        cand = Ranking(tuple(order))
        if not is_single_peaked(cand, axis):
            return cand


# --- adversarial interval construction -------------------------------------------


def anchor(i: int) -> int:
    """Interval center of the i-th alternative (1-based): alternates sign and
    steps by 10 per block, so blocks are pairwise far apart."""
    return 10 * (-1) ** i * ((i + 1) // 2)


@dataclass
class AdversaryInstance:
    """Bookkeeping for the forced-query argument.

    Alternative id k (0-based) lives in [anchor(k+1) - 1, anchor(k+1) + 1];
    agents live in [-1, 1]. The designated pairs are (2t, 2t+1); ``queried``
    records which (pair, agent) comparisons have actually been asked.
    """

    m: int
    n: int
    queried: set[tuple[int, int]] = field(default_factory=set)

    def __post_init__(self):
        if self.m % 2 or self.m < 2:
            raise ValueError("the interval construction needs even m >= 2")
        if self.n < 1:
            raise ValueError("need at least one agent")

    @property
    def pair_count(self) -> int:
        return self.m // 2

    def pair_ids(self, t: int) -> tuple[int, int]:
        return 2 * t, 2 * t + 1

    def agents_asked(self, t: int) -> set[int]:
        return {j for (p, j) in self.queried if p == t}

    def ordinal_axis(self) -> OrdinalAxis:
        """The interval order: what a positions-aware elicitor would be given."""
        return OrdinalAxis(tuple(sorted(range(self.m), key=lambda k: anchor(k + 1))))

    def anchors_layout(self) -> CardinalLayout:
        return CardinalLayout(tuple(Fraction(anchor(k + 1)) for k in range(self.m)))


class AdversaryOracle(Oracle):
    """Answers for one agent: within a designated pair the lower id wins, and
    across blocks the nearer block wins; every designated ask is recorded."""

    __slots__ = ("instance", "agent")

    def __init__(self, instance: AdversaryInstance, agent: int):
        super().__init__(instance.m)
        self.instance = instance
        self.agent = agent

    def _decide(self, a, b):
        if a // 2 == b // 2:
            self.instance.queried.add((a // 2, self.agent))
            return a < b
        return a // 2 < b // 2


def adversary_oracle(instance: AdversaryInstance, agent: int) -> AdversaryOracle:
    return AdversaryOracle(instance, agent)


def base_world(instance: AdversaryInstance) -> tuple[CardinalLayout, tuple[AgentPosition, ...]]:
    """Every alternative at its anchor, every agent at -1: realizes exactly
    the answers the adversary gives."""
    return instance.anchors_layout(), (Fraction(-1),) * instance.n


def counterexample_full(
    instance: AdversaryInstance, pair: int, agent: int
) -> tuple[CardinalLayout, tuple[AgentPosition, ...]]:
    """A world consistent with everything asked so far in which ``agent``
    prefers the designated pair's higher id — so skipping that one question
    leaves the agent's ranking undetermined.

    The pair's lower-id alternative moves to the left edge of its interval
    and the probed agent moves to -1/10; by exact distance arithmetic every
    recorded answer still holds while the unasked comparison flips.
    """
    if not 0 <= pair < instance.pair_count:
        raise ValueError(f"pair index {pair} out of range")
    if (pair, agent) in instance.queried:
        raise ValueError(f"pair {pair} was already asked of agent {agent}; no counterexample exists")
    positions = [Fraction(anchor(k + 1)) for k in range(instance.m)]
    positions[2 * pair] -= 1
    agents = [Fraction(-1)] * instance.n
    agents[agent] = Fraction(-1, 10)
    return CardinalLayout(tuple(positions)), tuple(agents)


def counterexample_aggregate(
    instance: AdversaryInstance, pair: int, asked_agents: set[int]
) -> tuple[CardinalLayout, tuple[AgentPosition, ...]]:
    """A world consistent with asking only ``asked_agents`` about ``pair`` in
    which the pair's election flips: the unasked majority sits at -1/10 and
    prefers the higher id."""
    if instance.n % 2 == 0:
        raise ValueError("the aggregate argument needs an odd number of agents")
    if not 0 <= pair < instance.pair_count:
        raise ValueError(f"pair index {pair} out of range")
    if len(asked_agents) > (instance.n - 1) // 2:
        raise ValueError(
            f"{len(asked_agents)} agents asked is already a majority; the election cannot flip"
        )
    positions = [Fraction(anchor(k + 1)) for k in range(instance.m)]
    positions[2 * pair] -= 1
    agents = [Fraction(-1) if j in asked_agents else Fraction(-1, 10) for j in range(instance.n)]
    return CardinalLayout(tuple(positions)), tuple(agents)


def world_reproduces_transcripts(
    layout: CardinalLayout,
    agents: Sequence[AgentPosition],
    oracles: Sequence[Oracle],
    skip: Optional[tuple[int, int]] = None,
) -> bool:
    """Does the world's induced preference of every agent match every answer
    in every transcript? ``skip`` exempts one (pair, agent) comparison."""
    for j, oracle in enumerate(oracles):
        ranking = layout.ranking_for(agents[j])
        for a, b, ans in oracle.transcript:
            if skip is not None and a // 2 == b // 2 and (a // 2, j) == skip:
                continue
            if ranking.prefers(a, b) != ans:
                return False
    return True


# --- audit harness ---------------------------------------------------------------

Elicitor = Callable[[AdversaryInstance, Sequence[Oracle]], list[Ranking]]


@dataclass(frozen=True)
class AuditResult:
    caught: bool
    total_queries: int
    witness_pair: Optional[int] = None
    witness_agent: Optional[int] = None
    witness_world: Optional[tuple[CardinalLayout, tuple[AgentPosition, ...]]] = None


def audit_elicitor(m: int, n: int, elicitor: Elicitor) -> AuditResult:
    """Run an elicitor against the adversary and hunt for a consistent world
    contradicting its declarations.

    Any declaration made with a designated (pair, agent) comparison unasked is
    refutable: the base world and the flipped world both reproduce the whole
    transcript but disagree on that pair, so one of them disagrees with the
    declaration.
    """
    instance = AdversaryInstance(m, n)
    oracles = [AdversaryOracle(instance, j) for j in range(n)]
    declared = elicitor(instance, oracles)
    if len(declared) != n:
        raise ValueError("elicitor must declare one ranking per agent")
    total = sum(o.count for o in oracles)

    base_layout, base_agents = base_world(instance)
    if not world_reproduces_transcripts(base_layout, base_agents, oracles):
        raise AssertionError("adversary answers must be realizable by the all-anchors world")

    for t in range(instance.pair_count):
        for j in range(n):
            if (t, j) in instance.queried:
                continue
            flip = counterexample_full(instance, t, j)
            flip_truth = flip[0].ranking_for(flip[1][j])
            if declared[j] != flip_truth:
                return AuditResult(True, total, t, j, flip)
            return AuditResult(True, total, t, j, (base_layout, base_agents))

    wrong = any(declared[j] != base_layout.ranking_for(base_agents[j]) for j in range(n))
    return AuditResult(wrong, total)


def elicitor_sort_per_agent(instance: AdversaryInstance, oracles: Sequence[Oracle]) -> list[Ranking]:
    return [mergesort_elicit(o, instance.m).ranking for o in oracles]


def elicitor_positions_per_agent(instance: AdversaryInstance, oracles: Sequence[Oracle]) -> list[Ranking]:
    axis = instance.ordinal_axis()
    return [find_ranking_given_positions(o, axis).ranking for o in oracles]


def elicitor_known_vote_chain(instance: AdversaryInstance, oracles: Sequence[Oracle]) -> list[Ranking]:
    """First agent by full sort, every later agent from the previous vote."""
    out: list[Ranking] = []
    for j, oracle in enumerate(oracles):
        if j == 0:
            out.append(mergesort_elicit(oracle, instance.m).ranking)
        else:
            out.append(find_ranking_given_other_vote(oracle, out[-1]).ranking)
    return out


def elicitor_cheat_skip_pair(instance: AdversaryInstance, oracles: Sequence[Oracle]) -> list[Ranking]:
    """Full sort for everyone except the last agent, who is asked all
    designated pairs but the first and guessed from the block structure."""
    out = [mergesort_elicit(o, instance.m).ranking for o in oracles[:-1]]
    last = oracles[-1]
    for t in range(1, instance.pair_count):
        last.query(2 * t, 2 * t + 1)
    out.append(Ranking(tuple(range(instance.m))))  # assumes the unasked pair matches the others
    return out


NAMED_ELICITORS: dict[str, Elicitor] = {
    "sort_per_agent": elicitor_sort_per_agent,
    "positions_per_agent": elicitor_positions_per_agent,
    "known_vote_chain": elicitor_known_vote_chain,
    "cheat_skip_pair": elicitor_cheat_skip_pair,
}


# --- experiment runner -------------------------------------------------------------


def _doubling(lo: int, hi: int) -> tuple[int, ...]:
    out = []
    v = lo
    while v <= hi:
        out.append(v)
        v *= 2
    return tuple(out)


DEFAULT_M_VALUES = {
    "fig1": _doubling(8, 65536),
    "fig2": _doubling(8, 1024),
    "robust": (64,),
    "adversary": (8,),
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    m_values: tuple[int, ...] = ()
    runs_per_point: int = 5
    seed: int = 0
    alpha: Fraction = Fraction(1, 5)
    deviation: str = "shuffle"  # deviants are unrestricted; "swaps" for near-single-peaked ones
    swaps: int = 1

    def __post_init__(self):
        if self.experiment not in _EXPERIMENT_TAGS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not self.m_values:
            object.__setattr__(self, "m_values", DEFAULT_M_VALUES[self.experiment])
        if list(self.m_values) != sorted(set(self.m_values)):
            raise ValueError("m values must be strictly increasing")
        if self.runs_per_point < 1:
            raise ValueError("need at least one run per point")
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        if self.deviation not in ("shuffle", "swaps"):
            raise ValueError('deviation must be "shuffle" or "swaps"')


@dataclass(frozen=True)
class ExperimentRow:
    experiment: str
    m: int
    algorithm: str
    run: int
    seed: int
    queries: int
    correct: bool
    fell_back: Optional[bool] = None
    verified: Optional[bool] = None


class ExperimentVerificationError(AssertionError):
    def __init__(self, algorithm: str, seed: int, m: int, run: int):
        super().__init__(f"{algorithm} returned a wrong ranking (seed={seed}, m={m}, run={run})")


def _check(report_ranking: Ranking, truth: Ranking, algorithm: str, cfg: ExperimentConfig, m: int, run: int):
    if report_ranking != truth:
        raise ExperimentVerificationError(algorithm, cfg.seed, m, run)


def _fig1_rows(cfg: ExperimentConfig) -> list[ExperimentRow]:
    rows = []
    for m in cfg.m_values:
        for run in range(cfg.runs_per_point):
            rng = substream(cfg.seed, "fig1", m, run + 1)
            axis = random_axis(m, rng)
            first_vote = random_sp_ranking(axis, rng)
            truth = random_sp_ranking(axis, rng)
            runs = (
                ("given_positions", lambda o: find_ranking_given_positions(o, axis)),
                ("given_other_vote", lambda o: find_ranking_given_other_vote(o, first_vote)),
                ("mergesort", lambda o: mergesort_elicit(o, m)),
            )
            for name, go in runs:
                oracle = TrueRankingOracle(truth)
                report = go(oracle)
                _check(report.ranking, truth, name, cfg, m, run)
                rows.append(ExperimentRow("fig1", m, name, run, cfg.seed, report.queries_used, True))
    return rows


def _fig2_rows(cfg: ExperimentConfig) -> list[ExperimentRow]:
    rows = []
    for m in cfg.m_values:
        for run in range(cfg.runs_per_point):
            rng = substream(cfg.seed, "fig2", m, run + 1)
            layout, _agent, truth = random_cardinal_instance(m, rng)
            axis = layout.induced_axis()
            runs = (
                ("cardinal", lambda o: find_ranking_given_cardinal_positions(o, layout)),
                ("given_positions", lambda o: find_ranking_given_positions(o, axis)),
            )
            for name, go in runs:
                oracle = TrueRankingOracle(truth)
                report = go(oracle)
                _check(report.ranking, truth, name, cfg, m, run)
                rows.append(ExperimentRow("fig2", m, name, run, cfg.seed, report.queries_used, True))
    return rows


def _robust_rows(cfg: ExperimentConfig) -> list[ExperimentRow]:
    """One population per m; every agent is elicited twice, once from the
    axis and once from the previous agent's (true) vote. Agent 0 only seeds
    the chain and is not reported."""
    rows = []
    alpha_cut = int(cfg.alpha * _U64)
    for m in cfg.m_values:
        if m < 3:
            raise ValueError("robust experiment needs m >= 3 to have non-single-peaked votes")
        axis = random_axis(m, substream(cfg.seed, "robust", m, 0))
        prev_truth: Optional[Ranking] = None
        for agent in range(cfg.runs_per_point + 1):
            rng = substream(cfg.seed, "robust", m, agent + 1)
            truth = random_sp_ranking(axis, rng)
            if rng.u64() < alpha_cut:
                if cfg.deviation == "shuffle":
                    truth = random_non_sp_ranking(m, axis, rng)
                else:
                    truth = perturb_to_non_single_peaked(truth, axis, rng, cfg.swaps)
            if agent > 0:
                run = agent - 1
                rep = robust_elicit(TrueRankingOracle(truth), ElicitationContext(axis=axis))
                _check(rep.ranking, truth, "robust_axis", cfg, m, run)
                rows.append(ExperimentRow("robust", m, "robust_axis", run, cfg.seed,
                                          rep.queries_used, True, rep.fell_back, rep.verified))
                rep = robust_elicit(TrueRankingOracle(truth), ElicitationContext(known_vote=prev_truth))
                _check(rep.ranking, truth, "robust_prev_vote", cfg, m, run)
                rows.append(ExperimentRow("robust", m, "robust_prev_vote", run, cfg.seed,
                                          rep.queries_used, True, rep.fell_back, rep.verified))
            prev_truth = truth
    return rows


def _adversary_rows(cfg: ExperimentConfig) -> list[ExperimentRow]:
    rows = []
    n = cfg.runs_per_point
    for m in cfg.m_values:
        if m % 2:
            raise ValueError("adversary experiment needs even m")
        for name, elicitor in NAMED_ELICITORS.items():
            result = audit_elicitor(m, n, elicitor)
            rows.append(ExperimentRow("adversary", m, name, 0, cfg.seed,
                                      result.total_queries, not result.caught))
    return rows


def run_experiment(config: ExperimentConfig) -> list[ExperimentRow]:
    runner = {
        "fig1": _fig1_rows,
        "fig2": _fig2_rows,
        "robust": _robust_rows,
        "adversary": _adversary_rows,
    }[config.experiment]
    rows = runner(config)
    rows.sort(key=lambda r: (r.experiment, r.m, r.algorithm, r.run))
    return rows


# --- CSV emission ---------------------------------------------------------------------

CSV_HEADER = "experiment,m,algorithm,run,seed,queries,correct"
SUMMARY_HEADER = "experiment,m,algorithm,mean_queries,bound"

_BOUNDS: dict[str, Callable[[int], Optional[int]]] = {
    "given_positions": positions_bound,
    "given_other_vote": other_vote_bound,
    "cardinal": cardinal_bound,
    "mergesort": lambda m: None,
    "robust_axis": lambda m: positions_bound(m) + (m - 1),
    "robust_prev_vote": lambda m: other_vote_bound(m) + (m - 1),
}


def rows_to_csv(rows: Iterable[ExperimentRow]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in rows:
        buf.write(f"{r.experiment},{r.m},{r.algorithm},{r.run},{r.seed},{r.queries},{str(r.correct).lower()}\n")
    return buf.getvalue()


def _fmt_mean(total: int, count: int) -> str:
    if total % count == 0:
        return str(total // count)
    return f"{total / count:.6f}".rstrip("0").rstrip(".")


def rows_to_summary_csv(rows: Iterable[ExperimentRow]) -> str:
    groups: dict[tuple[str, int, str], list[int]] = {}
    for r in rows:
        groups.setdefault((r.experiment, r.m, r.algorithm), []).append(r.queries)
    buf = io.StringIO()
    buf.write(SUMMARY_HEADER + "\n")
    for (exp, m, algo), counts in sorted(groups.items()):
        bound = _BOUNDS.get(algo, lambda m: None)(m)
        buf.write(f"{exp},{m},{algo},{_fmt_mean(sum(counts), len(counts))},{'' if bound is None else bound}\n")
    return buf.getvalue()


def write_experiment_csvs(rows: Sequence[ExperimentRow], path: str) -> tuple[str, str]:
    """Write rows to ``path`` and the per-(m, algorithm) means next to it."""
    summary_path = path[: -len(".csv")] + ".summary.csv" if path.endswith(".csv") else path + ".summary.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rows_to_csv(rows))
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rows_to_summary_csv(rows))
    return path, summary_path
