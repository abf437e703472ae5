"""peakpoll command line.

    peakpoll simulate  --experiment fig1|fig2|robust|adversary --m 8,16 --runs 5 --seed S --alpha A --out FILE
    peakpoll elicit    --mode positions|cardinal|vote|sort ... [--interactive]
    peakpoll check     --profile FILE [--axis "a < b < c"] [--cardinal]
    peakpoll aggregate --profile FILE [--axis "a < b < c"]
    peakpoll adversary --m M --n N [--audit ELICITOR]
    peakpoll serve     --port P --data DIR        (PEAKPOLL_DATA overrides --data)

The interactive elicit loop asks one comparison at a time on the terminal;
without --interactive it reads l/r lines from stdin, which makes scripted
replays trivial.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from ..core import (
    AlternativeNames,
    Oracle,
    format_axis,
    format_ranking,
    parse_axis,
    parse_profile,
    parse_ranking,
)
from ..elicit import ElicitationContext
from ..simlab import (
    NAMED_ELICITORS,
    ExperimentConfig,
    audit_elicitor,
    run_experiment,
    write_experiment_csvs,
)
from ..spverify import (
    CondorcetCycleError,
    EvenElectorateError,
    aggregate_ranking,
    find_consistent_axes_bruteforce,
    is_cardinally_realizable,
    median_peak_winner,
    pairwise_matrix,
)


class _TerminalOracle(Oracle):
    """Routes comparison queries to a human (or a piped l/r script)."""

    def __init__(self, names: AlternativeNames, interactive: bool):
        super().__init__(names.m)
        self.names = names
        self.interactive = interactive

    def _decide(self, a, b):
        prompt = f"[{self.count + 1}] {self.names.names[a]} (l)  vs  {self.names.names[b]} (r)? "
        while True:
            if self.interactive:
                answer = input(prompt).strip().lower()
            else:
                line = sys.stdin.readline()
                if not line:
                    raise EOFError("ran out of scripted answers")
                answer = line.strip().lower()
            if answer in ("l", "left"):
                return True
            if answer in ("r", "right"):
                return False
            if self.interactive:
                print("  please answer l or r")
            else:
                raise ValueError(f"scripted answer must be l or r, got {answer!r}")


def _cmd_simulate(args) -> int:
    m_values = tuple(int(v) for v in args.m.split(",")) if args.m else ()
    config = ExperimentConfig(
        experiment=args.experiment,
        m_values=m_values,
        runs_per_point=args.runs,
        seed=args.seed,
        alpha=Fraction(args.alpha),
        deviation=args.deviation,
        swaps=args.swaps,
    )
    rows = run_experiment(config)
    path, summary = write_experiment_csvs(rows, args.out)
    print(f"wrote {len(rows)} rows to {path} (means in {summary})")
    return 0


def _cmd_elicit(args) -> int:
    from ..elicit import (
        find_ranking_given_cardinal_positions,
        find_ranking_given_other_vote,
        find_ranking_given_positions,
        mergesort_elicit,
        robust_elicit,
    )
    from ..core import CardinalLayout

    if args.mode == "positions":
        if not args.axis:
            print("--mode positions needs --axis", file=sys.stderr)
            return 2
        names = AlternativeNames(tuple(p.strip() for p in args.axis.split("<")))
        axis = parse_axis(args.axis, names)
        context = ElicitationContext(axis=axis)
        run = lambda o: find_ranking_given_positions(o, axis)
    elif args.mode == "vote":
        if not args.known_vote:
            print("--mode vote needs --known-vote", file=sys.stderr)
            return 2
        names = AlternativeNames(tuple(p.strip() for p in args.known_vote.split(">")))
        known = parse_ranking(args.known_vote, names)
        context = ElicitationContext(known_vote=known)
        run = lambda o: find_ranking_given_other_vote(o, known)
    elif args.mode == "cardinal":
        if not args.positions:
            print("--mode cardinal needs --positions name=value,...", file=sys.stderr)
            return 2
        pairs = [item.split("=", 1) for item in args.positions.split(",")]
        names = AlternativeNames(tuple(k.strip() for k, _ in pairs))
        layout = CardinalLayout(tuple(Fraction(v.strip()) for _, v in pairs))
        context = ElicitationContext(cardinal=layout)
        run = lambda o: find_ranking_given_cardinal_positions(o, layout)
    else:  # sort
        if not args.alternatives:
            print("--mode sort needs --alternatives a,b,c", file=sys.stderr)
            return 2
        names = AlternativeNames(tuple(p.strip() for p in args.alternatives.split(",")))
        context = None
        run = lambda o: mergesort_elicit(o, names.m)

    oracle = _TerminalOracle(names, args.interactive)
    if args.robust and context is not None:
        report = robust_elicit(oracle, context)
    else:
        report = run(oracle)
    print(f"ranking: {format_ranking(report.ranking, names)}")
    print(f"queries: {report.queries_used}  verified: {report.verified}  fell_back: {report.fell_back}")
    return 0


def _load_profile(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_profile(fh.read())


def _cmd_check(args) -> int:
    profile, names = _load_profile(args.profile)
    if args.axis:
        axis = parse_axis(args.axis, names)
        from ..core import is_single_peaked

        bad = [i for i, v in enumerate(profile.votes) if not is_single_peaked(v, axis)]
        if bad:
            print(f"not single-peaked on {format_axis(axis, names)}: votes {bad}")
        else:
            print(f"all {profile.n} votes single-peaked on {format_axis(axis, names)}")
        if args.cardinal:
            ok = is_cardinally_realizable(profile, axis)
            print(f"cardinally realizable on this axis: {'yes' if ok else 'no'}")
        return 1 if bad else 0
    axes = find_consistent_axes_bruteforce(profile)
    if not axes:
        print("no axis makes every vote single-peaked")
        return 1
    for axis in sorted(axes, key=lambda a: a.order):
        line = format_axis(axis, names)
        if args.cardinal:
            ok = is_cardinally_realizable(profile, axis)
            line += f"   (cardinally realizable: {'yes' if ok else 'no'})"
        print(line)
    return 0


def _cmd_aggregate(args) -> int:
    profile, names = _load_profile(args.profile)
    margins = pairwise_matrix(profile).margins
    print("pairwise margins (rows beat columns):")
    header = "      " + " ".join(f"{n:>4}" for n in names.names)
    print(header)
    for a, name in enumerate(names.names):
        print(f"{name:>5} " + " ".join(f"{margins[a][b]:>4}" for b in range(names.m)))
    try:
        agg = aggregate_ranking(profile)
    except EvenElectorateError:
        print(f"{profile.n} votes: even electorate, aggregate undefined (margins only)")
        return 1
    except CondorcetCycleError:
        print("pairwise majorities cycle: profile is not single-peaked on any common axis")
        return 1
    print(f"aggregate ranking: {format_ranking(agg, names)}")
    print(f"winner: {names.names[agg.peak]}")
    if args.axis:
        axis = parse_axis(args.axis, names)
        median = median_peak_winner(profile, axis)
        print(f"median of peaks on {format_axis(axis, names)}: {names.names[median]}")
    return 0


def _cmd_adversary(args) -> int:
    names = [args.audit] if args.audit else list(NAMED_ELICITORS)
    failures = 0
    for name in names:
        if name not in NAMED_ELICITORS:
            print(f"unknown elicitor {name!r}; choose from {', '.join(NAMED_ELICITORS)}", file=sys.stderr)
            return 2
        result = audit_elicitor(args.m, args.n, NAMED_ELICITORS[name])
        if result.caught:
            failures += 1
            print(
                f"{name}: CAUGHT after {result.total_queries} queries — a consistent world flips "
                f"pair {result.witness_pair} for agent {result.witness_agent}"
            )
        else:
            print(f"{name}: sound ({result.total_queries} queries, all designated pairs asked)")
    return 1 if failures else 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app
    from .service import PollService

    data_dir = os.environ.get("PEAKPOLL_DATA", args.data)
    service = PollService(data_dir)
    app = create_app(service, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peakpoll", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an experiment and write CSV")
    p.add_argument("--experiment", required=True, choices=["fig1", "fig2", "robust", "adversary"])
    p.add_argument("--m", default="", help="comma-separated list of m values (default: experiment preset)")
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", default="0.2", help="deviation rate for the robust experiment")
    p.add_argument("--deviation", choices=["shuffle", "swaps"], default="shuffle",
                   help="deviant model: unrestricted rankings or k adjacent swaps")
    p.add_argument("--swaps", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("elicit", help="run one elicitation conversation on the terminal")
    p.add_argument("--mode", required=True, choices=["positions", "cardinal", "vote", "sort"])
    p.add_argument("--axis", help='axis text, e.g. "d < b < e < f < a < c"')
    p.add_argument("--known-vote", help='ranking text, e.g. "a > d > f > b > c > e"')
    p.add_argument("--positions", help="name=decimal pairs, comma separated")
    p.add_argument("--alternatives", help="names, comma separated (sort mode)")
    p.add_argument("--robust", action="store_true")
    p.add_argument("--interactive", action="store_true")
    p.set_defaults(fn=_cmd_elicit)

    p = sub.add_parser("check", help="single-peakedness / realizability of a profile file")
    p.add_argument("--profile", required=True)
    p.add_argument("--axis")
    p.add_argument("--cardinal", action="store_true")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("aggregate", help="pairwise aggregate of a profile file")
    p.add_argument("--profile", required=True)
    p.add_argument("--axis")
    p.set_defaults(fn=_cmd_aggregate)

    p = sub.add_parser("adversary", help="audit elicitors against the interval adversary")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--audit", help=f"one of: {', '.join(NAMED_ELICITORS)}")
    p.set_defaults(fn=_cmd_adversary)

    p = sub.add_parser("serve", help="run the live poll service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data", default="./peakpoll-data")
    p.add_argument("--ui", help="directory of built browser-client files to serve at / (e.g. frontend/dist)")
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
