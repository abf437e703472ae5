#!/usr/bin/env python3
"""Query-count scaling on random instances (small, fast replicas of the
full sweeps; `peakpoll simulate` runs the real thing and writes CSV).

Structure beats ignorance: with the axis known the cost is linear with a tiny
constant, with only a neighboring vote known it is roughly 3m, and a plain
sort pays m log m. With numeric coordinates the cost collapses to O(log m).
"""

from peakpoll.simlab import ExperimentConfig, run_experiment, rows_to_summary_csv

print("axis/known-vote/sort comparison (5 runs per point):")
rows = run_experiment(ExperimentConfig("fig1", m_values=(8, 32, 128, 512, 2048), runs_per_point=5, seed=0))
print(rows_to_summary_csv(rows))

print("coordinates known vs axis known (watch the left column stay flat):")
rows = run_experiment(ExperimentConfig("fig2", m_values=(8, 32, 128, 512), runs_per_point=5, seed=0))
print(rows_to_summary_csv(rows))

print("per-run detail is one CSV row each: experiment,m,algorithm,run,seed,queries,correct")
