"""Estimate the test's power across effect sizes and time the metrics.

Each repetition draws two groups of diagrams (group 1 at the baseline, group
2 at level r), runs the permutation test, and records a rejection at the 5%
level.  Power is the rejection rate over repetitions.  The benchmark times
each distance method on a fixed random collection.
"""

import json

from tdaperm import ExperimentConfig, run_benchmark, run_power_experiment

# small scale so the demo finishes in about a minute; raise reps for real use
cfg = ExperimentConfig(
    experiment="circle-ellipse",
    levels=(0.0, 0.1, 0.2),
    reps=20,
    group_size=8,
    method="vab",
    mixing="both",
    n_perms=199,
    n_points=40,
    seed=0,
)
report = run_power_experiment(cfg)
print(report.to_csv())
for r in cfg.levels:
    print(f"r={r}: standard {report.power_at(r, 'standard'):.2f}, "
          f"strong {report.power_at(r, 'strong'):.2f}")

rows = run_benchmark(n_diagrams=10, diagram_size=100, methods=["w", "vab", "sw"],
                     repeats=3, seed=0)
print(json.dumps(rows, indent=2, sort_keys=True))
by = {row["method"]: row["median_seconds"] for row in rows}
print(f"exact matcher vs VAB: {by['w'] / by['vab']:.0f}x slower at this scale")
