"""The replication harness: scenarios, metrics tables, and reproducibility.

Runs a small slice of the s1 scenario across methods and prints the
aggregated table.  Every replication r draws its graph weights and data
from seed_base + r, so the whole report is reproducible bit for bit.

The same runs are available from the shell:

    nscausal bench --spec scenario.json --out results/
    nscausal simulate --scenario s1 --n 100 --seed 0 --out sim/
    nscausal fit --data sim/data.csv --outcome y --out fit/
    nscausal eval --estimated fit/graph.csv --truth sim/nscg.csv
    nscausal effects --fit fit/
"""

from nscausal import run_scenario, scenario

spec = scenario("s1", sample_sizes=(30, 100), replications=8,
                methods=("nscsl-te", "nscsl-de", "baseline"), seed_base=0)
report = run_scenario(spec)

header = f"{'method':10s} {'target':6s} {'n':>5s} {'fdr':>12s} {'tpr':>12s} {'shd':>12s}"
print(header)
print("-" * len(header))
for row in report.summary:
    print(f"{row['method']:10s} {row['target']:6s} {row['n']:5d} "
          f"{row['fdr_mean']:6.3f}+-{row['fdr_se']:.3f} "
          f"{row['tpr_mean']:6.3f}+-{row['tpr_se']:.3f} "
          f"{row['shd_mean']:6.3f}+-{row['shd_se']:.3f}")

print("\nSelective learning keeps the baseline's perfect recall while "
      "removing the\nspurious discoveries; the direct-effect variant "
      "deliberately loses indirect\nancestors (its recall sits near one "
      "half on this layout).")

again = run_scenario(spec)
assert [{k: v for k, v in r.items() if k != "runtime_s"} for r in again.rows] \
    == [{k: v for k, v in r.items() if k != "runtime_s"} for r in report.rows]
print("\nre-running the same spec reproduced every row exactly.")
