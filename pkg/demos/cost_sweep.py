"""SampleRank query cost as the target scores shrink.

Runs a reduced sweep on the global lower-bound family and prints the mean
query count per cell along with the fitted log-log slope, which should be
close to one.
"""

from localrank.sweep import SweepConfig, read_sweep_csv, run_cost_sweep

cfg = SweepConfig(p_values=(0.2, 0.1, 0.05, 0.025), trials=40, seed=1, no_timestamp=True)
rows = read_sweep_csv(run_cost_sweep(cfg))
for r in rows:
    if r["row_type"] == "summary":
        print(f"p={r['p_value']:>6}  p_min={float(r['p_min']):.4f}  mean queries={float(r['queries']):8.0f}  "
              f"correct={float(r['correct']):.2f}")
print("slope", next(r["slope"] for r in rows if r["row_type"] == "fit"))
