"""Gating downstream benchmarks on stability and validity.

A dataset earns a place in an evaluation suite only if (a) its run-to-run
standard deviation is not an outlier of the fitted log-normal, (b) the
pretrained model beats every scratch baseline, and (c) performance rises
with pretraining scale under a positive, well-fitting regression.

Run: python demos/06_benchmark_gating.py
"""

import numpy as np

from dnaprep import RunRecord, ScalingRecord, criteria_report, shapiro_wilk

rng = np.random.default_rng(7)

runs = []
scaling = []
profiles = {
    # dataset: (mean, seed spread, baseline mean, scaling slope)
    "stable_good": (78.0, 0.2, 70.0, 2.0),
    "stable_weak": (66.0, 0.3, 71.0, 2.0),      # loses to its baseline
    "noisy": (74.0, 6.0, 65.0, 2.0),            # unstable across seeds
    "flat_scaling": (80.0, 0.25, 72.0, 0.0),    # no benefit from more data
    "modest": (71.5, 0.4, 68.0, 1.2),
}
for dataset, (mean, spread, baseline, slope) in profiles.items():
    for seed in range(3):
        runs.append(RunRecord(dataset, "pretrained", seed, mean + spread * float(rng.normal())))
    runs.append(RunRecord(dataset, "baseline:cnn", 0, baseline))
    runs.append(RunRecord(dataset, "baseline:mlp", 0, baseline - 2.0))
    for exponent in (6, 7, 8, 9):
        noise = 0.1 * float(rng.normal())
        scaling.append(ScalingRecord(dataset, 10.0**exponent, 60 + slope * exponent + noise))

report = criteria_report(runs, scaling)
print(report.to_table())
print(f"\nselected: {report.selected}")
print(
    f"log-sigma fit: mu {report.mu:.3f}, sigma {report.sigma:.3f}, "
    f"threshold exp(mu+sigma) = {report.threshold_sigma:.3f}%"
)
print(f"normality of log-sigma (Shapiro-Wilk): W {report.sw_w:.3f}, p {report.sw_p:.3f}")

# The Shapiro-Wilk implementation is self-contained; here it flags an
# exponential sample as non-normal.
w, p = shapiro_wilk(rng.exponential(size=40))
print(f"\nexponential sample, n=40: W {w:.3f}, p {p:.2e} (normality rejected)")
