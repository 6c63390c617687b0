"""
Scoring an estimate against the truth
=====================================

Ranking accuracy uses Spearman correlation, score accuracy uses Pearson
correlation and RMSE after logistic alignment. Repeats are summarised with a
percentile bootstrap interval of the mean.
"""

import numpy as np

from pairbench import bootstrap_ci, pearson, rmse_aligned, spearman

rng = np.random.default_rng(0)
truth = rng.uniform(0, 5, 16)

for noise in (0.1, 0.5, 1.5):
    estimate = 0.8 * truth - 2.0 + rng.normal(0, noise, truth.size)
    print(f"noise {noise:3.1f}: PCC {pearson(estimate, truth):.3f}  "
          f"ROCC {spearman(estimate, truth):.3f}  RMSE {rmse_aligned(estimate, truth):.3f}")

# A monotone distortion leaves the ranking intact but bends the scale.
bent = np.exp(truth)
print(f"\nexp(truth): ROCC {spearman(bent, truth):.3f}, PCC {pearson(bent, truth):.3f}, "
      f"RMSE {rmse_aligned(bent, truth):.3f}")

# Interval width shrinks roughly with the square root of the sample size.
for m in (25, 100, 400):
    lo, hi = bootstrap_ci(rng.normal(size=m), 0.95, 1000, rng)
    print(f"m = {m:3d}: 95% interval width {hi - lo:.3f}")
