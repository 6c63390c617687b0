"""
Bradley-Terry scores from a handful of comparisons
===================================================

Win counts go in, latent scores come out. Scores live on a logit scale with
zero mean, so only differences between them carry meaning.
"""

import numpy as np

from pairbench import bt_win_probability, fit_bt, sigmoid_align, win_matrix

# Four stimuli, eleven verdicts written as (i, j, winner).
outcomes = [(0, 1, 1), (0, 1, 1), (0, 1, 0), (1, 2, 2), (1, 2, 2), (0, 2, 2),
            (2, 3, 3), (2, 3, 2), (1, 3, 3), (0, 3, 3), (0, 3, 0)]
wins = win_matrix(4, outcomes)
print("win counts (row beat column):")
print(wins)

# A small prior keeps the fit finite even when someone never loses.
scores = fit_bt(wins, prior_strength=0.1)
print("\nfitted scores:", np.round(scores, 3))
print("P(3 beats 0) =", round(bt_win_probability(scores[3], scores[0]), 3))

# With no prior the data alone must link every stimulus in both directions.
print("unregularised:", np.round(fit_bt(wins, prior_strength=0.0), 3))

# Estimated scores are unitless; a monotone logistic map puts them on the
# scale of a reference before comparing magnitudes.
truth = np.array([0.9, 1.2, 4.1, 3.0])
fit = sigmoid_align(scores, truth)
print(f"\naligned ({fit.method}):", np.round(fit.values, 3))
print("RMSE after alignment:", round(float(np.sqrt(np.mean((fit.values - truth) ** 2))), 4))
