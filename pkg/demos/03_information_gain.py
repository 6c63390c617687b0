"""
Where does a comparison teach the most?
=======================================

Hybrid-MST scores each candidate pair by the expected information its outcome
carries about the score difference, then keeps a maximum-gain spanning tree
so every stimulus appears in the batch.
"""

import numpy as np

from pairbench import PosteriorApprox, expected_information_gain
from pairbench.samplers import eig_matrix, hybrid_mst_batch, laplace_posterior

# Gain falls as the predicted outcome becomes one-sided...
for gap in (0.0, 1.0, 2.0, 4.0):
    post = PosteriorApprox(np.array([gap, 0.0]), np.array([0.5, 0.5]))
    print(f"mean gap {gap:3.1f}: EIG = {expected_information_gain(post, 0, 1):.4f} nats")

# ...and rises with uncertainty about the pair.
for var in (0.1, 1.0, 4.0):
    post = PosteriorApprox(np.zeros(2), np.array([var, var]))
    print(f"variance {var:3.1f} each: EIG = {expected_information_gain(post, 0, 1):.4f} nats")

# A posterior built from real counts, and the batch it produces.
wins = np.array([[0, 4, 3, 5, 6],
                 [2, 0, 3, 4, 5],
                 [1, 3, 0, 3, 4],
                 [0, 1, 2, 0, 3],
                 [0, 1, 1, 2, 0]])
post = laplace_posterior(wins, prior_strength=0.1)
print("\nposterior means:", np.round(post.mean, 2))
print("posterior variances:", np.round(post.variance, 3))
print("pairwise gains:\n", np.round(eig_matrix(post), 3))
print("hybrid batch:", [tuple(p) for p in hybrid_mst_batch(post)])
