"""Ground-truth generation and the simulated noisy observer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

__all__ = ["GroundTruth", "generate_ground_truth", "simulate_comparison", "SCORE_RANGE"]

SCORE_RANGE = (0.0, 5.0)


@dataclass(frozen=True)
class GroundTruth:
    """Hidden state of one simulated session.

    Attributes
    ----------
    scores : ndarray
        True quality of each stimulus.
    sigmas : ndarray
        Per-stimulus observer noise (standard deviation of a perceived score).
    epsilon : float
        Probability that a judgment is flipped at random.
    """

    scores: np.ndarray
    sigmas: np.ndarray
    epsilon: float = 0.0

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float)
        sigmas = np.asarray(self.sigmas, dtype=float)
        if scores.ndim != 1 or scores.shape != sigmas.shape or scores.size < 2:
            raise InvalidArgumentError("scores and sigmas must be equal-length vectors, n >= 2")
        if np.any(sigmas < 0) or not np.all(np.isfinite(scores)) or not np.all(np.isfinite(sigmas)):
            raise InvalidArgumentError("sigmas must be finite and non-negative; scores finite")
        if not 0.0 <= self.epsilon < 1.0:
            raise InvalidArgumentError("epsilon must lie in [0, 1)")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "sigmas", sigmas)

    @property
    def n(self) -> int:
        return self.scores.size


def generate_ground_truth(n: int, sigma_max: float, rng: np.random.Generator,
                          epsilon: float = 0.0) -> GroundTruth:
    """Draw true scores from U(0, 5) and observer noise levels from U(0, sigma_max)."""
    if int(n) != n or n < 2:
        raise InvalidArgumentError("n must be an integer >= 2")
    if not sigma_max > 0 or not np.isfinite(sigma_max):
        raise InvalidArgumentError("sigma_max must be a positive finite number")
    scores = rng.uniform(*SCORE_RANGE, size=int(n))
    sigmas = rng.uniform(0.0, sigma_max, size=int(n))
    return GroundTruth(scores, sigmas, epsilon)


def simulate_comparison(gt: GroundTruth, i: int, j: int, rng: np.random.Generator):
    """Judge one comparison between ``i`` and ``j``.

    Perceived scores are drawn from ``N(s, sigma)`` for both stimuli, the
    higher one wins, and the verdict is flipped with probability epsilon.
    Returns an :class:`~pairbench.samplers.Outcome`.
    """
    from .samplers import Outcome

    if i == j:
        raise InvalidArgumentError("a stimulus cannot be compared with itself")
    r_i = rng.normal(gt.scores[i], gt.sigmas[i])
    r_j = rng.normal(gt.scores[j], gt.sigmas[j])
    if r_i == r_j:
        i_wins = rng.random() < 0.5
    else:
        i_wins = r_i > r_j
    if gt.epsilon and rng.random() < gt.epsilon:
        i_wins = not i_wins
    return Outcome.of(i, j, i if i_wins else j)
