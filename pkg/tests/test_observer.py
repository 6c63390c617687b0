import math

import numpy as np
import pytest

from pairbench.errors import InvalidArgumentError
from pairbench.model import thurstone_win_probability
from pairbench.observer import GroundTruth, generate_ground_truth, simulate_comparison


def win_rate(gt, i, j, draws, seed=0):
    rng = np.random.default_rng(seed)
    return sum(simulate_comparison(gt, i, j, rng).winner == i for _ in range(draws)) / draws


def test_ranges():
    gt = generate_ground_truth(50, 0.4, np.random.default_rng(1), epsilon=0.2)
    assert gt.n == 50
    assert np.all((gt.scores >= 0) & (gt.scores <= 5))
    assert np.all((gt.sigmas >= 0) & (gt.sigmas <= 0.4))
    assert gt.epsilon == 0.2


def test_same_seed_same_truth():
    a = generate_ground_truth(8, 0.7, np.random.default_rng(9))
    b = generate_ground_truth(8, 0.7, np.random.default_rng(9))
    np.testing.assert_array_equal(a.scores, b.scores)
    np.testing.assert_array_equal(a.sigmas, b.sigmas)


def test_uniform_moments():
    score_means, sigma_means = [], []
    for seed in range(1000):
        gt = generate_ground_truth(32, 0.7, np.random.default_rng(seed))
        score_means.append(gt.scores.mean())
        sigma_means.append(gt.sigmas.mean())
    assert abs(np.mean(score_means) - 2.5) < 0.1
    assert abs(np.mean(sigma_means) - 0.35) < 0.02


@pytest.mark.parametrize("n, sigma_max", [(1, 0.5), (2.5, 0.5), (4, 0.0), (4, -1.0), (4, math.inf)])
def test_generate_rejects_bad_arguments(n, sigma_max):
    with pytest.raises(InvalidArgumentError):
        generate_ground_truth(n, sigma_max, np.random.default_rng(0))


def test_ground_truth_validation():
    with pytest.raises(InvalidArgumentError):
        GroundTruth([1.0, 2.0], [0.1, -0.1])
    with pytest.raises(InvalidArgumentError):
        GroundTruth([1.0, 2.0], [0.1, 0.1], epsilon=1.0)
    with pytest.raises(InvalidArgumentError):
        GroundTruth([1.0], [0.1])


def test_self_comparison_rejected():
    gt = GroundTruth([1.0, 2.0], [0.1, 0.1])
    with pytest.raises(InvalidArgumentError):
        simulate_comparison(gt, 1, 1, np.random.default_rng(0))


def test_noiseless_better_always_wins():
    gt = GroundTruth([3.0, 1.0], [0.0, 0.0])
    assert win_rate(gt, 0, 1, 500) == 1.0
    assert win_rate(gt, 1, 0, 500) == 0.0


def test_exact_tie_is_a_coin_flip():
    gt = GroundTruth([2.0, 2.0], [0.0, 0.0])
    p = win_rate(gt, 0, 1, 10_000, seed=4)
    assert abs(p - 0.5) <= 3 * math.sqrt(0.25 / 10_000)


@pytest.mark.parametrize("eps", [0.0, 0.2, 0.4])
def test_equal_scores_symmetric(eps):
    gt = GroundTruth([2.0, 2.0], [0.5, 0.5], epsilon=eps)
    p = win_rate(gt, 0, 1, 10_000, seed=5)
    assert abs(p - 0.5) <= 3 * math.sqrt(0.25 / 10_000)


def test_judgment_error_rate():
    gt = GroundTruth([3.0, 1.0], [0.0, 0.0], epsilon=0.4)
    p = win_rate(gt, 0, 1, 10_000, seed=6)
    assert abs(p - 0.6) <= 3 * math.sqrt(0.6 * 0.4 / 10_000)


def test_half_error_rate_erases_signal():
    gt = GroundTruth([4.0, 0.5], [0.1, 0.2], epsilon=0.5)
    p = win_rate(gt, 0, 1, 10_000, seed=7)
    assert abs(p - 0.5) <= 4 * math.sqrt(0.25 / 10_000)


def test_win_probability_law():
    rng = np.random.default_rng(11)
    draws = 10_000
    for k in range(6):
        s = rng.uniform(0, 5, 2)
        sig = rng.uniform(0.05, 1.0, 2)
        eps = rng.uniform(0, 0.4)
        phi = thurstone_win_probability(s[0], s[1], sig[0], sig[1])
        expected = (1 - eps) * phi + eps * (1 - phi)
        p = win_rate(GroundTruth(s, sig, eps), 0, 1, draws, seed=k)
        assert abs(p - expected) <= 4 * math.sqrt(expected * (1 - expected) / draws)


def test_outcomes_deterministic():
    gt = generate_ground_truth(5, 0.7, np.random.default_rng(2), 0.1)
    a = [simulate_comparison(gt, 0, 3, np.random.default_rng(8)) for _ in range(3)]
    r1, r2 = np.random.default_rng(8), np.random.default_rng(8)
    seq1 = [simulate_comparison(gt, k % 5, (k + 1) % 5, r1) for k in range(50)]
    seq2 = [simulate_comparison(gt, k % 5, (k + 1) % 5, r2) for k in range(50)]
    assert seq1 == seq2
    assert len(set(a)) == 1
