import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import rankdata

from pairbench.errors import InvalidArgumentError, TooFewPointsError, UndefinedCorrelationError
from pairbench.metrics import bootstrap_ci, pearson, rmse_aligned, spearman


def test_pearson_examples():
    a = np.array([1.0, 2.0, 3.0, 4.0])
    assert pearson(a, a) == pytest.approx(1.0)
    assert pearson(a, -a) == pytest.approx(-1.0)
    # deviations (-1.5, -.5, .5, 1.5) and (-3, -2, -1, 6): 14 / sqrt(5 * 50)
    assert pearson(a, [1, 2, 3, 10]) == pytest.approx(14 / math.sqrt(250), abs=1e-12)
    assert pearson(a, [1, 2, 3, 10]) == pytest.approx(0.885438, abs=1e-6)


def test_spearman_examples():
    a = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    assert spearman(a, [1, 3, 2, 4, 5]) == pytest.approx(0.9, abs=1e-12)
    assert spearman(a, np.exp(a)) == pytest.approx(1.0)
    assert spearman(a, -a ** 3) == pytest.approx(-1.0)


def test_spearman_ties_use_mid_ranks():
    a = [1, 2, 2, 3]
    b = [1, 2, 3, 4]
    assert spearman(a, b) == pytest.approx(pearson([1, 2.5, 2.5, 4], [1, 2, 3, 4]))


@pytest.mark.parametrize("fn", [pearson, spearman])
def test_correlation_errors(fn):
    with pytest.raises(UndefinedCorrelationError):
        fn([1, 1, 1], [1, 2, 3])
    with pytest.raises(InvalidArgumentError):
        fn([1, 2], [2, 1])
    with pytest.raises(InvalidArgumentError):
        fn([1, 2, 3], [1, 2, 3, 4])


def test_spearman_is_pearson_of_ranks():
    rng = np.random.default_rng(0)
    for _ in range(100):
        m = int(rng.integers(3, 30))
        a = rng.integers(0, 6, m).astype(float) if rng.random() < 0.3 else rng.normal(size=m)
        b = rng.normal(size=m)
        if np.ptp(a) == 0:
            continue
        assert abs(spearman(a, b) - pearson(rankdata(a), rankdata(b))) < 1e-12


# a coarse grid keeps distinct values distinct after scaling and shifting
finite = st.integers(-400, 400).map(lambda k: k / 4)


@settings(max_examples=60)
@given(st.lists(st.tuples(finite, finite), min_size=3, max_size=20),
       st.floats(0.01, 50), st.floats(-50, 50))
def test_correlations_affine_invariant(points, scale, shift):
    a = np.array([p[0] for p in points])
    b = np.array([p[1] for p in points])
    if np.ptp(a) < 1e-3 or np.ptp(b) < 1e-3:
        return
    assert pearson(scale * a + shift, b) == pytest.approx(pearson(a, b), abs=1e-9)
    assert spearman(a, scale * b + shift) == pytest.approx(spearman(a, b), abs=1e-12)
    assert -1.0 <= pearson(a, b) <= 1.0


def test_rmse_identity_and_affine():
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.uniform(0, 5, int(rng.integers(4, 33)))
        if np.ptp(x) < 1:
            continue
        assert rmse_aligned(x, x) < 1e-3
        assert rmse_aligned(2.5 * x - 4.0, x) < 1e-3


def test_rmse_constant_estimate_is_population_std():
    ref = np.array([0.5, 1.0, 3.0, 4.5, 2.0])
    assert rmse_aligned(np.full(5, 1.7), ref) == pytest.approx(ref.std(ddof=0))


def test_rmse_too_few_points():
    with pytest.raises(TooFewPointsError):
        rmse_aligned([1, 2, 3], [3, 1, 2])


def test_rmse_nonnegative_and_bounded_by_std():
    rng = np.random.default_rng(5)
    for _ in range(20):
        ref = rng.uniform(0, 5, 12)
        est = rng.normal(size=12)
        r = rmse_aligned(est, ref)
        assert 0.0 <= r <= ref.std() + 1e-9


# --- bootstrap ---------------------------------------------------------------

def test_bootstrap_constant():
    assert bootstrap_ci([0.7] * 10, rng=np.random.default_rng(0)) == (0.7, 0.7)


def test_bootstrap_contains_mean():
    rng = np.random.default_rng(1)
    for m in (1, 2, 3, 10, 100):
        x = rng.exponential(size=m)
        lo, hi = bootstrap_ci(x, rng=rng)
        assert lo <= x.mean() <= hi


def test_bootstrap_deterministic():
    x = np.random.default_rng(2).normal(size=40)
    assert bootstrap_ci(x, rng=np.random.default_rng(9)) == bootstrap_ci(x, rng=np.random.default_rng(9))


def test_bootstrap_width_normal():
    rng = np.random.default_rng(3)
    widths = []
    for _ in range(50):
        lo, hi = bootstrap_ci(rng.normal(size=100), 0.95, 1000, rng)
        widths.append(hi - lo)
    assert abs(np.mean(widths) - 0.392) <= 0.25 * 0.392


def test_bootstrap_width_scaling():
    rng = np.random.default_rng(4)

    def mean_width(m):
        return np.mean([np.subtract(*bootstrap_ci(rng.normal(size=m), rng=rng)[::-1])
                        for _ in range(40)])

    w25, w100, w400 = mean_width(25), mean_width(100), mean_width(400)
    assert w25 / w100 == pytest.approx(2.0, rel=0.3)
    assert w100 / w400 == pytest.approx(2.0, rel=0.3)


def test_bootstrap_level_orders_widths():
    x = np.random.default_rng(5).normal(size=60)
    lo90, hi90 = bootstrap_ci(x, 0.9, 2000, np.random.default_rng(0))
    lo99, hi99 = bootstrap_ci(x, 0.99, 2000, np.random.default_rng(0))
    assert hi99 - lo99 > hi90 - lo90


@pytest.mark.parametrize("kwargs", [dict(samples=[]), dict(samples=[1.0], level=1.0),
                                    dict(samples=[1.0], level=0.0),
                                    dict(samples=[1.0], resamples=50)])
def test_bootstrap_errors(kwargs):
    with pytest.raises(InvalidArgumentError):
        bootstrap_ci(**kwargs)
