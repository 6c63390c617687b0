"""Paired-comparison probability models, Bradley-Terry fitting, Elo and
sigmoid alignment of estimated scores onto a reference scale."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.special import expit, ndtr

from .errors import (
    DegenerateVarianceError,
    InvalidArgumentError,
    TooFewPointsError,
    UnidentifiableModelError,
)

__all__ = [
    "Alignment",
    "ELO_INITIAL",
    "ELO_K",
    "bt_gradient",
    "bt_hessian",
    "bt_log_likelihood",
    "bt_win_probability",
    "elo_expected",
    "elo_update",
    "fit_bt",
    "sigmoid_align",
    "thurstone_win_probability",
    "win_matrix",
]

ELO_INITIAL = 1500.0
ELO_K = 32.0
ELO_SCALE = 400.0

FIT_TOL = 1e-9
FIT_MAX_ITER = 10_000

_P_LO = np.nextafter(0.0, 1.0)
_P_HI = np.nextafter(1.0, 0.0)


def _check_finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise InvalidArgumentError(f"expected a finite number, got {v!r}")


def bt_win_probability(s_i: float, s_j: float) -> float:
    """Probability that stimulus ``i`` beats ``j`` under Bradley-Terry.

    Evaluated as the logistic of ``s_i - s_j`` and clipped into the open
    unit interval so that extreme score gaps never return exactly 0 or 1.
    """
    _check_finite(s_i, s_j)
    return float(np.clip(expit(s_i - s_j), _P_LO, _P_HI))


def thurstone_win_probability(mu_i: float, mu_j: float,
                              sigma_i: float, sigma_j: float) -> float:
    """Thurstone (probit) win probability ``Phi((mu_i - mu_j) / sqrt(var_i + var_j))``."""
    _check_finite(mu_i, mu_j, sigma_i, sigma_j)
    if sigma_i < 0 or sigma_j < 0:
        raise InvalidArgumentError("standard deviations must be non-negative")
    scale = math.hypot(sigma_i, sigma_j)
    if scale == 0.0:
        raise DegenerateVarianceError("sigma_i and sigma_j are both zero")
    return float(np.clip(ndtr((mu_i - mu_j) / scale), _P_LO, _P_HI))


# ---------------------------------------------------------------------------
# Bradley-Terry maximum likelihood


def win_matrix(n: int, outcomes) -> np.ndarray:
    """Tally ``(i, j, winner)`` triples (or outcome objects) into an n x n count matrix."""
    counts = np.zeros((n, n), dtype=np.int64)
    for o in outcomes:
        i, j, winner = o
        loser = j if winner == i else i
        if winner not in (i, j) or i == j:
            raise InvalidArgumentError(f"invalid outcome {(i, j, winner)!r}")
        counts[winner, loser] += 1
    return counts


def _as_wins(wins) -> np.ndarray:
    w = np.asarray(wins, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InvalidArgumentError("win matrix must be square")
    if w.shape[0] < 2:
        raise InvalidArgumentError("need at least two stimuli")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise InvalidArgumentError("win counts must be finite and non-negative")
    if np.any(np.diag(w) != 0):
        raise InvalidArgumentError("win matrix diagonal must be zero")
    return w


def _with_prior(w: np.ndarray, prior_strength: float) -> np.ndarray:
    if prior_strength:
        w = w + prior_strength
        np.fill_diagonal(w, 0.0)
    return w


def bt_log_likelihood(scores, wins, prior_strength: float = 0.0) -> float:
    """Log-likelihood of ``scores`` given win counts plus ``prior_strength``
    virtual wins in each direction of every pair."""
    s = np.asarray(scores, dtype=float)
    w = _with_prior(_as_wins(wins), prior_strength)
    d = s[:, None] - s[None, :]
    return float(-np.sum(w * np.logaddexp(0.0, -d)))


def bt_gradient(scores, wins, prior_strength: float = 0.0) -> np.ndarray:
    s = np.asarray(scores, dtype=float)
    w = _with_prior(_as_wins(wins), prior_strength)
    return _gradient(s, w)


def bt_hessian(scores, wins, prior_strength: float = 0.0) -> np.ndarray:
    """Observed information (negated Hessian of the log-likelihood)."""
    s = np.asarray(scores, dtype=float)
    w = _with_prior(_as_wins(wins), prior_strength)
    return _information(s, w + w.T)


def _gradient(s, w):
    p = expit(s[:, None] - s[None, :])
    return w.sum(axis=1) - ((w + w.T) * p).sum(axis=1)


def _information(s, total):
    p = expit(s[:, None] - s[None, :])
    c = total * p * (1.0 - p)
    h = -c
    np.fill_diagonal(h, c.sum(axis=1) - np.diag(c))
    return h


def _loglik(s, w):
    return -np.sum(w * np.logaddexp(0.0, -(s[:, None] - s[None, :])))


def fit_bt(wins, prior_strength: float = 0.1) -> np.ndarray:
    """Maximum-likelihood Bradley-Terry scores, centred to sum to zero.

    Parameters
    ----------
    wins : array_like, shape (n, n)
        ``wins[i, j]`` is the number of comparisons ``i`` won against ``j``.
    prior_strength : float
        Virtual wins added in both directions for every pair. Keeps the
        estimate finite for undefeated or winless stimuli.

    Returns
    -------
    numpy.ndarray
        Score vector of length n with zero sum.

    Notes
    -----
    Each iteration proposes a Newton step and keeps it only if the
    likelihood does not decrease; otherwise the minorization-maximization
    update is used instead, so the ascent guarantee of MM is retained.
    Iteration stops once no score moves by more than 1e-9.
    """
    w = _as_wins(wins)
    if prior_strength < 0 or not math.isfinite(prior_strength):
        raise InvalidArgumentError("prior_strength must be a finite non-negative number")
    n = w.shape[0]
    if prior_strength == 0:
        if w.sum() == 0:
            raise UnidentifiableModelError("no comparisons recorded and prior_strength is 0")
        n_comp, _ = connected_components(w > 0, directed=True, connection="strong")
        if n_comp > 1:
            raise UnidentifiableModelError(
                "win graph is not strongly connected; the maximum likelihood "
                "estimate diverges (use prior_strength > 0)")
    w = _with_prior(w, prior_strength)
    total = w + w.T
    row_wins = w.sum(axis=1)
    ones = np.full((n, n), 1.0 / n)

    s = np.zeros(n)
    ll = _loglik(s, w)
    for _ in range(FIT_MAX_ITER):
        g = row_wins - (total * expit(s[:, None] - s[None, :])).sum(axis=1)
        step = None
        try:
            step = np.linalg.solve(_information(s, total) + ones, g)
        except np.linalg.LinAlgError:
            pass
        s_new = None
        if step is not None and np.all(np.isfinite(step)):
            cand = s + step
            ll_cand = _loglik(cand, w)
            if ll_cand >= ll - 1e-12 * abs(ll):
                s_new, ll_new = cand, ll_cand
        if s_new is None:
            p = np.exp(s - s.max())
            denom = (total / (p[:, None] + p[None, :])).sum(axis=1)
            s_new = np.log(row_wins / denom)
            s_new -= s_new.mean()
            ll_new = _loglik(s_new, w)
        delta = np.max(np.abs(s_new - s))
        s, ll = s_new - s_new.mean(), ll_new
        if delta < FIT_TOL:
            break
    return s


# ---------------------------------------------------------------------------
# Elo


def elo_expected(r_i: float, r_j: float) -> float:
    """Expected score of ``i`` against ``j``."""
    return 1.0 / (1.0 + 10.0 ** ((r_j - r_i) / ELO_SCALE))


def elo_update(ratings, i: int, j: int, winner: int, k: float = ELO_K) -> np.ndarray:
    """Return a copy of ``ratings`` after one game between ``i`` and ``j``.

    The winner gains ``k * (1 - E_winner)`` and the loser drops by the same
    amount, so the rating total is conserved.
    """
    if i == j:
        raise InvalidArgumentError("a stimulus cannot be compared with itself")
    if winner not in (i, j):
        raise InvalidArgumentError(f"winner {winner} is not part of pair ({i}, {j})")
    out = np.array(ratings, dtype=float)
    loser = j if winner == i else i
    delta = k * (1.0 - elo_expected(out[winner], out[loser]))
    out[winner] += delta
    out[loser] -= delta
    return out


# ---------------------------------------------------------------------------
# Sigmoid alignment


@dataclass(frozen=True)
class Alignment:
    """Result of :func:`sigmoid_align`.

    ``method`` is ``"logistic"``, ``"affine"`` or ``"constant"``;
    ``degenerate`` is set when the estimated scores were constant.
    """

    values: np.ndarray
    method: str
    params: tuple
    degenerate: bool = False

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


_GRID_C = np.geomspace(0.05, 20.0, 24)
_GRID_D = np.linspace(-2.0, 2.0, 17)
_N_STARTS = 8
_LM_ITERS = 25


def _project(z, y, c, d):
    """Best (a, b >= 0) for each (c, d); returns params, fitted values, residuals."""
    sig = expit(c[:, None] * (z[None, :] - d[:, None]))
    sm = sig.sum(axis=1) / z.size
    ds = sig - sm[:, None]
    var = np.einsum("ij,ij->i", ds, ds)
    b = np.maximum(ds @ (y - y.mean()) / np.maximum(var, 1e-300), 0.0)
    b[var <= 1e-15] = 0.0
    a = y.mean() - b * sm
    fit = a[:, None] + b[:, None] * sig
    return a, b, fit, fit - y


def _fit_logistic(z, y):
    # variable projection: (a, b) solved exactly, damped Gauss-Newton on (c, d)
    gc, gd = np.meshgrid(_GRID_C, _GRID_D, indexing="ij")
    _, _, _, r = _project(z, y, gc.ravel(), gd.ravel())
    order = np.argsort(np.einsum("ij,ij->i", r, r), kind="stable")[:_N_STARTS]
    c, d = gc.ravel()[order], gd.ravel()[order]
    a, b, fit, r = _project(z, y, c, d)
    sse = np.einsum("ij,ij->i", r, r)
    m = c.size
    lam = np.full(m, 1e-3)
    stall = np.zeros(m, dtype=int)
    reg = 1e-12 * np.eye(2)
    for _ in range(_LM_ITERS):
        hc = 1e-6 * (1.0 + c)
        *_, rp = _project(z, y, np.concatenate([c + hc, c]), np.concatenate([d, d + 1e-6]))
        jac = np.stack([(rp[:m] - r) / hc[:, None], (rp[m:] - r) / 1e-6], axis=2)
        jt = jac.transpose(0, 2, 1)
        jtj = jt @ jac
        jtr = jt @ r[:, :, None]
        diag = jtj * np.eye(2)
        try:
            step = -np.linalg.solve(jtj + lam[:, None, None] * (diag + reg), jtr)[:, :, 0]
        except np.linalg.LinAlgError:
            break
        c_new = np.maximum(c + step[:, 0], 0.0)
        d_new = d + step[:, 1]
        a_new, b_new, fit_new, r_new = _project(z, y, c_new, d_new)
        sse_new = np.einsum("ij,ij->i", r_new, r_new)
        better = np.isfinite(sse_new) & (sse_new < sse)
        gain = np.where(better, sse - sse_new, 0.0)
        c[better], d[better], a[better], b[better] = (
            c_new[better], d_new[better], a_new[better], b_new[better])
        fit[better], r[better], sse[better] = fit_new[better], r_new[better], sse_new[better]
        lam = np.where(better, lam / 3.0, lam * 4.0)
        # a start is settled after 2 consecutive negligible iterations
        stall = np.where(gain <= 1e-9 * (1e-12 + sse), stall + 1, 0)
        if np.all(stall >= 2):
            break
    best = int(np.argmin(sse))
    return fit[best], (a[best], b[best], c[best], d[best]), float(sse[best])


def sigmoid_align(estimated, reference) -> Alignment:
    """Map ``estimated`` onto the scale of ``reference`` with a monotone
    four-parameter logistic ``a + b / (1 + exp(-c (x - d)))``.

    The logistic is fitted by multi-start damped least squares (b, c >= 0)
    and is replaced by the best non-decreasing affine map whenever that
    fits better, so the result is never worse than an affine alignment.
    """
    x = np.asarray(estimated, dtype=float)
    y = np.asarray(reference, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidArgumentError("estimated and reference must be 1-D and of equal length")
    if x.size < 4:
        raise TooFewPointsError("sigmoid alignment needs at least 4 points")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidArgumentError("scores must be finite")

    spread = np.ptp(x)
    if spread <= 1e-12 * max(1.0, float(np.max(np.abs(x)))):
        return Alignment(np.full_like(y, y.mean()), "constant", (float(y.mean()),),
                         degenerate=True)

    mu, sd = x.mean(), x.std()
    z = (x - mu) / sd

    slope = max(float(np.dot(z, y - y.mean()) / np.dot(z, z)), 0.0)
    affine = y.mean() + slope * z
    sse_affine = float(np.sum((affine - y) ** 2))

    fit, (a, b, c, d), sse = _fit_logistic(z, y)
    if sse <= sse_affine:
        # parameters expressed on the original (unstandardised) axis
        return Alignment(fit, "logistic", (a, b, c / sd, mu + d * sd))
    return Alignment(affine, "affine", (y.mean() - slope * mu / sd, slope / sd))
