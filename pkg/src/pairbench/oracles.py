"""Brute-force reference computations.

These deliberately share no code with the production paths: Bradley-Terry
scores by golden-section search on the raw likelihood, spanning trees by
exhaustive enumeration, information gain by adaptive quadrature.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate, stats

__all__ = [
    "golden_section_max",
    "bt_loglik_reference",
    "bt_scores_bruteforce",
    "spanning_trees",
    "mst_bruteforce",
    "eig_quadrature",
    "random_identifiable_wins",
    "run_bt_oracle",
    "run_mst_oracle",
]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-9) -> float:
    """Maximiser of a unimodal function on ``[lo, hi]``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def bt_loglik_reference(scores, wins) -> float:
    total = 0.0
    n = len(scores)
    for i in range(n):
        for j in range(n):
            if wins[i][j]:
                total -= wins[i][j] * math.log1p(math.exp(scores[j] - scores[i]))
    return total


def bt_scores_bruteforce(wins, bound: float = 15.0, tol: float = 1e-9) -> np.ndarray:
    """Unregularised BT maximum likelihood for n = 2 or 3 (sum-zero gauge)."""
    wins = [[float(v) for v in row] for row in wins]
    n = len(wins)
    if n == 2:
        x = golden_section_max(lambda t: bt_loglik_reference((t, 0.0), wins), -bound, bound, tol)
        s = np.array([x, 0.0])
    elif n == 3:
        def inner(x):
            y = golden_section_max(lambda t: bt_loglik_reference((x, t, 0.0), wins),
                                   -bound, bound, tol)
            return y, bt_loglik_reference((x, y, 0.0), wins)

        x = golden_section_max(lambda t: inner(t)[1], -bound, bound, tol)
        s = np.array([x, inner(x)[0], 0.0])
    else:
        raise ValueError("brute-force BT oracle handles n = 2 or 3 only")
    return s - s.mean()


def _is_identifiable(wins) -> bool:
    # every stimulus must reach every other along "beat" edges
    n = len(wins)
    for start in range(n):
        seen, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for v in range(n):
                if wins[u][v] and v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) < n:
            return False
    return True


def random_identifiable_wins(rng: np.random.Generator, n: int, max_total: int = 10) -> np.ndarray:
    """Random win matrix with at most ``max_total`` comparisons and a finite MLE."""
    while True:
        total = int(rng.integers(2, max_total + 1))
        w = np.zeros((n, n), dtype=int)
        for _ in range(total):
            i, j = rng.choice(n, size=2, replace=False)
            w[i, j] += 1
        if _is_identifiable(w):
            return w


def spanning_trees(n: int):
    """Yield every spanning tree of the complete graph on ``n`` nodes as an edge tuple."""
    edges = list(itertools.combinations(range(n), 2))
    for subset in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for i, j in subset:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            yield subset


def mst_bruteforce(n: int, weights) -> tuple[float, list[tuple]]:
    """Minimum total weight and every spanning tree achieving it."""
    def w(i, j):
        return weights[(i, j)] if (i, j) in weights else weights[(j, i)]

    best, trees = math.inf, []
    for tree in spanning_trees(n):
        total = math.fsum(w(i, j) for i, j in tree)
        if total < best - 1e-12:
            best, trees = total, [tree]
        elif abs(total - best) <= 1e-12:
            trees.append(tree)
    return best, trees


def eig_quadrature(mu_diff: float, var_sum: float) -> float:
    """Mutual information between a BT outcome and a Gaussian score difference,
    by adaptive quadrature."""
    sd = math.sqrt(var_sum)
    dens = stats.norm(mu_diff, sd).pdf
    lo, hi = mu_diff - 12 * sd, mu_diff + 12 * sd

    def p_win(d):
        return 1.0 / (1.0 + math.exp(-d))

    pw = integrate.quad(lambda d: dens(d) * p_win(d), lo, hi, epsabs=1e-13, epsrel=1e-12)[0]

    def integrand(d):
        p = p_win(d)
        out = 0.0
        if p > 0:
            out += p * math.log(p / pw)
        if p < 1:
            out += (1 - p) * math.log((1 - p) / (1 - pw))
        return dens(d) * out

    return integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0]


def run_bt_oracle(cases: int = 200, seed: int = 0) -> dict:
    """Compare :func:`pairbench.model.fit_bt` with the brute-force maximiser."""
    from .model import fit_bt

    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(cases):
        n = 2 + k % 2
        w = random_identifiable_wins(rng, n)
        worst = max(worst, float(np.max(np.abs(fit_bt(w, 0.0) - bt_scores_bruteforce(w)))))
    return {"cases": cases, "max_abs_error": worst, "passed": worst < 1e-3}


def run_mst_oracle(cases: int = 100, seed: int = 0) -> dict:
    """Compare :func:`pairbench.samplers.minimum_spanning_tree` totals with enumeration."""
    from .samplers import minimum_spanning_tree

    rng = np.random.default_rng(seed)
    mismatches = 0
    for k in range(cases):
        n = 2 + k % 4
        weights = {(i, j): float(rng.integers(0, 10)) if k % 2 else float(rng.random())
                   for i in range(n) for j in range(i + 1, n)}
        tree = minimum_spanning_tree(n, weights)
        total = math.fsum(weights[p] for p in tree)
        best, _ = mst_bruteforce(n, weights)
        mismatches += total != best
    return {"cases": cases, "mismatches": mismatches, "passed": mismatches == 0}
