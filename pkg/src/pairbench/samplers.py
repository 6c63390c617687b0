"""Pair-scheduling procedures for paired-comparison experiments.

Every sampler exposes the same loop::

    sampler = make_sampler("sort-mst", n, rng)
    pair = sampler.next_pair()
    sampler.record_outcome(Outcome.of(pair.i, pair.j, winner))

Batch procedures (knockout rounds, Swiss rounds, spanning-tree batches)
queue a whole batch internally and hand it out one pair at a time, so any
comparison budget can be honoured exactly.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from typing import Mapping, NamedTuple

import networkx as nx
import numpy as np
from scipy.special import expit, xlogy

from .errors import InvalidArgumentError, InvalidStateError, ProtocolViolationError
from .model import ELO_INITIAL, bt_hessian, elo_expected, ELO_K, fit_bt

__all__ = [
    "KINDS",
    "Pair",
    "Outcome",
    "PosteriorApprox",
    "Sampler",
    "RandomSampler",
    "KnockoutSampler",
    "SwissSampler",
    "TreeSelectSampler",
    "SortMSTSampler",
    "HybridMSTSampler",
    "make_sampler",
    "make_pair",
    "minimum_spanning_tree",
    "expected_information_gain",
    "eig_matrix",
    "laplace_posterior",
    "sort_mst_batch",
    "hybrid_mst_batch",
]

KINDS = ("random", "knockout", "swiss", "tree-select", "sort-mst", "hybrid-mst")


class Pair(NamedTuple):
    i: int
    j: int


def make_pair(a: int, b: int, n: int | None = None) -> Pair:
    """Canonical ``Pair`` with ``i < j``."""
    a, b = int(a), int(b)
    if a == b:
        raise InvalidArgumentError(f"pair needs two distinct stimuli, got ({a}, {b})")
    if min(a, b) < 0 or (n is not None and max(a, b) >= n):
        raise InvalidArgumentError(f"stimulus id out of range in ({a}, {b})")
    return Pair(a, b) if a < b else Pair(b, a)


class Outcome(NamedTuple):
    """One judged comparison; unpacks as ``(i, j, winner)``."""

    i: int
    j: int
    winner: int

    @classmethod
    def of(cls, a: int, b: int, winner: int) -> "Outcome":
        p = make_pair(a, b)
        if winner not in p:
            raise InvalidArgumentError(f"winner {winner} is not part of pair {tuple(p)}")
        return cls(p.i, p.j, int(winner))

    @property
    def pair(self) -> Pair:
        return Pair(self.i, self.j)

    @property
    def loser(self) -> int:
        return self.j if self.winner == self.i else self.i


class PosteriorApprox(NamedTuple):
    """Independent Gaussian approximation of the score posterior."""

    mean: np.ndarray
    variance: np.ndarray


# ---------------------------------------------------------------------------
# graph and information-gain primitives


def _kruskal(n: int, ranked_edges) -> list[Pair]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for i, j in ranked_edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            tree.append(Pair(i, j))
            if len(tree) == n - 1:
                break
    return tree


def minimum_spanning_tree(n: int, weights: Mapping[tuple[int, int], float]) -> list[Pair]:
    """Kruskal's algorithm on a complete graph.

    ``weights`` must hold a weight for every unordered pair (either key
    order). Equal weights are broken by canonical ``(i, j)`` order, so the
    result is deterministic. Edges are returned in the order selected.
    """
    if n < 2:
        raise InvalidArgumentError("need at least two nodes")
    w = {}
    for (a, b), val in weights.items():
        w[make_pair(a, b, n)] = float(val)
    missing = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in w]
    if missing:
        raise InvalidArgumentError(f"missing edge weights for {missing[:5]}")
    ranked = sorted(w, key=lambda p: (w[p], p.i, p.j))
    return _kruskal(n, ranked)


def _upper_pairs(n):
    iu, ju = np.triu_indices(n, k=1)
    return iu, ju


_GH_X, _GH_W = np.polynomial.hermite.hermgauss(16)
_GH_W = _GH_W / math.sqrt(math.pi)


def _eig(mu_diff, var_sum):
    # mutual information between the outcome and the score difference,
    # with d ~ N(mu_diff, var_sum) integrated by Gauss-Hermite quadrature
    mu_diff = np.asarray(mu_diff, dtype=float)[..., None]
    sd = np.sqrt(2.0 * np.asarray(var_sum, dtype=float))[..., None]
    p = expit(mu_diff + sd * _GH_X)
    q = 1.0 - p
    p_win = np.sum(_GH_W * p, axis=-1, keepdims=True)
    p_lose = 1.0 - p_win
    info = xlogy(p, p) - xlogy(p, p_win) + xlogy(q, q) - xlogy(q, p_lose)
    return np.maximum(np.sum(_GH_W * info, axis=-1), 0.0)


def expected_information_gain(posterior: PosteriorApprox, i: int, j: int) -> float:
    """Expected KL divergence from prior to posterior after comparing ``i`` and ``j``.

    Averaged over both outcomes under the Bradley-Terry likelihood, treating
    the score difference as Gaussian with mean ``mu_i - mu_j`` and variance
    ``v_i + v_j``. Equivalent to the mutual information between the outcome
    and the score difference.
    """
    if i == j:
        raise InvalidArgumentError("expected information gain needs two distinct stimuli")
    mean = np.asarray(posterior.mean, dtype=float)
    var = np.asarray(posterior.variance, dtype=float)
    # evaluate in canonical order so EIG(i, j) and EIG(j, i) agree bitwise
    a, b = (i, j) if i < j else (j, i)
    return float(_eig(mean[a] - mean[b], var[a] + var[b]))


def eig_matrix(posterior: PosteriorApprox) -> np.ndarray:
    """Symmetric matrix of pairwise expected information gain (zero diagonal)."""
    mean = np.asarray(posterior.mean, dtype=float)
    var = np.asarray(posterior.variance, dtype=float)
    n = mean.size
    iu, ju = _upper_pairs(n)
    vals = _eig(mean[iu] - mean[ju], var[iu] + var[ju])
    out = np.zeros((n, n))
    out[iu, ju] = vals
    out[ju, iu] = vals
    return out


def laplace_posterior(wins, prior_strength: float = 0.1) -> PosteriorApprox:
    """Gaussian posterior: regularized BT fit plus inverse-Hessian variances."""
    mean = fit_bt(wins, prior_strength)
    info = bt_hessian(mean, wins, prior_strength)
    var = np.clip(np.diag(np.linalg.pinv(info, hermitian=True)), 0.0, None)
    return PosteriorApprox(mean, var)


def sort_mst_batch(ratings) -> list[Pair]:
    """Spanning tree over pairs ranked by ascending rating difference."""
    r = np.asarray(ratings, dtype=float)
    n = r.size
    iu, ju = _upper_pairs(n)
    # stable sort keeps canonical (i, j) order among equal differences
    order = np.argsort(np.abs(r[iu] - r[ju]), kind="stable")
    return _kruskal(n, zip(iu[order].tolist(), ju[order].tolist()))


def hybrid_mst_batch(posterior: PosteriorApprox) -> list[Pair]:
    """Maximum expected-information-gain spanning tree."""
    mean = np.asarray(posterior.mean, dtype=float)
    var = np.asarray(posterior.variance, dtype=float)
    n = mean.size
    iu, ju = _upper_pairs(n)
    gain = _eig(mean[iu] - mean[ju], var[iu] + var[ju])
    order = np.argsort(-gain, kind="stable")
    return _kruskal(n, zip(iu[order].tolist(), ju[order].tolist()))


# ---------------------------------------------------------------------------
# samplers


class Sampler:
    """Common queueing and bookkeeping; subclasses implement :meth:`refill`."""

    kind: str = ""
    #: outcomes for pairs that were never issued are rejected
    strict: bool = True
    #: a new batch may only be drawn once the previous one is fully recorded
    batched: bool = True

    def __init__(self, n: int, rng: np.random.Generator | None = None):
        if int(n) != n or n < 2:
            raise InvalidArgumentError("a sampler needs n >= 2 stimuli")
        self.n = int(n)
        self.rng = rng if rng is not None else np.random.default_rng()
        self.history: list[Outcome] = []
        self.pending: deque[Pair] = deque()
        self.wins = np.zeros((self.n, self.n), dtype=np.int64)
        self._outstanding: Counter[Pair] = Counter()

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, recorded={len(self.history)})"

    def next_pair(self) -> Pair:
        if not self.pending:
            self.pending.extend(self.refill())
        pair = self.pending.popleft()
        self._outstanding[pair] += 1
        return pair

    def refill(self) -> list[Pair]:
        """Generate the next batch of pairs."""
        if self.batched and self._outstanding:
            raise InvalidStateError(
                f"{self.kind}: previous batch has {sum(self._outstanding.values())} "
                "unrecorded comparison(s)")
        batch = self._refill()
        if not batch:
            raise InvalidStateError(f"{self.kind}: sampler produced an empty batch")
        return batch

    def _refill(self) -> list[Pair]:
        raise NotImplementedError

    def record_outcome(self, outcome) -> None:
        i, j, winner = outcome
        o = Outcome.of(i, j, winner)
        if max(o.i, o.j) >= self.n:
            raise InvalidArgumentError(f"stimulus id out of range in {tuple(o.pair)}")
        pair = o.pair
        if self._outstanding[pair] > 0:
            self._outstanding[pair] -= 1
            if not self._outstanding[pair]:
                del self._outstanding[pair]
        elif self.strict:
            raise ProtocolViolationError(f"{self.kind}: pair {tuple(pair)} was not issued")
        self.history.append(o)
        self.wins[o.winner, o.loser] += 1
        self._update(o)

    def _update(self, outcome: Outcome) -> None:
        pass


class RandomSampler(Sampler):
    """Uniformly random pairs; the baseline."""

    kind = "random"
    strict = False
    batched = False

    def _refill(self):
        i = int(self.rng.integers(self.n))
        j = int(self.rng.integers(self.n - 1))
        if j >= i:
            j += 1
        return [make_pair(i, j)]


class KnockoutSampler(Sampler):
    """Repeated single-elimination brackets, each randomly seeded.

    Brackets have ``2**ceil(log2 n)`` leaf slots; surplus slots are byes
    placed at random. A bracket costs exactly ``n - 1`` comparisons.
    """

    kind = "knockout"

    def __init__(self, n, rng=None):
        super().__init__(n, rng)
        self.brackets_completed = 0
        self._seed()

    def _seed(self):
        size = 1 << (self.n - 1).bit_length()
        self._entrants = [p if p < self.n else None for p in self.rng.permutation(size).tolist()]
        self.first_round = list(self._entrants)
        self._open_round()

    def _open_round(self):
        while len(self._entrants) > 1:
            nxt, matches = [], {}
            for k in range(0, len(self._entrants), 2):
                a, b = self._entrants[k], self._entrants[k + 1]
                if a is None or b is None:
                    nxt.append(a if b is None else b)
                else:
                    nxt.append(None)
                    matches[make_pair(a, b)] = k // 2
            if matches:
                self._next, self._matches = nxt, matches
                return
            self._entrants = nxt
        self.brackets_completed += 1
        self._seed()

    def _refill(self):
        return sorted(self._matches, key=self._matches.get)

    def _update(self, o):
        pos = self._matches.pop(o.pair)
        self._next[pos] = o.winner
        if not self._matches:
            self._entrants = self._next
            self._open_round()


class SwissSampler(Sampler):
    """Swiss-system tournaments restarted every ``floor(log2 n) + 2`` rounds.

    Each round orders stimuli by (wins, opponents' win rate, random) and
    pairs neighbours, backtracking to avoid rematches within a tournament.
    With odd ``n`` the lowest-placed stimulus without a bye sits out and is
    credited a win.
    """

    kind = "swiss"
    search_budget = 20_000

    def __init__(self, n, rng=None):
        super().__init__(n, rng)
        self.rounds_per_tournament = int(math.floor(math.log2(self.n))) + 2
        self.tournament = -1
        self._reset()

    def _reset(self):
        self.tournament += 1
        self.round = 0
        self.standing_wins = np.zeros(self.n)
        self.games = np.zeros(self.n)
        self.opponents: list[set[int]] = [set() for _ in range(self.n)]
        self.played: set[Pair] = set()
        self.byes: set[int] = set()

    def omw(self) -> np.ndarray:
        """Mean win rate of each stimulus's past opponents (0.5 when none)."""
        rate = np.where(self.games > 0, self.standing_wins / np.maximum(self.games, 1), 0.5)
        return np.array([np.mean([rate[o] for o in opp]) if opp else 0.5
                         for opp in self.opponents])

    def standings(self) -> list[int]:
        tiebreak = self.rng.random(self.n)
        omw = self.omw()
        return sorted(range(self.n),
                      key=lambda p: (-self.standing_wins[p], -omw[p], tiebreak[p]))

    def _refill(self):
        if self.round >= self.rounds_per_tournament:
            self._reset()
        order = self.standings()
        if self.n % 2:
            ranked = order[::-1]
            candidates = ([p for p in ranked if p not in self.byes]
                          + [p for p in ranked if p in self.byes])
            pairs = None
            for bye in candidates:
                rest = [p for p in order if p != bye]
                pairs = self._pair_without_rematch(rest)
                if pairs is not None:
                    break
            if pairs is None:
                bye = candidates[0]
                pairs = self._pair_min_rematch([p for p in order if p != bye])
            self.byes.add(bye)
            self.standing_wins[bye] += 1
            self.games[bye] += 1
        else:
            pairs = self._pair_without_rematch(order)
            if pairs is None:
                pairs = self._pair_min_rematch(order)
        self.round += 1
        self.last_round = pairs
        return pairs

    def _pair_without_rematch(self, players):
        budget = [self.search_budget]

        def search(rest):
            if not rest:
                return []
            budget[0] -= 1
            if budget[0] < 0:
                return None
            first = rest[0]
            for k in range(1, len(rest)):
                p = make_pair(first, rest[k])
                if p in self.played:
                    continue
                tail = search(rest[1:k] + rest[k + 1:])
                if tail is not None:
                    return [p] + tail
            return None

        return search(list(players))

    def _pair_min_rematch(self, players):
        # maximum rematch-free matching, preferring close standings; leftovers
        # are paired in standings order and are the only rematches
        place = {p: k for k, p in enumerate(players)}
        g = nx.Graph()
        g.add_nodes_from(players)
        for a_idx, a in enumerate(players):
            for b in players[a_idx + 1:]:
                if make_pair(a, b) not in self.played:
                    g.add_edge(a, b, weight=len(players) - abs(place[a] - place[b]))
        matching = nx.max_weight_matching(g, maxcardinality=True)
        pairs = sorted((make_pair(a, b) for a, b in matching),
                       key=lambda p: min(place[p.i], place[p.j]))
        matched = {x for p in pairs for x in p}
        left = [p for p in players if p not in matched]
        pairs += [make_pair(left[k], left[k + 1]) for k in range(0, len(left), 2)]
        return pairs

    def _update(self, o):
        self.standing_wins[o.winner] += 1
        self.games[o.i] += 1
        self.games[o.j] += 1
        self.opponents[o.i].add(o.j)
        self.opponents[o.j].add(o.i)
        self.played.add(o.pair)


_UNRESOLVED = -1


class TreeSelectSampler(Sampler):
    """Full sorting with a selection (tournament) tree.

    A bracket finds the top stimulus; it is then removed from its leaf and
    only the matches on its leaf-to-root path are replayed to find the next
    one, until every stimulus is ranked. The tree is then reseeded.
    """

    kind = "tree-select"

    def __init__(self, n, rng=None):
        super().__init__(n, rng)
        self.leaves = 1 << (self.n - 1).bit_length()
        self.sorts_completed = 0
        self.last_ranking: list[int] | None = None
        self._seed()
        self._advance()

    def _seed(self):
        perm = self.rng.permutation(self.leaves).tolist()
        self._val = [_UNRESOLVED] * self.leaves + [p if p < self.n else None for p in perm]
        self._leaf_of = {p: self.leaves + k for k, p in enumerate(perm) if p < self.n}
        self.ranking: list[int] = []
        self._ready: dict[Pair, int] = {}

    def _advance(self):
        val = self._val
        while True:
            ready = {}
            for k in range(self.leaves - 1, 0, -1):
                if val[k] != _UNRESOLVED:
                    continue
                a, b = val[2 * k], val[2 * k + 1]
                if a == _UNRESOLVED or b == _UNRESOLVED:
                    continue
                if a is None or b is None:
                    val[k] = a if b is None else b
                else:
                    ready[make_pair(a, b)] = k
            if ready:
                self._ready = ready
                return
            top = val[1]
            if top is None:
                self.sorts_completed += 1
                self.last_ranking = self.ranking
                self._seed()
                val = self._val
                continue
            self.ranking.append(top)
            k = self._leaf_of[top]
            val[k] = None
            k //= 2
            while k >= 1:
                val[k] = _UNRESOLVED
                k //= 2

    def _refill(self):
        return sorted(self._ready, key=lambda p: -self._ready[p])

    def _update(self, o):
        node = self._ready.pop(o.pair)
        self._val[node] = o.winner
        if not self._ready:
            self._advance()


class SortMSTSampler(Sampler):
    """Elo-driven batches: spanning trees over the closest-rated pairs."""

    kind = "sort-mst"
    strict = False

    def __init__(self, n, rng=None, k: float = ELO_K):
        super().__init__(n, rng)
        self.k = k
        self.ratings = np.full(self.n, ELO_INITIAL)

    def _refill(self):
        return sort_mst_batch(self.ratings)

    def _update(self, o):
        w, l = o.winner, o.loser
        delta = self.k * (1.0 - elo_expected(self.ratings[w], self.ratings[l]))
        self.ratings[w] += delta
        self.ratings[l] -= delta


class HybridMSTSampler(Sampler):
    """Batches forming the maximum expected-information-gain spanning tree.

    The Gaussian posterior is refreshed from all recorded outcomes once per
    batch.
    """

    kind = "hybrid-mst"
    strict = False

    def __init__(self, n, rng=None, prior_strength: float = 0.1):
        super().__init__(n, rng)
        self.prior_strength = prior_strength
        self.posterior: PosteriorApprox | None = None

    def _refill(self):
        self.posterior = laplace_posterior(self.wins, self.prior_strength)
        return hybrid_mst_batch(self.posterior)


_SAMPLERS = {cls.kind: cls for cls in (RandomSampler, KnockoutSampler, SwissSampler,
                                       TreeSelectSampler, SortMSTSampler, HybridMSTSampler)}


def make_sampler(kind: str, n: int, rng: np.random.Generator | None = None, **kwargs) -> Sampler:
    try:
        cls = _SAMPLERS[kind]
    except KeyError:
        raise InvalidArgumentError(f"unknown sampler kind {kind!r}; choose from {KINDS}") from None
    return cls(n, rng, **kwargs)
