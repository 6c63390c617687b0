"""
Six ways to choose the next pair
================================

Every sampler answers the same question: which two stimuli should the
observer compare next? Here each one runs against a near noiseless observer
for a single standard trial, i.e. n(n-1)/2 comparisons.
"""

import numpy as np

from pairbench import KINDS, generate_ground_truth, make_sampler, simulate_comparison

n = 8
truth = generate_ground_truth(n, sigma_max=0.05, rng=np.random.default_rng(1))
order = [int(k) for k in np.argsort(-truth.scores)]
print("true order, best first:", order)

for kind in KINDS:
    sampler = make_sampler(kind, n, np.random.default_rng(7))
    observer = np.random.default_rng(3)
    batches = []
    for _ in range(n * (n - 1) // 2):
        if not sampler.pending:
            batches.append(0)
        pair = sampler.next_pair()
        batches[-1] += 1
        sampler.record_outcome(simulate_comparison(truth, pair.i, pair.j, observer))
    distinct = len({o.pair for o in sampler.history})
    print(f"\n{kind}: batch sizes {batches[:8]}{' ...' if len(batches) > 8 else ''}")
    print(f"  {distinct} distinct pairs among {len(sampler.history)} comparisons")
    if kind == "tree-select" and sampler.last_ranking:
        print("  last full sort:", sampler.last_ranking)
    if kind == "sort-mst":
        print("  Elo order:", [int(k) for k in np.argsort(-sampler.ratings)])
