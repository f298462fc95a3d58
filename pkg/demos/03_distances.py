"""Compare diagrams with exact, sliced, and vectorized distances.

The exact q-Wasserstein solves a min-cost matching that may send points to
the diagonal; sliced Wasserstein averages 1D transport costs over directions;
vector distances are plain L_p norms after a common vectorization.  A
distance matrix over a small collection feeds the downstream test.
"""

import math

from tdaperm import (
    PdProcessSpec,
    WassersteinParams,
    distance_matrix,
    generate_pd_process,
    sliced_wasserstein,
    wasserstein,
    wasserstein_matching,
)

d1 = generate_pd_process(PdProcessSpec(n_points=12, seed=0))
d2 = generate_pd_process(PdProcessSpec(n_points=15, seed=1))

for p in (1, 2, math.inf):
    w = wasserstein(d1, d2, WassersteinParams(p=p, q=1))
    print(f"1-Wasserstein with L_{p} ground metric: {w:.4f}")

cost, pairs = wasserstein_matching(d1, d2, WassersteinParams(p=2, q=2))
to_diag = sum(1 for i, j in pairs if i is None or j is None)
print(f"optimal matching: {len(pairs)} pairs, {to_diag} to the diagonal, "
      f"cost {cost:.4f}")

sw = sliced_wasserstein(d1, d2, n_directions=20)
w21 = wasserstein(d1, d2, WassersteinParams(p=2, q=1))
print(f"sliced {sw:.4f} <= exact {w21:.4f}: {sw <= w21 + 1e-12}")

# a 6-diagram collection: 3 small, 3 large point counts
dgms = [generate_pd_process(PdProcessSpec(n_points=n, seed=s))
        for n in (10, 30) for s in (0, 1, 2)]
for method in ("w", "vab", "sw"):
    m = distance_matrix(dgms, method)
    cross = m.entries[:3, 3:].mean()
    within = (m.entries[:3, :3].sum() + m.entries[3:, 3:].sum()) / 12
    print(f"{method}: mean within {within:.4f}, mean across {cross:.4f}")
