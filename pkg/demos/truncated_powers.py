"""Why q1 <= q2 cannot be dropped: truncated powers f_k = |x|^-(lam + 1/p1) on 1 < |x| < 2^k.

Each dyadic annulus of f_k has the same L^p1 norm, so the source norm grows
exactly like k^(1/q1).  The potential stays comparable to f_k on most annuli and
the target norm grows at least like k^(1/q2).  With q1 = 3 > q2 = 2 the
ratio is unbounded in k.

Run: python3 demos/truncated_powers.py
"""

import math

from herzlab import Measure
from herzlab.experiments import TraceParams, optimality_fk, matched_beta

gamma, p1, p2 = 0.25, 2.0, 3.0
mu = Measure.power_weight(matched_beta(p1, p2, gamma))
res = optimality_fk(TraceParams(gamma, p1, p2, 3, 2, measure=mu), (4, 14))
s = res.series
print("  k   source    (2 ln 2)^(1/2) k^(1/3)   target     ratio")
for k, a, b, r in zip(s.index, s.source_norms, s.target_norms, s.ratios):
    print(f"{k:3d}  {a:8.5f}  {math.sqrt(2 * math.log(2)) * k ** (1 / 3):8.5f}                 {b:8.4f}  {r:8.4f}")
print(f"source slope {res.source_fit.slope:.9f}   target slope {res.target_fit.slope:.4f}")
print("the gap exceeds 1/q2 - 1/q1 =", 1 / 2 - 1 / 3)
