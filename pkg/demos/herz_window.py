"""Where the target Herz norm of I_gamma chi_Omega1 is finite, as lambda moves.

With gamma = 1/4, p1 = 2, p2 = 3 and the power weight beta = p2 (1/p1 - gamma)
the window is gamma - 1/p1 < lambda < 1 - 1/p1.  The fitted tail slopes of the
annulus terms match lambda + 1/p1 - gamma (toward the origin) and
lambda - 1 + 1/p1 (toward infinity); the sum converges only when both sides decay.

Run: python3 demos/herz_window.py
"""

import numpy as np

from herzlab import Measure
from herzlab.experiments import TraceParams, annulus_divergence, matched_beta

gamma, p1, p2 = 0.25, 2.0, 3.0
P = TraceParams(gamma, p1, p2, 2, 2, measure=Measure.power_weight(matched_beta(p1, p2, gamma)))
lo, hi = gamma - 1 / p1, 1 - 1 / p1
print(f"window ({lo}, {hi})")
print(" lambda  converged  slope(-)  predicted  slope(+)  predicted")
for r in annulus_divergence(P, np.round(np.linspace(-0.6, 0.7, 14), 3)):
    print(f"{r.lam:7.3f}  {str(r.converged):9s}  {r.tail_slopes[0]:8.4f}  {r.predicted_slopes[0]:9.4f}"
          f"  {r.tail_slopes[1]:8.4f}  {r.predicted_slopes[1]:9.4f}")
