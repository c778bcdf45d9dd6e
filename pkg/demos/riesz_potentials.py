"""Riesz potentials three ways: closed forms, FFT grids and the Fourier symbol.

Run: python3 demos/riesz_potentials.py
"""

import math

import numpy as np

from herzlab import PiecewisePowerFunction as PPF
from herzlab.riesz import (RieszParams, gaussian_grid, grid_from_function, normalization_constant,
                           riesz_potential_1d, riesz_potential_grid, spectral_potential)

P = RieszParams(0.5)

# An indicator has an antiderivative for its potential.
chi = PPF.indicator(-1, 1)
print("I chi_[-1,1](0)      ", riesz_potential_1d(chi, P, 0.0), " expected 2/gamma =", 2 / P.gamma)
print("I chi_[0,1](2)       ", riesz_potential_1d(PPF.indicator(0, 1), P, 2.0),
      " expected", 2 * (math.sqrt(2) - 1))

# Power pieces use graded Gauss rules toward y = x and y = 0.
f = PPF.power(0, 1, -0.5)
for x in (1e-2, 1e-8, 1e-50):
    exact = math.pi + 2 * math.log((1 + math.sqrt(1 - x)) / math.sqrt(x))
    print(f"I |y|^-1/2 chi(0,1) at x={x:g}: {riesz_potential_1d(f, P, x):.15g}  closed form {exact:.15g}")

# The FFT grid uses exact kernel cell integrals, so cell-averaged indicators are
# reproduced to discretization accuracy.
h = 2.0 ** -10
g = grid_from_function(chi, -4.0, 4.0, h)
u = riesz_potential_grid(g, P)
i = int(round(4.0 / h))
print("grid vs exact at 0   ", u.samples[i] / riesz_potential_1d(chi, P, 0.0) - 1)

# A Gaussian has I_gamma f(0) = 2^(gamma/2) Gamma(gamma/2); the spectral route
# through G(gamma) (2 pi |xi|)^-gamma reaches the same value.
G = gaussian_grid(1, half_width=12.0, h=1 / 32)
want = 2 ** (P.gamma / 2) * math.gamma(P.gamma / 2)
print("Gaussian at 0: grid", riesz_potential_grid(G, P).samples[int(round(12 * 32))],
      " spectral", spectral_potential(G, P, [0.0])[0], " exact", want)
print("G(1/2) =", normalization_constant(P), " sqrt(2 pi) =", math.sqrt(2 * np.pi))
