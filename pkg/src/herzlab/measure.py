"""Measures on R^n: Lebesgue measure and the one-dimensional power weight.

The power weight is the measure with density ``x**(beta - 1)`` on ``(0, inf)``
and zero on the negative half-line.  Every mass below is computed in closed
form.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DivergenceError, InvalidArgumentError

__all__ = [
    "Measure", "Ball", "GrowthReport", "power_moment", "ball_mass",
    "annulus_mass", "ball_growth_report", "default_balls",
    "satisfies_ball_growth",
]


def power_moment(lo, hi, e):
    """Return the integral of ``r**e`` over ``(lo, hi)`` with ``0 <= lo``.

    ``hi`` may be ``inf``.  Raises DivergenceError when the integral is
    infinite.  Uses an expm1 form so that ``e`` near -1 keeps full precision.
    """
    if not hi > lo:
        return 0.0
    k = e + 1.0
    if lo == 0.0 and k <= 0.0:
        raise DivergenceError(f"integral of r^{e} diverges at r = 0")
    if math.isinf(hi) and k >= 0.0:
        raise DivergenceError(f"integral of r^{e} diverges at r = inf")
    if math.isinf(hi):
        return lo ** k / -k
    if lo == 0.0:
        return hi ** k / k
    log_ratio = math.log(hi / lo)
    if k == 0.0:
        return log_ratio
    return lo ** k * math.expm1(k * log_ratio) / k


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        c = self.center
        if np.isscalar(c):
            c = (float(c),)
        object.__setattr__(self, "center", tuple(float(v) for v in c))
        if not self.radius > 0:
            raise InvalidArgumentError("ball radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dimension(self):
        return len(self.center)


@dataclass(frozen=True)
class Measure:
    """Lebesgue measure on R^n or the power weight on R (``kind='power_weight'``)."""

    n: int = 1
    kind: str = "lebesgue"
    beta: float = None

    def __post_init__(self):
        if self.kind not in ("lebesgue", "power_weight"):
            raise InvalidArgumentError(f"unknown measure kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgumentError("dimension must be a positive integer")
        if self.kind == "power_weight":
            if self.n != 1:
                raise InvalidArgumentError("power_weight is defined only for n = 1")
            if self.beta is None or not self.beta > 0:
                raise InvalidArgumentError("power_weight requires beta > 0")
            object.__setattr__(self, "beta", float(self.beta))
        elif self.beta is not None:
            raise InvalidArgumentError("beta is only meaningful for power_weight")

    @classmethod
    def lebesgue(cls, n=1):
        return cls(n=n, kind="lebesgue")

    @classmethod
    def power_weight(cls, beta):
        return cls(n=1, kind="power_weight", beta=beta)

    @classmethod
    def from_config(cls, cfg):
        kind = cfg.get("kind", "lebesgue")
        return cls(n=int(cfg.get("n", 1)), kind=kind, beta=cfg.get("beta"))

    def to_config(self):
        cfg = {"kind": self.kind, "n": self.n}
        if self.beta is not None:
            cfg["beta"] = self.beta
        return cfg

    # -- one-dimensional helpers -------------------------------------------

    def side_exponent(self, side):
        """Density exponent on the half-line ``side`` (+1 or -1); None when massless."""
        self._require_1d()
        if self.kind == "lebesgue":
            return 0.0
        return self.beta - 1.0 if side > 0 else None

    def radial_moment(self, lo, hi, e, side):
        """Integral of ``|x|**e`` over ``{side * x in (lo, hi)}``."""
        e0 = self.side_exponent(side)
        if e0 is None:
            return 0.0
        return power_moment(lo, hi, e + e0)

    def interval_mass(self, a, b):
        self._require_1d()
        if not b > a:
            return 0.0
        if self.kind == "lebesgue":
            return float(b - a)
        lo, hi = max(a, 0.0), max(b, 0.0)
        if math.isinf(hi):
            return math.inf
        return (hi ** self.beta - lo ** self.beta) / self.beta

    def density(self, x):
        """Density with respect to Lebesgue measure, vectorized over ``x``."""
        x = np.asarray(x, dtype=float)
        if self.kind == "lebesgue":
            return np.ones_like(x)
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = x[pos] ** (self.beta - 1.0)
        return out

    def _require_1d(self):
        if self.n != 1:
            raise InvalidArgumentError("operation requires a one-dimensional measure")


def _unit_ball_volume(n):
    if n == 1:
        return 2.0
    if n == 2:
        return math.pi
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def ball_mass(measure, ball):
    """Mass of an open ball."""
    if ball.dimension != measure.n:
        raise InvalidArgumentError(
            f"ball dimension {ball.dimension} does not match measure dimension {measure.n}")
    if measure.kind == "lebesgue":
        return _unit_ball_volume(measure.n) * ball.radius ** measure.n
    c = ball.center[0]
    return measure.interval_mass(c - ball.radius, c + ball.radius)


def annulus_mass(measure, t):
    """Mass of the dyadic annulus ``{2**(t-1) <= |x| < 2**t}``."""
    t = int(t)
    if measure.kind == "lebesgue":
        n = measure.n
        if n == 1:
            return 2.0 ** t
        return _unit_ball_volume(n) * (2.0 ** (t * n)) * (1.0 - 2.0 ** (-n))
    return measure.interval_mass(2.0 ** (t - 1), 2.0 ** t)


@dataclass(frozen=True)
class GrowthReport:
    sup_ratio: float
    argmax_ball: Ball
    ratios: tuple


def ball_growth_report(measure, exponent, balls):
    """Supremum of ``nu(B) / m(B)**exponent`` over a finite sample of balls."""
    balls = list(balls)
    if not balls:
        raise InvalidArgumentError("ball sample is empty")
    if not exponent > 0:
        raise InvalidArgumentError("growth exponent must be positive")
    leb = Measure.lebesgue(measure.n)
    ratios = tuple(ball_mass(measure, b) / ball_mass(leb, b) ** exponent for b in balls)
    i = int(np.argmax(ratios))
    return GrowthReport(ratios[i], balls[i], ratios)


def default_balls(K=10, n_centers=21):
    """Origin-centred balls with radii 2^-K..2^K, plus balls centred at
    log-spaced positive points with the same radii (one-dimensional)."""
    radii = 2.0 ** np.arange(-K, K + 1)
    centers = [0.0] + list(2.0 ** np.linspace(-K, K, n_centers))
    return [Ball(c, r) for c in centers for r in radii]


def satisfies_ball_growth(measure, exponent):
    """Analytic predicate: does ``nu(B) <~ m(B)**exponent`` hold for all balls?

    Lebesgue measure on R^n needs exponent 1.  The power weight needs
    ``beta == exponent <= 1``: small origin balls force ``beta >= exponent``,
    large ones force ``beta <= exponent``, and small balls far from the origin
    force ``exponent <= 1``.
    """
    tol = 1e-12
    if measure.kind == "lebesgue":
        return abs(exponent - 1.0) <= tol
    return abs(measure.beta - exponent) <= tol and exponent <= 1.0 + tol
