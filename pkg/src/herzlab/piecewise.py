"""Exact one-dimensional test functions: finite sums of ``c * |x|**a`` on intervals."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidArgumentError

__all__ = ["Piece", "Branch", "PiecewisePowerFunction"]


@dataclass(frozen=True)
class Piece:
    """``x -> coef * |x|**power`` on the open interval ``(a, b)``."""

    a: float
    b: float
    coef: float = 1.0
    power: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "coef", "power"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.a < self.b:
            raise InvalidArgumentError(f"piece interval needs a < b, got ({self.a}, {self.b})")
        if math.isnan(self.coef) or math.isinf(self.coef) or math.isnan(self.power):
            raise InvalidArgumentError("piece coefficient and power must be finite")


@dataclass(frozen=True)
class Branch:
    """Restriction of a piece to one half-line, in radial coordinates.

    Represents ``scale * r**power`` for ``r = side * x`` in ``(lo, hi)``,
    ``0 <= lo < hi``; ``scale`` is the absolute value of the coefficient.
    """

    side: int
    lo: float
    hi: float
    scale: float
    power: float

    def level_range(self):
        """(inf, sup) of the branch values over its interval."""
        if self.power == 0.0:
            return self.scale, self.scale
        ends = [self.scale * _pow(self.lo, self.power), self.scale * _pow(self.hi, self.power)]
        return min(ends), max(ends)


def _pow(r, p):
    if r == 0.0:
        return 0.0 if p > 0 else (1.0 if p == 0 else math.inf)
    if math.isinf(r):
        return math.inf if p > 0 else (1.0 if p == 0 else 0.0)
    return r ** p


class PiecewisePowerFunction:
    """Finite sum of power functions on pairwise disjoint intervals.

    Each piece must keep ``|f|`` locally integrable: a piece whose closure
    contains the origin needs ``power > -1``.

    >>> f = PiecewisePowerFunction.indicator(0, 1)
    >>> float(f(0.5)), float(f(2.0))
    (1.0, 0.0)
    """

    def __init__(self, pieces=()):
        pieces = sorted((p if isinstance(p, Piece) else Piece(*p) for p in pieces),
                        key=lambda p: (p.a, p.b))
        for left, right in zip(pieces, pieces[1:]):
            if right.a < left.b:
                raise InvalidArgumentError(
                    f"pieces ({left.a}, {left.b}) and ({right.a}, {right.b}) overlap")
        for p in pieces:
            if p.a <= 0.0 <= p.b and p.power <= -1.0 and p.coef != 0.0:
                raise InvalidArgumentError(
                    f"piece on ({p.a}, {p.b}) with power {p.power} is not locally integrable")
        self.pieces = tuple(pieces)

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def indicator(cls, a, b, coef=1.0):
        return cls([Piece(a, b, coef, 0.0)])

    @classmethod
    def power(cls, a, b, power, coef=1.0):
        return cls([Piece(a, b, coef, power)])

    @classmethod
    def symmetric_power(cls, r0, r1, power, coef=1.0):
        """``coef * |x|**power`` on ``{r0 < |x| < r1}``."""
        if r0 == 0.0:
            return cls([Piece(-r1, r1, coef, power)])
        return cls([Piece(-r1, -r0, coef, power), Piece(r0, r1, coef, power)])

    @classmethod
    def annulus_indicator(cls, t, coef=1.0):
        """Indicator of the dyadic annulus ``{2**(t-1) <= |x| < 2**t}``."""
        return cls.symmetric_power(2.0 ** (t - 1), 2.0 ** t, 0.0, coef)

    @classmethod
    def truncated_power(cls, k, lam, p1):
        """``|x|**-(lam + 1/p1)`` on ``{1 < |x| < 2**k}``."""
        return cls.symmetric_power(1.0, 2.0 ** k, -(lam + 1.0 / p1))

    @classmethod
    def from_config(cls, cfg):
        """Build from a config record; see the README for the accepted keys."""
        if "pieces" in cfg:
            return cls([Piece(*row) for row in cfg["pieces"]])
        if "indicator" in cfg:
            a, b = cfg["indicator"]
            return cls.indicator(a, b, cfg.get("coef", 1.0))
        if "annulus" in cfg:
            return cls.annulus_indicator(int(cfg["annulus"]), cfg.get("coef", 1.0))
        if "truncated_power" in cfg:
            tp = cfg["truncated_power"]
            return cls.truncated_power(int(tp["k"]), float(tp["lambda"]), float(tp["p1"]))
        if cfg.get("zero"):
            return cls.zero()
        raise InvalidArgumentError(f"unrecognized function description {cfg!r}")

    def to_config(self):
        return {"pieces": [[p.a, p.b, p.coef, p.power] for p in self.pieces]}

    # -- algebra -----------------------------------------------------------

    def __add__(self, other):
        return PiecewisePowerFunction(self.pieces + other.pieces)

    def __mul__(self, c):
        return PiecewisePowerFunction([Piece(p.a, p.b, p.coef * c, p.power) for p in self.pieces])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        body = ", ".join(f"({p.a:g},{p.b:g}):{p.coef:g}|x|^{p.power:g}" for p in self.pieces)
        return f"PiecewisePowerFunction[{body}]"

    def __eq__(self, other):
        return isinstance(other, PiecewisePowerFunction) and self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def dilate(self, s):
        """Return ``x -> f(s * x)`` for ``s > 0``."""
        if not s > 0:
            raise InvalidArgumentError("dilation factor must be positive")
        return PiecewisePowerFunction(
            [Piece(p.a / s, p.b / s, p.coef * s ** p.power, p.power) for p in self.pieces])

    def shift(self, h):
        """Return ``x -> f(x - h)``; only defined for step functions."""
        if not self.is_step:
            raise InvalidArgumentError("only step functions can be translated exactly")
        return PiecewisePowerFunction([Piece(p.a + h, p.b + h, p.coef, 0.0) for p in self.pieces])

    def abs(self):
        return PiecewisePowerFunction([Piece(p.a, p.b, abs(p.coef), p.power) for p in self.pieces])

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self):
        return all(p.coef == 0.0 for p in self.pieces)

    @property
    def is_step(self):
        return all(p.power == 0.0 for p in self.pieces)

    @property
    def breakpoints(self):
        pts = {p.a for p in self.pieces} | {p.b for p in self.pieces}
        return tuple(sorted(x for x in pts if math.isfinite(x)))

    def branches(self):
        """Split every nonzero piece at the origin into radial branches."""
        out = []
        for p in self.pieces:
            if p.coef == 0.0:
                continue
            c = abs(p.coef)
            if p.b > 0.0:
                out.append(Branch(1, max(p.a, 0.0), p.b, c, p.power))
            if p.a < 0.0:
                out.append(Branch(-1, max(-p.b, 0.0), -p.a, c, p.power))
        return out

    def restrict_radial(self, r0, r1):
        """Restriction to ``{r0 <= |x| < r1}`` (endpoints are measure-zero)."""
        out = []
        for p in self.pieces:
            for lo, hi in ((-r1, -r0), (r0, r1)):
                a, b = max(p.a, lo), min(p.b, hi)
                if a < b:
                    out.append(Piece(a, b, p.coef, p.power))
        return PiecewisePowerFunction(out)

    def restrict_annulus(self, t):
        return self.restrict_radial(2.0 ** (t - 1), 2.0 ** t)

    def radial_support(self, measure=None):
        """Smallest and largest ``|x|`` carrying nonzero values (on charged sides)."""
        lo, hi = math.inf, 0.0
        for br in self.branches():
            if measure is not None and measure.side_exponent(br.side) is None:
                continue
            lo, hi = min(lo, br.lo), max(hi, br.hi)
        if hi == 0.0:
            return None
        return lo, hi

    def integral(self, lo, hi):
        """Signed integral of ``f`` over ``(lo, hi)``, vectorized over the bounds."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        out = np.zeros(np.broadcast(lo, hi).shape)
        for p in self.pieces:
            u = np.clip(lo, p.a, p.b)
            v = np.clip(hi, p.a, p.b)
            k = p.power + 1.0
            if p.power != 0.0 and p.a < 0.0 < p.b and k <= 0.0:
                raise InvalidArgumentError("piece is not integrable across the origin")
            with np.errstate(divide="ignore", invalid="ignore"):
                if p.power == 0.0:
                    val = v - u
                else:
                    val = np.sign(v) * np.abs(v) ** k / k - np.sign(u) * np.abs(u) ** k / k
            out = out + p.coef * np.where(v > u, val, 0.0)
        return out

    def cell_averages(self, centers, h):
        """Averages of ``f`` over the cells ``[c - h/2, c + h/2]``."""
        c = np.asarray(centers, dtype=float)
        return self.integral(c - 0.5 * h, c + 0.5 * h) / h

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            for p in self.pieces:
                inside = (x > p.a) & (x < p.b)
                if p.power == 0.0:
                    out = np.where(inside, out + p.coef, out)
                else:
                    out = np.where(inside, out + p.coef * ax ** p.power, out)
        return out if out.ndim else out[()]
