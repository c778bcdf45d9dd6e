"""Distribution function, decreasing rearrangement and maximal average.

Everything is computed from the level-set structure of a
:class:`~herzlab.piecewise.PiecewisePowerFunction`: on each radial branch
``C * r**a`` the super-level set ``{|f| > s}`` is an interval with a closed
form endpoint, so the distribution function is an exact finite sum.  The
rearrangement inverts it, in closed form when only one monotone branch is
active at the relevant level and by bracketed root finding otherwise.
"""

from dataclasses import dataclass
import csv
import math

import numpy as np
from scipy.optimize import brentq

from .errors import DivergenceError, InvalidArgumentError
from .measure import power_moment

__all__ = [
    "Distribution", "RearrangementProfile", "distribution_function",
    "decreasing_rearrangement", "maximal_average", "rearrangement_profile",
]


class Distribution:
    """Level-set calculus of ``|f|`` with respect to a one-dimensional measure."""

    def __init__(self, f, measure):
        self.f = f
        self.measure = measure
        rows = []
        for br in f.branches():
            e0 = measure.side_exponent(br.side)
            if e0 is None:
                continue
            rows.append((br.lo, br.hi, br.scale, br.power, e0))
        self.branches = rows
        arr = np.array(rows, dtype=float).reshape(-1, 5)
        self._lo, self._hi, self._c, self._p, self._e0 = arr.T
        self._k = self._e0 + 1.0
        levels = {0.0}
        self._ranges = []
        for lo, hi, c, p, _ in rows:
            lvl = _level_range(lo, hi, c, p)
            self._ranges.append(lvl)
            levels.update(v for v in lvl if math.isfinite(v))
        self.levels = np.array(sorted(levels))
        self.sup = max((r[1] for r in self._ranges), default=0.0)

    # -- primitive level-set quantities ------------------------------------

    def _F(self, r, k):
        # antiderivative of r**(k-1) from 0; k > 0 always
        with np.errstate(over="ignore"):
            return np.where(np.isinf(r), np.inf, r ** k / k)

    def _superlevel(self, s):
        """Per-branch interval (u, v) where ``C r**a > s``; empty when u >= v."""
        lo, hi, c, p = self._lo, self._hi, self._c, self._p
        u = lo.copy()
        v = hi.copy()
        const = p == 0.0
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            rho = np.where(const, 0.0, (s / np.where(c > 0, c, 1.0)) ** (1.0 / np.where(const, 1.0, p)))
        inc = p > 0.0
        dec = p < 0.0
        u = np.where(inc, np.maximum(lo, rho), u)
        v = np.where(dec, np.minimum(hi, rho), v)
        v = np.where(const & (c <= s), u, v)
        return u, v

    def mass(self, s):
        """``nu({|f| > s})``; may be ``inf``."""
        if not self.branches:
            return 0.0
        u, v = self._superlevel(s)
        live = v > u
        if not np.any(live):
            return 0.0
        k = self._k[live]
        return float(np.sum(self._F(v[live], k) - self._F(u[live], k)))

    def mass_ge(self, s):
        """``nu({|f| >= s})``, which differs from :meth:`mass` only on plateaus."""
        m = self.mass(s)
        if s <= 0.0:
            return self.mass(0.0)
        for (lo, hi, c, p, e0) in self.branches:
            if p == 0.0 and c == s:
                m += power_moment(lo, hi, e0)
        return m

    def excess(self, s):
        """``integral of (|f| - s)_+ d nu``."""
        u, v = self._superlevel(s)
        total = 0.0
        for i, (lo, hi, c, p, e0) in enumerate(self.branches):
            if not v[i] > u[i]:
                continue
            try:
                top = c * power_moment(u[i], v[i], p + e0)
            except DivergenceError as exc:
                raise DivergenceError(
                    f"|f| is not integrable on branch r in ({lo:g}, {hi:g}) with power {p:g}") from exc
            if s > 0.0:
                top -= s * power_moment(u[i], v[i], e0)
            total += top
        return total

    # -- vectorized level-set quantities (used by Lorentz integrals) --------

    def _superlevel_array(self, s):
        s = np.asarray(s, dtype=float)[..., None]
        lo, hi, c, p = self._lo, self._hi, self._c, self._p
        const = p == 0.0
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            rho = np.where(const, 0.0, (s / np.where(c > 0, c, 1.0)) ** (1.0 / np.where(const, 1.0, p)))
        u = np.where(p > 0.0, np.maximum(lo, rho), lo)
        v = np.where(p < 0.0, np.minimum(hi, rho), hi)
        v = np.where(const & (c <= s), u, v)
        return u, v, rho

    def mass_array(self, s):
        """:meth:`mass` at every entry of ``s``."""
        if not self.branches:
            return np.zeros_like(np.asarray(s, dtype=float))
        u, v, _ = self._superlevel_array(s)
        k = self._k
        return np.sum(np.where(v > u, _moment_array(u, v, k - 1.0), 0.0), axis=-1)

    def mass_derivative(self, s):
        """``d/ds`` of the distribution function away from plateau levels."""
        s = np.asarray(s, dtype=float)
        if not self.branches:
            return np.zeros_like(s)
        u, v, rho = self._superlevel_array(s)
        p, k, lo, hi = self._p, self._k, self._lo, self._hi
        inside = (rho > lo) & (rho < hi) & (p != 0.0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            # the moving endpoint is rho for both monotonicities; sign from the side it bounds
            drho = rho / (np.where(p != 0.0, p, 1.0) * s[..., None])
            d = np.where(p > 0.0, -1.0, 1.0) * rho ** (k - 1.0) * drho
        return np.sum(np.where(inside, d, 0.0), axis=-1)

    def excess_array(self, s):
        """:meth:`excess` at every entry of ``s``."""
        s = np.asarray(s, dtype=float)
        if not self.branches:
            return np.zeros_like(s)
        u, v, _ = self._superlevel_array(s)
        live = v > u
        top = self._c * _moment_array(u, v, self._p + self._e0)
        base = s[..., None] * _moment_array(u, v, self._e0)
        return np.sum(np.where(live, top - np.where(s[..., None] > 0, base, 0.0), 0.0), axis=-1)

    def cumulative_array(self, t, s_lo=0.0, s_hi=math.inf):
        """:meth:`cumulative` on an array of ``t`` whose ``f*`` values lie in ``[s_lo, s_hi]``.

        ``f*`` is found by geometric bisection; ``d/ds (t s + excess(s)) = t - lambda(s)``
        vanishes at the solution, so the result is insensitive to the bisection error.
        """
        t = np.asarray(t, dtype=float)
        lo = np.full(t.shape, math.log(max(s_lo, 1e-300)))
        hi = np.full(t.shape, math.log(min(s_hi, 1e300)))
        for _ in range(72):
            mid = 0.5 * (lo + hi)
            above = self.mass_array(np.exp(mid)) > t
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        s = np.exp(hi)
        return t * s + self.excess_array(s)

    def _active(self, lo, hi):
        """Indices of non-constant branches whose value range covers (lo, hi)."""
        mid = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * max(lo, 1.0)
        return [i for i, (a, b) in enumerate(self._ranges)
                if self.branches[i][3] != 0.0 and a < mid < b]

    def brackets(self):
        """Consecutive level intervals, the last one unbounded if ``|f|`` is."""
        lv = list(self.levels)
        out = list(zip(lv[:-1], lv[1:]))
        if math.isinf(self.sup):
            out.append((lv[-1], math.inf))
        return out

    # -- rearrangement ------------------------------------------------------

    def rearrangement(self, t):
        if not t > 0:
            raise InvalidArgumentError("rearrangement argument must be positive")
        if self.mass(0.0) <= t:
            return 0.0
        lo = 0.0
        hi = None
        for lev in self.levels[1:]:
            if self.mass(lev) <= t:
                hi = float(lev)
                break
            lo = float(lev)
        if hi is None:
            hi = 2.0 * max(lo, 1.0)
            while self.mass(hi) > t:
                lo, hi = hi, 2.0 * hi
                if hi > 1e300:
                    return math.inf
        if self.mass_ge(hi) > t:
            return hi
        active = self._active(lo, hi)
        if len(active) == 1:
            s = self._invert_single(active[0], lo, hi, t)
            if s is not None:
                return s
        return self._root(lo, hi, t)

    def _invert_single(self, i, lo, hi, t):
        blo, bhi, c, p, e0 = self.branches[i]
        k = e0 + 1.0
        mid = 0.5 * (lo + hi)
        u, v = self._superlevel(mid)
        own = float(self._F(v[i], k) - self._F(u[i], k))
        rest = self.mass(mid) - own
        target = t - rest
        if p > 0:
            F_rho = float(self._F(bhi, k)) - target
        else:
            F_rho = target + float(self._F(blo, k))
        if not (F_rho >= 0.0 and math.isfinite(F_rho)):
            return None
        rho = (k * F_rho) ** (1.0 / k)
        s = c * rho ** p
        return min(max(s, lo), hi)

    def _root(self, lo, hi, t):
        if not math.isfinite(self.mass(lo)):
            step = hi
            while True:
                step *= 0.5
                if self.mass(step) > t:
                    lo = step
                    break

        def g(s):
            return (self.mass_ge(s) if s >= hi else self.mass(s)) - t

        if g(lo) <= 0.0:
            return lo
        return brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)

    def cumulative(self, t):
        """``integral_0^t f*(u) du``."""
        s = self.rearrangement(t)
        if math.isinf(s):
            raise DivergenceError("rearrangement is infinite")
        return t * s + self.excess(s)

    def maximal_average(self, t):
        if not t > 0:
            raise InvalidArgumentError("maximal average argument must be positive")
        return self.cumulative(t) / t

    def t_breakpoints(self):
        """Values of t at which the formula for f* changes."""
        pts = set()
        for lev in self.levels:
            for m in (self.mass(lev), self.mass_ge(lev)):
                if 0.0 < m < math.inf:
                    pts.add(m)
        return sorted(pts)

    def is_closed_form(self):
        return all(len(self._active(a, b)) <= 1 for a, b in self.brackets())


def _moment_array(u, v, e):
    """Elementwise integral of ``r**e`` over ``(u, v)``; entries with ``v <= u`` are junk."""
    k = np.broadcast_to(np.asarray(e, dtype=float) + 1.0, np.broadcast(u, v).shape)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        uu = np.where(u > 0, u, 1.0)
        lr = np.log(np.where(np.isfinite(v) & (v > 0), v, 1.0) / uu)
        kk = np.where(k == 0.0, 1.0, k)
        mid = np.where(k == 0.0, lr, uu ** k * np.expm1(k * lr) / kk)
        from_zero = v ** k / kk
        to_inf = -(uu ** k) / kk
        out = np.where(u > 0, np.where(np.isfinite(v), mid, to_inf), from_zero)
    return out


def _level_range(lo, hi, c, p):
    if p == 0.0:
        return c, c
    def val(r):
        if r == 0.0:
            return math.inf if p < 0 else 0.0
        if math.isinf(r):
            return math.inf if p > 0 else 0.0
        return c * r ** p
    a, b = val(lo), val(hi)
    return min(a, b), max(a, b)


def distribution_function(f, measure, s):
    """``nu({x : |f(x)| > s})``; returns ``inf`` when the set has infinite mass."""
    if s < 0:
        raise InvalidArgumentError("level must be nonnegative")
    return Distribution(f, measure).mass(float(s))


def decreasing_rearrangement(f, measure, t):
    """``f*(t) = inf{s >= 0 : nu(|f| > s) <= t}``."""
    return Distribution(f, measure).rearrangement(float(t))


def maximal_average(f, measure, t):
    """``f**(t) = (1/t) * integral_0^t f*``."""
    return Distribution(f, measure).maximal_average(float(t))


@dataclass(frozen=True)
class RearrangementProfile:
    breakpoints: tuple
    values: tuple
    exact_flag: bool

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "f_star"])
            for t, v in zip(self.breakpoints, self.values):
                w.writerow([repr(t), repr(v)])


def rearrangement_profile(f, measure, ts=None, points_per_decade=8):
    """Sample f* at the structural breakpoints plus a log grid (or at ``ts``)."""
    dist = Distribution(f, measure)
    if ts is None:
        bps = dist.t_breakpoints()
        if bps:
            lo, hi = math.log10(bps[0]) - 2, math.log10(bps[-1]) + 1
        else:
            lo, hi = -3.0, 3.0
        n = max(2, int((hi - lo) * points_per_decade))
        ts = sorted(set(bps) | set(np.logspace(lo, hi, n)))
    ts = tuple(float(t) for t in ts)
    values = tuple(dist.rearrangement(t) for t in ts)
    return RearrangementProfile(ts, values, dist.is_closed_form())
