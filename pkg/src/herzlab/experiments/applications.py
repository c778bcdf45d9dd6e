"""Sobolev, GNS, semigroup and Fourier-symbol experiments."""

from dataclasses import dataclass, field
import math

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import hermite_e
from scipy import integrate

from ..errors import InvalidArgumentError
from ..measure import Measure, satisfies_ball_growth
from ..norms import NormSpec, TruncationPolicy, herz_from_inner_norms, herz_norm
from ..piecewise import PiecewisePowerFunction
from ..riesz import (GridFunction, RieszParams, _jacobi, direct_grid_potential, gaussian_grid,
                     normalization_constant, riesz_potential_grid, spectral_potential)

__all__ = [
    "RadialTestFunction", "radial_herz_norm", "SobolevResult", "sobolev_ratio",
    "GNSResult", "gns_check", "gns_exponents", "SemigroupResult", "semigroup_check",
    "FourierResult", "fourier_symbol_check",
]

_GL16 = np.polynomial.legendre.leggauss(16)


class RadialTestFunction:
    """``f(x) = g(|x|)`` on R^n with closed-form radial derivatives.

    ``kind='gaussian'``: ``g(r) = exp(-r^2/2)``.  ``kind='bump'``:
    ``g(r) = (1 - r^2)^m`` for ``r < 1`` and 0 beyond (C^(m-1) at ``r = 1``).
    ``kind='zero'``: the zero function.
    """

    def __init__(self, kind="gaussian", n=1, m=4, scale=1.0):
        if kind not in ("gaussian", "bump", "zero"):
            raise InvalidArgumentError(f"unknown radial test function {kind!r}")
        if n not in (1, 2):
            raise InvalidArgumentError("radial test functions are provided for n = 1, 2")
        self.kind, self.n, self.m, self.scale = kind, n, int(m), float(scale)
        self._poly = Polynomial([1.0, 0.0, -1.0]) ** self.m if kind == "bump" else None

    def __repr__(self):
        return f"RadialTestFunction({self.kind!r}, n={self.n}, m={self.m})"

    @property
    def is_zero(self):
        return self.kind == "zero" or self.scale == 0.0

    @property
    def support_radius(self):
        return 1.0 if self.kind == "bump" else math.inf

    def max_order(self):
        return self.m - 1 if self.kind == "bump" else 64

    def radial(self, r, k=0):
        """``d^k g / dr^k`` at ``r >= 0``."""
        r = np.asarray(r, dtype=float)
        if self.is_zero:
            return np.zeros_like(r)
        if k > self.max_order():
            raise InvalidArgumentError(f"no closed-form derivative of order {k} for {self!r}")
        if self.kind == "gaussian":
            c = np.zeros(k + 1)
            c[k] = 1.0
            return self.scale * (-1.0) ** k * hermite_e.hermeval(r, c) * np.exp(-0.5 * r * r)
        return self.scale * np.where(r < 1.0, self._poly.deriv(k)(r) if k else self._poly(r), 0.0)

    def __call__(self, *coords):
        r = np.sqrt(sum(np.asarray(c, dtype=float) ** 2 for c in coords))
        return self.radial(r)

    def derivative_magnitude(self, k, *coords):
        """``|f^(k)|`` in 1D; ``sum_j |d f / d x_j|`` in 2D (first order only)."""
        if self.n == 1:
            return np.abs(self.radial(np.abs(coords[0]), k))
        if k != 1:
            raise InvalidArgumentError("2D derivative magnitudes are implemented for k = 1")
        x, y = (np.asarray(c, dtype=float) for c in coords)
        r = np.hypot(x, y)
        with np.errstate(invalid="ignore", divide="ignore"):
            ang = np.where(r > 0, (np.abs(x) + np.abs(y)) / r, 0.0)
        return np.abs(self.radial(r, 1)) * ang


def _angular_factor(n, p, l1_gradient):
    """``integral over the unit sphere of A(theta)^p``."""
    if n == 1:
        return 2.0
    if not l1_gradient:
        return 2.0 * math.pi
    val, _ = integrate.quad(lambda t: (abs(math.cos(t)) + abs(math.sin(t))) ** p, 0.0, math.pi / 2,
                            epsabs=0.0, epsrel=1e-13)
    return 4.0 * val


def radial_herz_norm(profile, n, p, q, lam, support=math.inf, angular=None, policy=None):
    """Herz norm over Lebesgue measure of ``A(theta) * profile(|x|)``.

    ``angular`` is the spherical integral of ``A^p`` (defaults to the sphere area).
    """
    policy = policy or TruncationPolicy()
    ang = _angular_factor(n, p, False) if angular is None else angular
    x, w = _GL16
    inner = {}
    t_hi = policy.t_max if math.isinf(support) else int(math.ceil(math.log2(support)))
    for t in range(policy.t_min, t_hi + 1):
        a, b = 2.0 ** (t - 1), min(2.0 ** t, support)
        if not b > a:
            continue
        # four log-spaced panels per annulus
        edges = a * (b / a) ** (np.arange(5) / 4.0)
        lo, hi = edges[:-1, None], edges[1:, None]
        r = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
        ww = (0.5 * (hi - lo) * w).ravel()
        val = np.sum(ww * np.abs(profile(r)) ** p * r ** (n - 1))
        inner[t] = (ang * val) ** (1.0 / p)
    open_sides = ("minus", "plus") if math.isinf(support) else ("minus",)
    return herz_from_inner_norms(inner, lam, q, policy, open_sides)


# ---------------------------------------------------------------------------


@dataclass
class SobolevResult:
    ratio: float
    source: float
    target: float
    pointwise_constant: float
    pointwise_bound: float
    pointwise_holds: bool
    flags: tuple = ()

    def to_dict(self):
        return dict(self.__dict__, flags=list(self.flags))


def sobolev_ratio(f, params, k=1, grid_h=1.0 / 64, half_width=None, samples=41):
    """``||f||_{K^p2_{lam,q2}(mu)} / ||grad^k f||_{K^p1_{lam,q1}(m)}`` and the
    pointwise bound ``|f| <= C I_k(|grad^k f|)``.

    The full ratio needs ``1 < p1 < n/k`` and therefore only runs for
    ``n = 2`` (``k = 1``); in 1D only the pointwise half is computed, with the
    kernel ``|x - y|^(k-1)``.
    """
    if not isinstance(f, RadialTestFunction):
        raise InvalidArgumentError("sobolev_ratio needs a RadialTestFunction with closed-form derivatives")
    if k < 1 or k > f.max_order():
        raise InvalidArgumentError(f"no closed-form derivative of order {k} for {f!r}")
    n = f.n
    if params.n != n:
        raise InvalidArgumentError("test function dimension does not match params.n")
    flags = []
    if f.is_zero:
        return SobolevResult(math.nan, 0.0, 0.0, math.nan, math.nan, True, ("0/0",))
    if n == 1:
        flags.append("1D: pointwise half only (1 < p1 < n/k is impossible)")
        C, bound = _pointwise_1d(f, k, samples)
        return SobolevResult(math.nan, math.nan, math.nan, C, bound, C <= bound * (1 + 1e-8),
                             tuple(flags))
    if k * params.p1 >= n or not 1 < params.p1:
        raise InvalidArgumentError("need 1 < p1 < n/k")
    expo = params.p2 * (1.0 / params.p1 - k / n)
    if not satisfies_ball_growth(params.measure, expo):
        raise InvalidArgumentError("target measure fails mu(B) <~ m(B)^(p2 (1/p1 - k/n))")
    if not (0 < params.lam < n - n / params.p1 or (params.lam == 0 and params.q1 <= params.p1)):
        flags.append("lambda outside the Herz-Sobolev range")
    tgt = radial_herz_norm(f.radial, n, params.p2, params.q2, params.lam, f.support_radius)
    src = radial_herz_norm(lambda r: f.radial(r, 1), n, params.p1, params.q1, params.lam,
                           f.support_radius, angular=_angular_factor(n, params.p1, True))
    C, bound = _pointwise_2d(f, grid_h, half_width)
    return SobolevResult(tgt.value / src.value, src.value, tgt.value, C, bound,
                         C <= bound * (1 + 1e-2), tuple(flags))


def _pointwise_1d(f, k, samples):
    R = f.support_radius if math.isfinite(f.support_radius) else 8.0
    xs = np.linspace(-0.9 * R, 0.9 * R, samples)
    ratios = []
    for x0 in xs:
        fx = abs(float(f(x0)))
        if fx < 1e-3 * abs(float(f(0.0))):
            continue
        integrand = lambda y: abs(float(f.derivative_magnitude(k, y))) * abs(x0 - y) ** (k - 1)
        lim = R if math.isfinite(f.support_radius) else 40.0
        val = sum(integrate.quad(integrand, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]
                  for a, b in ((-lim, x0), (x0, lim)) if b > a)
        ratios.append(fx / val)
    # f(x) = int_{-inf}^x (x-y)^(k-1)/(k-1)! f^(k)(y) dy, and the same from the right
    return float(max(ratios)), 0.5 / math.factorial(k - 1)


def _pointwise_2d(f, h, half_width):
    R = f.support_radius
    L = half_width or (2.0 * R if math.isfinite(R) else 10.0)
    m = int(round(2 * L / h)) + 1
    ax = -L + h * np.arange(m)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    grad = GridFunction((-L, -L), h, f.derivative_magnitude(1, X, Y))
    pot = riesz_potential_grid(grad, RieszParams(1.0, 2)).samples
    val = np.abs(f(X, Y))
    inner = (np.abs(X) <= 0.5 * L) & (np.abs(Y) <= 0.5 * L) & (val > 1e-3 * val.max())
    C = float(np.max(val[inner] / pot[inner]))
    # |f(x)| <= (1 / (n omega_n)) I_1(|grad f|)(x), and |grad f|_2 <= sum_j |d_j f|
    return C, 1.0 / (2.0 * math.pi)


# ---------------------------------------------------------------------------


def gns_exponents(p1, q1, p2, q2, theta):
    """``(p, q)`` with ``1/p = (1-theta)/p1 + theta/p2`` and likewise for ``q``."""
    if not 0.0 <= theta <= 1.0:
        raise InvalidArgumentError("theta must lie in [0, 1]")
    return (1.0 / ((1 - theta) / p1 + theta / p2), 1.0 / ((1 - theta) / q1 + theta / q2))


@dataclass
class GNSResult:
    lhs: float
    interpolation_rhs: float
    full_rhs: float
    interpolation_holds_exactly: bool
    slack: float
    p: float
    q: float
    flags: tuple = ()

    def to_dict(self):
        return dict(self.__dict__, flags=list(self.flags))


def gns_check(f, params, theta, p=None, q=None, policy=None, tol=1e-9):
    """Herz interpolation ``||f||_{p,q} <= ||f||_{p1,q1}^(1-theta) ||f||_{p2,q2}^theta``.

    All three norms are over ``params.measure`` with weight ``lam``, and are
    compared on the same truncation window, where the inequality is an exact
    consequence of Hölder's inequality.  ``slack`` is
    ``(rhs - lhs) / rhs``.  For radial test functions in 2D the gradient form
    ``||f||_{p1,q1}^(1-theta) ||grad f||_{p0,q1}^theta`` with ``1/p0 = 1/p2 + 1/n``
    is reported as ``full_rhs`` without asserting a constant.
    """
    pp, qq = gns_exponents(params.p1, params.q1, params.p2, params.q2, theta)
    if p is not None and abs(1.0 / p - 1.0 / pp) > 1e-12:
        raise InvalidArgumentError("exponent identity 1/p = (1-theta)/p1 + theta/p2 fails")
    if q is not None and abs(1.0 / q - 1.0 / qq) > 1e-12:
        raise InvalidArgumentError("exponent identity 1/q = (1-theta)/q1 + theta/q2 fails")
    policy = policy or TruncationPolicy()
    flags = []

    if isinstance(f, PiecewisePowerFunction):
        def norm(pe, qe):
            res = herz_norm(f, NormSpec("herz", pe, params.measure, q=qe, lam=params.lam,
                                        truncation=policy))
            return res.ledger.partial
    elif isinstance(f, RadialTestFunction):
        if params.measure.kind != "lebesgue" or params.measure.n != f.n:
            raise InvalidArgumentError("radial test functions use Lebesgue measure of their dimension")

        def norm(pe, qe):
            return radial_herz_norm(f.radial, f.n, pe, qe, params.lam, f.support_radius,
                                    policy=policy).ledger.partial
    else:
        raise InvalidArgumentError("gns_check needs a PiecewisePowerFunction or RadialTestFunction")

    lhs = norm(pp, qq)
    n1 = norm(params.p1, params.q1)
    n2 = norm(params.p2, params.q2)
    rhs = n1 ** (1 - theta) * n2 ** theta
    slack = (rhs - lhs) / rhs if rhs > 0 else 0.0
    holds = lhs <= rhs * (1 + tol)
    full = math.nan
    if isinstance(f, RadialTestFunction) and f.n >= 2 and not f.is_zero:
        p0 = 1.0 / (1.0 / params.p2 + 1.0 / f.n)
        if p0 > 1:
            g = radial_herz_norm(lambda r: f.radial(r, 1), f.n, p0, params.q1, params.lam,
                                 f.support_radius, _angular_factor(f.n, p0, True), policy).ledger.partial
            full = n1 ** (1 - theta) * g ** theta
        else:
            flags.append("gradient exponent p0 <= 1; full form skipped")
    return GNSResult(lhs, rhs, full, bool(holds), slack, pp, qq, tuple(flags))


# ---------------------------------------------------------------------------


@dataclass
class SemigroupResult:
    max_rel_error: float
    max_rel_error_uncorrected: float
    alpha: float
    beta: float
    points: int

    def to_dict(self):
        return dict(self.__dict__)


def _far_tail(f, params_b, Gb, alpha, beta, L, x, nodes=24):
    """``integral_{|y| > L} (I_beta f / G)(y) |x - y|^(alpha-1) dy`` for the cell
    representation of ``f``; ``y = L/u`` turns the algebraic decay into a
    Gauss-Jacobi weight."""
    k = -(alpha + beta)
    xj, wj = _jacobi(nodes, k)
    u = 0.5 * (1.0 + xj)
    w = wj * 0.5 ** (k + 1.0)
    out = np.zeros_like(x)
    for sgn in (1.0, -1.0):
        y = sgn * L / u
        uy = direct_grid_potential(f, params_b, y) / Gb
        smooth = uy * (L / u) ** (1.0 - beta)
        for i in range(0, x.size, 512):
            xx = x[i:i + 512, None]
            out[i:i + 512] += np.sum(w * smooth * np.abs(1.0 - u * xx * sgn / L) ** (alpha - 1.0), axis=1) \
                * L ** (alpha + beta - 1.0)
    return out


def semigroup_check(alpha=0.25, beta=0.25, half_width=16.0, h=1.0 / 64, sigma=1.0, interior=0.5):
    """``I~_alpha (I~_beta f) = I~_(alpha+beta) f`` for ``I~ = I / G`` on a 1D Gaussian.

    The inner potential decays only like ``|y|^(beta-1)``, so its contribution
    from outside the grid is added by quadrature of the same discrete operator.
    """
    if not (alpha > 0 and beta > 0 and alpha + beta < 1):
        raise InvalidArgumentError("need alpha, beta > 0 and alpha + beta < 1")
    f = gaussian_grid(1, half_width, h, sigma)
    pa, pb, pab = RieszParams(alpha), RieszParams(beta), RieszParams(alpha + beta)
    Ga, Gb, Gab = (normalization_constant(p) for p in (pa, pb, pab))
    ub = riesz_potential_grid(f, pb) * (1.0 / Gb)
    lhs = riesz_potential_grid(ub, pa).samples / Ga
    rhs = riesz_potential_grid(f, pab).samples / Gab
    x = f.axes()[0]
    L = half_width + 0.5 * h
    tail = _far_tail(f, pb, Gb, alpha, beta, L, x) / Ga
    sel = np.abs(x) <= interior * half_width
    err = np.abs(lhs[sel] + tail[sel] - rhs[sel]) / np.abs(rhs[sel])
    err0 = np.abs(lhs[sel] - rhs[sel]) / np.abs(rhs[sel])
    return SemigroupResult(float(err.max()), float(err0.max()), alpha, beta, int(sel.sum()))


@dataclass
class FourierResult:
    max_rel_error: float
    gamma: float
    points: int

    def to_dict(self):
        return dict(self.__dict__)


def fourier_symbol_check(gamma=0.5, half_width=16.0, h=1.0 / 64, sigma=1.0, stride=8):
    """Grid potential of a Gaussian against inversion of ``G(gamma)(2 pi |xi|)^-gamma f^``
    on the central half of the grid."""
    f = gaussian_grid(1, half_width, h, sigma)
    p = RieszParams(gamma)
    u = riesz_potential_grid(f, p).samples
    x = f.axes()[0]
    idx = np.nonzero(np.abs(x) <= 0.5 * half_width)[0][::stride]
    sp = spectral_potential(f, p, x[idx])
    err = np.abs(u[idx] - sp) / np.abs(sp)
    return FourierResult(float(err.max()), gamma, int(idx.size))
