"""Trace-ratio experiments: boundedness, necessity, optimality families."""

from dataclasses import dataclass, replace, field
import math

import numpy as np

from ..errors import InsufficientDataError, InvalidArgumentError
from ..measure import Ball, Measure, ball_mass
from ..norms import (NormSpec, TruncationPolicy, annulus_inner_norms, herz_from_inner_norms,
                     herz_norm)
from ..piecewise import PiecewisePowerFunction
from ..riesz import PotentialFunction, RieszParams
from .fit import BURN_IN, RatioSeries, fit_exponent
from .params import classify_params

__all__ = [
    "TraceResult", "trace_ratio", "source_spec", "target_spec", "NecessityResult",
    "necessity_check", "FkResult", "optimality_fk", "DivergenceRecord",
    "annulus_divergence", "hls_ratio", "hls_dilation_family", "LimitingResult",
    "limiting_case_probe", "SweepResult", "trace_family", "trace_sweep",
    "annulus_exponent",
]


def _ledger_dict(ledger):
    return {
        "terms": {str(t): v for t, v in sorted(ledger.terms.items())},
        "tail_estimate": ledger.tail_estimate, "converged": ledger.converged,
        "partial": ledger.partial, "slopes": dict(ledger.slopes),
        "quadrature_error": ledger.quadrature_error,
    }


def source_spec(params, family="herz", policy=None, r=None):
    policy = policy or TruncationPolicy()
    leb = Measure.lebesgue(params.n)
    if family == "herz":
        return NormSpec("herz", params.p1, leb, q=params.q1, lam=params.lam, truncation=policy)
    if family == "lorentz_herz":
        r = params.r1 if r is None else r
        if r is None:
            raise InvalidArgumentError("lorentz_herz source needs r1")
        return NormSpec("lorentz_herz", params.p1, leb, r=r, q=params.q1, lam=params.lam,
                        truncation=policy)
    raise InvalidArgumentError(f"unknown norm family {family!r}")


def target_spec(params, family="herz", policy=None):
    policy = policy or TruncationPolicy()
    if family == "herz":
        return NormSpec("herz", params.p2, params.measure, q=params.q2, lam=params.lam,
                        truncation=policy)
    if family == "lorentz_herz":
        if params.r2 is None:
            raise InvalidArgumentError("lorentz_herz target needs r2")
        return NormSpec("lorentz_herz", params.p2, params.measure, r=params.r2, q=params.q2,
                        lam=params.lam, truncation=policy)
    raise InvalidArgumentError(f"unknown norm family {family!r}")


@dataclass
class TraceResult:
    source: float
    target: float
    ratio: float
    source_ledger: object
    target_ledger: object
    diverged: bool
    flags: tuple = ()

    def to_dict(self, ledgers=True):
        d = {"source": self.source, "target": self.target, "ratio": self.ratio,
             "diverged": self.diverged, "flags": list(self.flags)}
        if ledgers:
            d["source_ledger"] = _ledger_dict(self.source_ledger) if self.source_ledger else None
            d["target_ledger"] = _ledger_dict(self.target_ledger) if self.target_ledger else None
        return d


def _potential(f, params):
    if params.n != 1:
        raise InvalidArgumentError("trace experiments evaluate exact potentials in n = 1 only")
    return PotentialFunction(f, RieszParams(params.gamma, params.n))


# annuli kept beyond the source support when sizing the target window
TARGET_MARGIN = 20


def _target_window(f, policy):
    """Widen the window so that it covers the support of ``f`` plus a margin."""
    lo, hi = f.radial_support()
    t_lo = policy.t_min if lo == 0.0 else min(policy.t_min, math.floor(math.log2(lo)) - TARGET_MARGIN)
    t_hi = policy.t_max if math.isinf(hi) else max(policy.t_max, math.ceil(math.log2(hi)) + TARGET_MARGIN)
    t_lim = max(policy.t_limit, -t_lo, t_hi)
    return replace(policy, t_min=int(t_lo), t_max=int(t_hi), t_limit=int(t_lim))


def trace_ratio(f, params, norm_families="herz", policy=None, source_family=None,
                source_r=None):
    """``||I_gamma f||_target(mu) / ||f||_source(m)`` with both ledgers.

    ``norm_families`` selects ``herz`` or ``lorentz_herz`` for both sides;
    ``source_family`` overrides the source side alone.
    """
    policy = policy or TruncationPolicy()
    sfam = source_family or norm_families
    if f.is_zero:
        return TraceResult(0.0, 0.0, math.nan, None, None, False, ("0/0",))
    src = herz_norm(f, source_spec(params, sfam, policy, source_r))
    tgt = herz_norm(_potential(f, params), target_spec(params, norm_families, _target_window(f, policy)))
    flags = []
    diverged = not tgt.ledger.converged
    if diverged:
        flags.append("diverged")
    if not src.ledger.converged:
        flags.append("source_not_converged")
    if tgt.ledger.quadrature_error > 1e-6:
        flags.append(f"quadrature_error={tgt.ledger.quadrature_error:.2e}")
    ratio = tgt.value / src.value if src.value > 0 else math.nan
    return TraceResult(src.value, tgt.value, ratio, src.ledger, tgt.ledger, diverged, tuple(flags))


# ---------------------------------------------------------------------------


@dataclass
class NecessityResult:
    sup_ratio: float
    argmax_ball: Ball
    table: list
    exponent: float
    sup_trace_ratio: float = math.nan

    def to_dict(self):
        return {"sup_ratio": self.sup_ratio, "exponent": self.exponent,
                "argmax_ball": {"center": list(self.argmax_ball.center),
                                "radius": self.argmax_ball.radius},
                "sup_trace_ratio": self.sup_trace_ratio, "table": self.table}


def necessity_check(params, radii, centers=(0.0,), with_trace=True, policy=None):
    """Raw ball ratios ``mu(B) / m(B)^e`` and trace ratios of ``chi_B``.

    ``e = p2 (1/p1 - gamma/n)``.  Requires ``lambda = 0``.
    """
    if params.lam != 0.0:
        raise InvalidArgumentError("necessity_check requires lambda = 0")
    if params.n != 1:
        raise InvalidArgumentError("necessity_check is implemented for n = 1")
    e = params.growth_exponent
    leb = Measure.lebesgue(1)
    table = []
    balls = [Ball(c, r) for c in centers for r in radii]
    if not balls:
        raise InvalidArgumentError("no balls given")
    for b in balls:
        mu = ball_mass(params.measure, b)
        m = ball_mass(leb, b)
        row = {"center": b.center[0], "radius": b.radius, "mu": mu, "m": m,
               "raw_ratio": mu / m ** e}
        if with_trace:
            c = b.center[0]
            tr = trace_ratio(PiecewisePowerFunction.indicator(c - b.radius, c + b.radius),
                             params, "herz", policy)
            row["trace_ratio"] = tr.ratio
            row["diverged"] = tr.diverged
        table.append(row)
    raw = [row["raw_ratio"] for row in table]
    i = int(np.argmax(raw))
    sup_tr = max((row["trace_ratio"] for row in table), default=math.nan) if with_trace else math.nan
    return NecessityResult(raw[i], balls[i], table, e, sup_tr)


# ---------------------------------------------------------------------------


@dataclass
class FkResult:
    series: RatioSeries
    source_fit: object
    target_fit: object

    def to_dict(self):
        return {"series": self.series.to_dict(), "source_fit": self.source_fit.to_dict(),
                "target_fit": self.target_fit.to_dict(),
                "slope_gap": self.target_fit.slope - self.source_fit.slope}


def _check_matched_measure(params):
    beta = params.p2 * (1.0 / params.p1 - params.gamma)
    m = params.measure
    if params.n != 1 or m.kind != "power_weight" or abs(m.beta - beta) > 1e-12 or beta > 1.0:
        raise InvalidArgumentError(
            "this experiment needs n = 1 and the power weight with beta = p2 (1/p1 - gamma) <= 1")


def optimality_fk(params, k_range, norm_families="herz", policy=None, burn_in=BURN_IN):
    """Norms of ``f_k = |x|^-(lam + 1/p1)`` on ``1 < |x| < 2^k`` and of ``I_gamma f_k``."""
    _check_matched_measure(params)
    k_min, k_max = int(k_range[0]), int(k_range[1])
    ks = list(range(k_min, k_max + 1))
    if sum(k >= burn_in for k in ks) < 2:
        raise InsufficientDataError(
            f"k range {k_min}..{k_max} leaves fewer than 2 points after burn-in {burn_in}")
    series = RatioSeries(f"f_k(lambda={params.lam:g}, p1={params.p1:g})")
    for k in ks:
        fk = PiecewisePowerFunction.truncated_power(k, params.lam, params.p1)
        tr = trace_ratio(fk, params, norm_families, policy)
        series.append(k, tr.source, tr.target, tr.diverged)
    return FkResult(series, fit_exponent(ks, series.source_norms, burn_in),
                    fit_exponent(ks, series.target_norms, burn_in))


# ---------------------------------------------------------------------------


def annulus_exponent(measure):
    """``b`` with ``nu(Omega_t) ~ 2^(t b)``."""
    if measure.kind == "lebesgue":
        return float(measure.n)
    return measure.beta


@dataclass
class DivergenceRecord:
    lam: float
    converged: bool
    tail_slopes: tuple
    predicted_slopes: tuple
    partial_by_width: dict

    def to_dict(self):
        return {"lambda": self.lam, "converged": self.converged,
                "tail_slopes": list(self.tail_slopes),
                "predicted_slopes": list(self.predicted_slopes),
                "partial_by_width": {str(k): v for k, v in self.partial_by_width.items()}}


def annulus_divergence(params, lambda_grid, window_growth=(20, 40, 60), f=None):
    """Convergence of the target Herz sum of ``I_gamma chi_{Omega_1}`` across lambda.

    The per-annulus ``L^p2(mu)`` norms do not depend on lambda, so they are
    computed once on the widest window and reweighted.  A lambda converges
    when the fitted terms decay toward both ``t -> -inf`` and ``t -> +inf``.
    Predicted slopes are ``lam + b/p2`` and ``lam + gamma - 1 + b/p2`` with
    ``nu(Omega_t) ~ 2^(t b)``; for the one-dimensional power weight with
    ``beta = p2 (1/p1 - gamma)`` these are ``lam + 1/p1 - gamma`` and
    ``lam - 1 + 1/p1``.
    """
    widths = sorted(int(w) for w in window_growth)
    if not widths or widths[0] < 5:
        raise InvalidArgumentError("window widths must be at least 5")
    W = widths[-1]
    policy = TruncationPolicy(-W, W)
    f = f if f is not None else PiecewisePowerFunction.annulus_indicator(1)
    spec = target_spec(params.with_(lam=0.0), "herz", policy)
    inner, _ = annulus_inner_norms(_potential(f, params), spec)
    b = annulus_exponent(params.measure)
    out = []
    for lam in lambda_grid:
        lam = float(lam)
        partial = {}
        res = None
        for w in widths:
            sub = {t: v for t, v in inner.items() if -w <= t <= w}
            res = herz_from_inner_norms(sub, lam, params.q2, TruncationPolicy(-w, w),
                                        open_sides=("minus", "plus"))
            partial[w] = res.ledger.partial
        sl = res.ledger.slopes
        minus, plus = sl.get("minus", math.nan), sl.get("plus", math.nan)
        # decay toward -inf needs a positive slope; toward +inf a negative one
        converged = bool(-minus < -1e-6 and plus < -1e-6)
        pred = (lam + b / params.p2, lam + params.gamma - 1.0 + b / params.p2)
        out.append(DivergenceRecord(lam, converged, (minus, plus), pred, partial))
    return out


# ---------------------------------------------------------------------------


def _check_hls(params):
    if params.measure.kind != "lebesgue":
        raise InvalidArgumentError("hls_ratio uses Lebesgue measure on both sides")
    gap = 1.0 / params.p1 - 1.0 / params.p2 - params.gamma / params.n
    if abs(gap) > 1e-12:
        raise InvalidArgumentError(
            f"HLS exponent identity 1/p1 - 1/p2 = gamma/n fails (off by {gap:.3g})")
    if params.r1 is None or params.r2 is None:
        raise InvalidArgumentError("hls_ratio needs r1 and r2")


def hls_ratio(f, params, policy=None):
    """Lorentz-Herz trace ratio over Lebesgue measure under ``1/p1 - 1/p2 = gamma/n``."""
    _check_hls(params)
    return trace_ratio(f, params, "lorentz_herz", policy)


def hls_dilation_family(f, params, scales=tuple(2.0 ** np.arange(-3, 4)), policy=None):
    """HLS ratios of ``f(s x)`` over ``scales``; returns the series and its drift."""
    _check_hls(params)
    series = RatioSeries("dilation")
    for s in scales:
        tr = hls_ratio(f.dilate(float(s)), params, policy)
        series.append(float(s), tr.source, tr.target, tr.diverged)
    r = np.array(series.ratios)
    drift = float(r.max() / r.min() - 1.0)
    return series, drift


# ---------------------------------------------------------------------------


@dataclass
class LimitingResult:
    ratio_r1: float
    ratio_explore: float
    r_explore: float
    base: TraceResult
    explore: TraceResult
    flags: tuple = ("exploratory: open question",)

    def to_dict(self):
        return {"ratio_r1": self.ratio_r1, "ratio_explore": self.ratio_explore,
                "r_explore": self.r_explore, "base": self.base.to_dict(ledgers=False),
                "explore": self.explore.to_dict(ledgers=False), "flags": list(self.flags)}


def limiting_case_probe(f, params, r_explore=None, policy=None):
    """Limiting ``p1 = p2 = p`` trace ratio with a Lorentz ``(p, 1)`` source,
    plus the same ratio with ``(p, r)`` for some ``1 < r < p`` (exploratory)."""
    cls = classify_params(params, "limiting")
    if not cls.admissible:
        raise InvalidArgumentError("inadmissible limiting-case parameters: "
                                   + "; ".join(cls.violated_conditions))
    p = params.p1
    if r_explore is None:
        r_explore = 0.5 * (1.0 + p)
    if not 1.0 < r_explore < p:
        raise InvalidArgumentError("exploratory r must lie strictly between 1 and p")
    base = trace_ratio(f, params, "herz", policy, source_family="lorentz_herz", source_r=1.0)
    expl = trace_ratio(f, params, "herz", policy, source_family="lorentz_herz", source_r=r_explore)
    return LimitingResult(base.ratio, expl.ratio, r_explore, base, expl)


# ---------------------------------------------------------------------------


def trace_family(params):
    """Indicators, truncations ``f_k`` and a non-dyadic dilation of the last one,
    which is the extension step.  (A dyadic dilation would leave the ratio
    exactly unchanged.)"""
    f = lambda k: PiecewisePowerFunction.truncated_power(k, params.lam, params.p1)
    return [
        ("chi(0,1)", PiecewisePowerFunction.indicator(0.0, 1.0)),
        ("chi_Omega1", PiecewisePowerFunction.annulus_indicator(1)),
        ("f_2", f(2)),
        ("f_4", f(4)),
        ("f_8", f(8)),
        ("f_8(1.5x)", f(8).dilate(1.5)),
    ]


@dataclass
class SweepResult:
    params: list
    names: list
    ratios: list
    converged: list
    last_step_change: list
    truncation_growth: list

    def to_dict(self):
        return {"params": [p.to_dict() for p in self.params], "names": self.names,
                "ratios": self.ratios, "converged": self.converged,
                "last_step_change": self.last_step_change,
                "truncation_growth": self.truncation_growth}


def trace_sweep(param_list, family=trace_family, policy=None):
    """Trace ratios of a fixed family for each admissible parameter tuple.

    ``last_step_change`` is the relative change of the family supremum when
    the last member is added.  ``truncation_growth`` is ``ratio(f_8)/ratio(f_4) - 1``
    when both are members: with ``q1 = q2`` the truncation ratios approach
    their bound only at rate ~1/k.
    """
    all_ratios, all_conv, change, growth = [], [], [], []
    names = None
    for P in param_list:
        cls = classify_params(P, "MT")
        if not cls.admissible:
            raise InvalidArgumentError("inadmissible sweep tuple: " + "; ".join(cls.violated_conditions))
        members = family(P)
        names = [n for n, _ in members]
        rats, conv = [], []
        for _, f in members:
            tr = trace_ratio(f, P, "herz", policy)
            rats.append(tr.ratio)
            conv.append(not tr.diverged)
        before, after = max(rats[:-1]), max(rats)
        all_ratios.append(rats)
        all_conv.append(conv)
        change.append(abs(after - before) / before)
        if "f_4" in names and "f_8" in names:
            growth.append(rats[names.index("f_8")] / rats[names.index("f_4")] - 1.0)
        else:
            growth.append(math.nan)
    return SweepResult(list(param_list), names or [], all_ratios, all_conv, change, growth)
