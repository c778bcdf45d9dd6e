"""Built-in test functions, admissible parameter tuples and named experiments."""

from dataclasses import dataclass
import math

from ..measure import Measure
from ..piecewise import Piece, PiecewisePowerFunction as PPF
from .params import TraceParams, matched_beta

__all__ = ["CatalogEntry", "CATALOG", "catalog", "gns_exponents_for", "sweep_tuples",
           "NAMED_EXPERIMENTS", "named_experiment"]


@dataclass(frozen=True)
class CatalogEntry:
    """``f`` lies in ``L^p`` exactly for ``p_min < p < p_max`` (interval ends may be inf)."""

    name: str
    f: PPF
    p_max: float = math.inf
    p_min: float = 0.0

    def p_grid(self, k=3):
        """``k`` exponents strictly inside ``(max(1, p_min), p_max)``, capped at 6."""
        lo = max(1.0, self.p_min)
        hi = min(self.p_max, 6.0)
        if math.isinf(self.p_max):
            pts = [lo + (hi - lo) * (i + 1) / k for i in range(k)]
        else:
            pts = [lo + (hi - lo) * (i + 1) / (k + 1) for i in range(k)]
        return [round(p, 6) for p in pts]


def _mixed(*pieces):
    return PPF([Piece(*p) for p in pieces])


CATALOG = (
    CatalogEntry("chi(0,1)", PPF.indicator(0.0, 1.0)),
    CatalogEntry("chi(-1,1)", PPF.indicator(-1.0, 1.0)),
    CatalogEntry("chi_Omega0", PPF.annulus_indicator(0)),
    CatalogEntry("chi_Omega1", PPF.annulus_indicator(1)),
    CatalogEntry("chi_Omega0+chi_Omega2", PPF.annulus_indicator(0) + PPF.annulus_indicator(2)),
    CatalogEntry("3chi[0,1]+chi[2,4]", _mixed((0, 1, 3.0, 0.0), (2, 4, 1.0, 0.0))),
    CatalogEntry("chi(3,5)", PPF.indicator(3.0, 5.0)),
    CatalogEntry("-2chi(-1,0)+chi(0,2)", _mixed((-1, 0, -2.0, 0.0), (0, 2, 1.0, 0.0))),
    CatalogEntry("|x|^-1/2 on (-1,1)", PPF.symmetric_power(0.0, 1.0, -0.5), p_max=2.0),
    CatalogEntry("x^-1/4 on (0,1)", PPF.power(0.0, 1.0, -0.25), p_max=4.0),
    CatalogEntry("2x^-1/3 on (0,2)", PPF.power(0.0, 2.0, -1.0 / 3.0, 2.0), p_max=3.0),
    CatalogEntry("|x|^1/2 on (-1,1)", PPF.symmetric_power(0.0, 1.0, 0.5)),
    CatalogEntry("x^2 on (0,1)", PPF.power(0.0, 1.0, 2.0)),
    CatalogEntry("|x|^-2 on |x|>1", PPF.symmetric_power(1.0, math.inf, -2.0), p_min=0.5),
    CatalogEntry("x^-3/2 on (1,inf)", PPF.power(1.0, math.inf, -1.5), p_min=2.0 / 3.0),
    CatalogEntry("f_2 (lam=0, p1=2)", PPF.truncated_power(2, 0.0, 2.0)),
    CatalogEntry("f_4 (lam=0, p1=2)", PPF.truncated_power(4, 0.0, 2.0)),
    CatalogEntry("f_4(2x)", PPF.truncated_power(4, 0.0, 2.0).dilate(2.0)),
    CatalogEntry("x^-1/4 on (0,1) + x^-2 on (1,inf)",
                 _mixed((0, 1, 1.0, -0.25), (1, math.inf, 1.0, -2.0)), p_max=4.0, p_min=0.5),
    CatalogEntry("chi(-3,-2) + |x|^-1/3 on (-1,1)",
                 PPF.indicator(-3.0, -2.0) + PPF.symmetric_power(0.0, 1.0, -1.0 / 3.0), p_max=3.0),
)


def catalog():
    return list(CATALOG)


def gns_exponents_for(entry):
    """``(p1, q1, p2, q2)`` with both Lebesgue exponents inside the integrability range."""
    lo = max(1.25, entry.p_min * 1.25)
    hi = min(4.0, 0.9 * entry.p_max)
    return lo, 2.0, hi, 4.0


_SWEEP = (
    (0.25, 2.0, 3.0, 2.0, 2.0, 0.0),
    (0.25, 2.0, 3.0, 1.0, 2.0, 0.2),
    (0.25, 2.0, 4.0, 2.0, 3.0, -0.1),
    (0.1, 2.0, 2.5, 2.0, 2.0, 0.0),
    (0.3, 1.5, 2.0, 1.5, 3.0, 0.1),
    (0.2, 3.0, 4.0, 2.0, 4.0, 0.3),
    (0.5, 1.25, 1.5, 1.0, 2.0, 0.0),
    (0.4, 2.0, 5.0, 2.0, 2.0, 0.25),
    (0.15, 4.0, 6.0, 3.0, 3.0, -0.05),
    (0.25, 2.0, 3.0, 2.0, 4.0, 0.4),
)


def sweep_tuples():
    """Admissible trace-theorem tuples: ten with the power weight, two with Lebesgue measure."""
    out = [TraceParams(g, p1, p2, q1, q2, lam, measure=Measure.power_weight(matched_beta(p1, p2, g)))
           for g, p1, p2, q1, q2, lam in _SWEEP]
    out.append(TraceParams(0.25, 2.0, 4.0, 2.0, 2.0, 0.0))
    out.append(TraceParams(0.5, 1.5, 6.0, 2.0, 3.0, 0.0))
    return out


def _params(gamma, p1, p2, q1, q2, lam=0.0, measure="matched_power", **kw):
    d = {"gamma": gamma, "p1": p1, "p2": p2, "q1": q1, "q2": q2, "lambda": lam}
    if measure == "matched_power":
        d["measure"] = {"kind": "matched_power"}
    elif measure is not None:
        d["measure"] = measure
    d.update(kw)
    return d


# Named experiments are lists of config records in the CLI schema.
NAMED_EXPERIMENTS = {
    "example-3.1": (
        "Herz divergence of I_gamma chi_Omega1 across a lambda grid around (gamma - 1/p1, 1 - 1/p1)",
        [{"id": "example-3.1", "kind": "annulus_divergence",
          "params": _params(0.25, 2, 3, 2, 2),
          "family": {"lambda_grid": [-0.5, -0.25, -0.1, 0.0, 0.25, 0.45, 0.5, 0.75]}}],
    ),
    "example-3.2": (
        "Truncated powers f_k: source grows like k^(1/q1), target like k^(1/q2)",
        [{"id": "example-3.2-q1-le-q2", "kind": "optimality_fk",
          "params": _params(0.25, 2, 3, 2, 3), "family": {"k_min": 4, "k_max": 14}},
         {"id": "example-3.2-q1-gt-q2", "kind": "optimality_fk",
          "params": _params(0.25, 2, 3, 3, 2), "family": {"k_min": 4, "k_max": 14}}],
    ),
    "prop-2.2": (
        "Ball growth of the power weight and the trace ratio on balls",
        [{"id": "prop-2.2", "kind": "necessity", "params": _params(0.25, 2, 3, 2, 2),
          "family": {"radii": [2.0 ** k for k in range(-10, 11)],
                     "centers": [0.0, 0.5, 1.0, 4.0]}}],
    ),
    "thm-2.1-sweep": (
        "Trace ratios of a six-function family over twelve admissible tuples",
        [{"id": f"thm-2.1-sweep-{i:02d}", "kind": "trace_ratio",
          "params": _params(*t), "family": {"functions": "standard"}}
         for i, t in enumerate(_SWEEP)]
        + [{"id": "thm-2.1-sweep-10", "kind": "trace_ratio",
            "params": _params(0.25, 2, 4, 2, 2, measure=None), "family": {"functions": "standard"}},
           {"id": "thm-2.1-sweep-11", "kind": "trace_ratio",
            "params": _params(0.5, 1.5, 6, 2, 3, measure=None), "family": {"functions": "standard"}}],
    ),
    "cor-4.1": (
        "Hardy-Littlewood-Sobolev ratio in Lorentz-Herz norms and its dilation drift",
        [{"id": "cor-4.1", "kind": "hls",
          "params": _params(0.25, 2, 4, 1, 2, measure=None, r1=1, r2=2),
          "function": {"indicator": [0, 1]},
          "family": {"scales": [2.0 ** k for k in range(-3, 4)]}}],
    ),
    "thm-4.6": (
        "Herz interpolation inequality and the gradient form on a 2D Gaussian",
        [{"id": "thm-4.6-two-annuli", "kind": "gns",
          "params": _params(0.25, 2, 4, 2, 4, 0.1, measure=None),
          "function": {"pieces": [[-1, -0.5, 1, 0], [0.5, 1, 1, 0], [-4, -2, 1, 0], [2, 4, 1, 0]]},
          "family": {"thetas": [0, 0.25, 0.5, 0.75, 1]}},
         {"id": "thm-4.6-gaussian-2d", "kind": "gns",
          "params": _params(1, 1.5, 6, 2, 3, 0.1, measure={"kind": "lebesgue", "n": 2}, n=2),
          "function": {"radial": "gaussian", "n": 2},
          "family": {"thetas": [0, 0.25, 0.5, 0.75, 1]}},
         {"id": "thm-4.3-bump-2d", "kind": "sobolev",
          "params": _params(1, 1.5, 6, 2, 3, 0.1, measure={"kind": "lebesgue", "n": 2}, n=2),
          "function": {"radial": "bump", "n": 2, "m": 4}, "order": 1,
          "numerics": {"grid_points": 256}}],
    ),
    "thm-2.4-probe": (
        "Limiting case p1 = p2 with a Lorentz (p, 1) source and an exploratory r in (1, p)",
        [{"id": "thm-2.4-probe", "kind": "limiting_probe",
          "params": _params(0.25, 2, 2, 1, 2, measure={"kind": "power_weight", "beta": 0.5}),
          "function": {"indicator": [0, 1]}, "r_explore": 1.5}],
    ),
}


def named_experiment(name):
    """Config records of a named experiment."""
    if name not in NAMED_EXPERIMENTS:
        raise KeyError(name)
    return [dict(rec) for rec in NAMED_EXPERIMENTS[name][1]]
