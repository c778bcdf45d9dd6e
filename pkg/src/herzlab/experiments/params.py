"""Trace-inequality parameters and the hypothesis checks of the trace theorems."""

from dataclasses import dataclass, field, asdict
import math

from ..errors import InvalidArgumentError
from ..measure import Measure, satisfies_ball_growth

__all__ = ["TraceParams", "Classification", "classify_params", "matched_beta", "THEOREMS"]

THEOREMS = ("MT", "MT_LH", "limiting")


@dataclass(frozen=True)
class TraceParams:
    gamma: float
    p1: float
    p2: float
    q1: float
    q2: float
    lam: float = 0.0
    n: int = 1
    measure: Measure = field(default_factory=Measure.lebesgue)
    r1: float = None
    r2: float = None

    def __post_init__(self):
        for name in ("gamma", "p1", "p2", "q1", "q2", "lam"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or math.isnan(v):
                raise InvalidArgumentError(f"{name} must be a real number")
        if self.measure.n != self.n:
            raise InvalidArgumentError("measure dimension does not match n")

    @property
    def alpha(self):
        """Plus-side decay exponent ``n/p1 - n + lam`` from the trace estimate."""
        return self.n / self.p1 - self.n + self.lam

    @property
    def delta(self):
        """Minus-side growth exponent ``n/p1 - gamma + lam``."""
        return self.n / self.p1 - self.gamma + self.lam

    @property
    def growth_exponent(self):
        """Ball-growth exponent ``p2 (1/p1 - gamma/n)`` required of the target measure."""
        return self.p2 * (1.0 / self.p1 - self.gamma / self.n)

    def with_(self, **kw):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(kw)
        return TraceParams(**d)

    def to_dict(self):
        d = asdict(self)
        d["measure"] = self.measure.to_config()
        return d


def matched_beta(p1, p2, gamma):
    """``beta = p2 (1/p1 - gamma)``, the one-dimensional power weight exponent."""
    return p2 * (1.0 / p1 - gamma)


@dataclass(frozen=True)
class Classification:
    admissible: bool
    violated_conditions: tuple


def classify_params(params, theorem="MT"):
    """Evaluate each hypothesis of the chosen trace theorem literally.

    ``MT``: Herz trace inequality; ``MT_LH``: its Lorentz-Herz version;
    ``limiting``: the ``p1 = p2`` case with a Lorentz (p, 1) source.
    """
    if theorem not in THEOREMS:
        raise InvalidArgumentError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")
    P = params
    n = P.n
    bad = []

    def need(cond, label):
        if not cond:
            bad.append(label)

    if theorem == "limiting":
        p = P.p1
        need(P.p1 == P.p2, "p1 = p2 = p")
        need(1 < p < math.inf, "1 < p < inf")
        need(1 <= P.q1, "1 <= q1")
        need(P.q1 <= P.q2, "q1 <= q2")
        need(P.q2 < math.inf, "q2 < inf")
        need(0 < P.gamma < n / p, "0 < gamma < n/p")
        need(P.gamma - n / p < P.lam, "gamma - n/p < lambda")
        need(P.lam < n - n / p, "lambda < n - n/p")
        need(satisfies_ball_growth(P.measure, 1.0 - P.gamma * p / n),
             "mu(B) <~ m(B)^(1 - gamma p/n)")
        return Classification(not bad, tuple(bad))

    need(1 < P.p1, "1 < p1")
    need(P.p1 < P.p2, "p1 < p2")
    need(P.p2 < math.inf, "p2 < inf")
    need(1 <= P.q1, "1 <= q1")
    need(P.q1 <= P.q2, "q1 <= q2")
    need(P.q2 < math.inf, "q2 < inf")
    need(0 < P.gamma, "0 < gamma")
    need(P.gamma < n / P.p1, "gamma < n/p1")
    need(P.gamma - n / P.p1 < P.lam, "gamma - n/p1 < lambda")
    need(P.lam < n - n / P.p1, "lambda < n - n/p1")
    expo = P.growth_exponent
    need(expo > 0 and satisfies_ball_growth(P.measure, expo),
         "mu(B) <~ m(B)^(p2 (1/p1 - gamma/n))")
    if theorem == "MT_LH":
        need(P.r1 is not None and P.r2 is not None, "r1, r2 given")
        if P.r1 is not None and P.r2 is not None:
            both_inf = math.isinf(P.r1) and math.isinf(P.r2)
            need(both_inf or 1 <= P.r1 < P.r2 <= math.inf, "1 <= r1 < r2 <= inf or r1 = r2 = inf")
        need(n * (1.0 / P.p1 - 1.0 / P.p2) <= P.gamma + 1e-12, "n (1/p1 - 1/p2) <= gamma")
    return Classification(not bad, tuple(bad))
