"""Ratio series and log-log exponent fits."""

from dataclasses import dataclass, field
import math

import numpy as np

from ..errors import InsufficientDataError

__all__ = ["ExponentFit", "RatioSeries", "fit_exponent", "BURN_IN"]

# exponent fits ignore k below this value (pre-asymptotic regime)
BURN_IN = 4


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    max_residual: float
    window: tuple

    def to_dict(self):
        return {"slope": self.slope, "intercept": self.intercept,
                "max_residual": self.max_residual, "window": list(self.window)}


def fit_exponent(index, values, burn_in=BURN_IN):
    """Least-squares fit of ``log(value) = slope * log(index) + intercept``.

    Points with ``index < burn_in`` or a non-finite/non-positive value are
    dropped; at least two points must remain.
    """
    idx = np.asarray(index, dtype=float)
    val = np.asarray(values, dtype=float)
    keep = (idx >= burn_in) & np.isfinite(val) & (val > 0)
    if keep.sum() < 2:
        raise InsufficientDataError(
            f"exponent fit needs at least 2 points with index >= {burn_in}, got {int(keep.sum())}")
    x = np.log(idx[keep])
    y = np.log(val[keep])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.max(np.abs(A @ np.array([slope, intercept]) - y)))
    kept = idx[keep]
    return ExponentFit(float(slope), float(intercept), resid, (float(kept.min()), float(kept.max())))


@dataclass
class RatioSeries:
    family_label: str
    index: list = field(default_factory=list)
    source_norms: list = field(default_factory=list)
    target_norms: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    diverged_flags: list = field(default_factory=list)

    def append(self, index, source, target, diverged=False):
        self.index.append(index)
        self.source_norms.append(source)
        self.target_norms.append(target)
        if source > 0 and math.isfinite(source) and math.isfinite(target):
            self.ratios.append(target / source)
        else:
            self.ratios.append(math.nan)
        self.diverged_flags.append(bool(diverged))

    def to_dict(self):
        return {"family_label": self.family_label, "index": list(self.index),
                "source_norms": list(self.source_norms), "target_norms": list(self.target_norms),
                "ratios": list(self.ratios), "diverged_flags": list(self.diverged_flags)}
