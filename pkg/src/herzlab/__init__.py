"""Numerical toolkit for Riesz potentials on Herz and Lorentz-Herz spaces."""

from .errors import (ConfigError, DivergenceError, HerzlabError,
                     InsufficientDataError, InvalidArgumentError, SingularityError)
from .measure import Ball, Measure, ball_growth_report, ball_mass, satisfies_ball_growth
from .piecewise import Piece, PiecewisePowerFunction
from .rearrange import (decreasing_rearrangement, distribution_function,
                        maximal_average, rearrangement_profile)
from .norms import (HerzResult, HerzTermLedger, NormSpec, TruncationPolicy,
                    herz_norm, lorentz_herz_norm, lorentz_norm, lp_norm, tail_exponent)

__version__ = "0.1.0"
