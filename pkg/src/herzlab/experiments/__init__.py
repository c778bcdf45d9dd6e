"""Numerical experiments built on the norm and potential modules."""

from .params import TraceParams, Classification, classify_params, matched_beta
from .fit import ExponentFit, RatioSeries, fit_exponent
from .trace import (TraceResult, trace_ratio, necessity_check, optimality_fk,
                    annulus_divergence, hls_ratio, hls_dilation_family,
                    limiting_case_probe, trace_family, trace_sweep)
