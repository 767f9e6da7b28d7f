"""Exact symbolic engine for radial jet expansions in harmonic spaces."""

from .algebra import (
    GENERATORS,
    IDENTITY,
    CyclicTrace,
    EndoPolynomial,
    EndoSeries,
    LaurentSeries,
    QBracket,
    ScalarPolynomial,
    ScalarSeries,
    TruncationError,
    coefficient,
    jet,
    parse_polynomial,
    parse_scalar_series,
    word_str,
)
from .expansions import (
    ball_integrand_series,
    curvature_series,
    ledger_series,
    rS_norm_series,
    ricS_norm_series,
    riccati_residual,
    series_derivative,
    series_mul,
    shape_jets,
    sigma4_trace,
    trace_sigma,
)
from .reduce import canonical_trace_word, q_bracket, q_contract, series_trace, trace_word

__all__ = [
    "GENERATORS",
    "IDENTITY",
    "CyclicTrace",
    "EndoPolynomial",
    "EndoSeries",
    "LaurentSeries",
    "QBracket",
    "ScalarPolynomial",
    "ScalarSeries",
    "TruncationError",
    "ball_integrand_series",
    "canonical_trace_word",
    "coefficient",
    "curvature_series",
    "jet",
    "ledger_series",
    "parse_polynomial",
    "parse_scalar_series",
    "q_bracket",
    "q_contract",
    "rS_norm_series",
    "ricS_norm_series",
    "riccati_residual",
    "series_derivative",
    "series_mul",
    "series_trace",
    "shape_jets",
    "sigma4_trace",
    "trace_sigma",
    "trace_word",
    "word_str",
]
