"""Radial expansions of the shape operator of geodesic spheres and of the
curvature norms built from it.

Every function returns exact series; results are cached because callers
(the numeric layer in particular) ask for the same derivations repeatedly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .algebra import EndoPolynomial, EndoSeries, ScalarPolynomial, ScalarSeries
from .reduce import q_contract, series_trace

_n = ScalarPolynomial.gen("n")
_C = ScalarPolynomial.gen("C")
_H = ScalarPolynomial.gen("H")


def series_mul(a: EndoSeries, b: EndoSeries) -> EndoSeries:
    return a * b


def series_derivative(s: EndoSeries) -> EndoSeries:
    return s.derivative()


@lru_cache(maxsize=None)
def shape_jets(kmax: int) -> tuple[EndoPolynomial, ...]:
    """Taylor jets ``C_u^(k)(0)`` of ``C_u = r sigma_u`` for ``k <= kmax``.

    Ledger's recursion with the two extreme terms of the Leibniz sum moved
    to the left: ``(k+1) C^(k) = -k(k-1) R^(k-2) - sum_{l=1}^{k-1} binom(k,l) C^(l) C^(k-l)``.
    """
    jets = [EndoPolynomial.identity(), EndoPolynomial()]
    for k in range(2, kmax + 1):
        rhs = EndoPolynomial.word((k - 2,), -k * (k - 1))
        for ell in range(1, k):
            rhs = rhs - jets[ell] * jets[k - ell] * comb(k, ell)
        jets.append(rhs * Fraction(1, k + 1))
    return tuple(jets[: kmax + 1])


@lru_cache(maxsize=None)
def ledger_series(order: int) -> EndoSeries:
    """Parallel-transported shape operator ``sigma_u(r)`` through ``r**order``."""
    if order < -1:
        raise ValueError("order must be >= -1")
    jets = shape_jets(order + 1)
    coeffs = {k - 1: jets[k] * Fraction(1, factorial(k)) for k in range(order + 2)}
    return EndoSeries(coeffs, order)


def curvature_series(order: int) -> EndoSeries:
    """``R_nu`` along the geodesic: ``sum_k r^k/k! R_u^(k)``."""
    return EndoSeries(
        {k: EndoPolynomial.word((k,), Fraction(1, factorial(k))) for k in range(order + 1)},
        order,
    )


def riccati_residual(order: int) -> EndoSeries:
    """``sigma' + sigma^2 + R_nu`` through ``r**order``; vanishes identically."""
    sigma = ledger_series(order + 1)
    return (sigma.derivative() + sigma * sigma + curvature_series(order)).truncate(order)


@lru_cache(maxsize=None)
def trace_sigma(order: int = 5) -> ScalarSeries:
    return series_trace(ledger_series(order))


def _sigma_traces(order: int):
    """Traced building blocks, all known through ``r**order``."""
    sigma = ledger_series(order + 3)
    dsigma = sigma.derivative()
    s2 = sigma * sigma
    tr = series_trace(sigma)
    tr2 = series_trace(s2)
    return sigma, dsigma, s2, tr, tr2


@lru_cache(maxsize=None)
def ricS_norm_series(order: int = 2) -> ScalarSeries:
    """Pointwise ``|Ric^S|^2`` on the geodesic sphere through ``r**order``."""
    sigma, dsigma, s2, tr, tr2 = _sigma_traces(order)
    tr_d = series_trace(dsigma)
    tr_sd = series_trace(sigma * dsigma)
    tr_dd = series_trace(dsigma * dsigma)
    out = (
        2 * _C * (tr * tr)
        + (tr * tr) * tr2
        + 2 * _C * tr_d
        + 2 * (tr * tr_sd)
        + tr_dd
        + (_n - 1) * _C * _C
    )
    return out.truncate(order)


def sigma4_trace(order: int = 2) -> ScalarSeries:
    sigma = ledger_series(order + 3)
    s2 = sigma * sigma
    return series_trace(s2 * s2).truncate(order)


@lru_cache(maxsize=None)
def rS_norm_series(order: int = 2) -> ScalarSeries:
    """Pointwise ``|R^S|^2`` on the geodesic sphere through ``r**order``."""
    sigma, _, s2, _, tr2 = _sigma_traces(order)
    const = Fraction(2, 3) * (_n - 4) * ((_n + 2) * _H - _C * _C) + 4 * _H
    out = (
        2 * (tr2 * tr2)
        - 2 * series_trace(s2 * s2)
        + 4 * q_contract(sigma, sigma)
        + const
    )
    return out.truncate(order)


@lru_cache(maxsize=None)
def ball_integrand_series(order: int = 3) -> tuple[ScalarSeries, ScalarSeries, ScalarSeries]:
    """``Tr(R_nu o sigma)``, ``Tr(sigma^3)`` and ``Tr(sigma) Tr(sigma^2)``."""
    sigma = ledger_series(order + 2)
    rnu_sigma = series_trace(curvature_series(order + 3) * sigma)
    s3 = series_trace(sigma * sigma * sigma)
    tr = series_trace(sigma)
    trtr2 = tr * series_trace(sigma * sigma)
    return rnu_sigma.truncate(order), s3.truncate(order), trtr2.truncate(order)
