"""Trace and bracket reduction under the pointwise identities of harmonic spaces.

Letters are symmetric endomorphisms of ``u^perp``, so ``Tr(w)`` is invariant
under rotation and reversal of ``w``; the bracket
``Q_k(F, G) = sum_i Tr(F o R^(k)(e_i, .) G e_i)`` is invariant under
swapping its slots and under reversing both words.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

from .algebra import (
    CyclicTrace,
    EndoSeries,
    QBracket,
    ScalarPolynomial,
    ScalarSeries,
    Word,
)

_n = ScalarPolynomial.gen("n")
_C = ScalarPolynomial.gen("C")
_H = ScalarPolynomial.gen("H")
_L = ScalarPolynomial.gen("L")
_T2 = ScalarPolynomial.gen("T2")
_Q0 = ScalarPolynomial.gen("Q0")


def canonical_trace_word(word: Word) -> Word:
    """Lexicographically least rotation of ``word`` or of its reversal."""
    if not word:
        return word
    candidates = []
    for w in (tuple(word), tuple(reversed(word))):
        candidates.extend(w[i:] + w[:i] for i in range(len(w)))
    return min(candidates)


_TRACE_TABLE: dict[Word, ScalarPolynomial] = {
    (): _n - 1,
    (0,): _C,
    (0, 0): _H,
    (0, 1): ScalarPolynomial(),
    (0, 2): -_T2,
    (1, 1): _T2,
    # Tr(32 R R R - 9 R' R') = L
    (0, 0, 0): (_L + 9 * _T2) * Fraction(1, 32),
}


@lru_cache(maxsize=None)
def trace_word(word: Word) -> ScalarPolynomial:
    """``Tr`` of a single word on ``u^perp``, fully reduced."""
    w = canonical_trace_word(tuple(word))
    if w in _TRACE_TABLE:
        return _TRACE_TABLE[w]
    if len(w) == 1:
        return ScalarPolynomial()  # Tr(R^(k)) = 0 for k >= 1
    return ScalarPolynomial.gen(CyclicTrace(w))


def trace_poly(poly) -> ScalarPolynomial:
    out = ScalarPolynomial()
    for w, c in poly.items():
        out = out + trace_word(w) * c
    return out


def series_trace(s: EndoSeries) -> ScalarSeries:
    """Term-wise reduced trace."""
    return ScalarSeries({p: trace_poly(c) for p, c in s.coeffs.items()}, s.order)


def canonical_bracket(left: Word, right: Word) -> tuple[Word, Word]:
    rl, rr = tuple(reversed(left)), tuple(reversed(right))
    return min((left, right), (right, left), (rl, rr), (rr, rl))


@lru_cache(maxsize=None)
def q_bracket(k: int, left: Word, right: Word) -> ScalarPolynomial:
    """Reduced ``Q_k(left, right)``.

    With an identity slot: ``Q_k(F, I) = [k == 0] C Tr(F) - Tr(F R^(k))``
    (Einstein condition; ``Ric^(k) = 0`` for ``k >= 1``).
    ``Q_0(R, R)`` is the generator ``Q0``; anything else stays residual.
    """
    left, right = canonical_bracket(tuple(left), tuple(right))
    if not left or not right:
        other = right if not left else left
        out = -trace_word(other + (k,))
        if k == 0:
            out = out + _C * trace_word(other)
        return out
    if k == 0 and left == (0,) and right == (0,):
        return _Q0
    return ScalarPolynomial.gen(QBracket(k, left, right))


def q_contract(a: EndoSeries, b: EndoSeries) -> ScalarSeries:
    """``sum_i Tr(a o R_{gamma(r)}(e_i, .) b e_i)`` as a series.

    The curvature tensor along the geodesic is ``sum_k r^k/k! R^(k)``; it is
    exact, so the result is known as far as the product ``a * b`` is.
    """
    va, vb = a.valuation(), b.valuation()
    order = min(a.order + vb, b.order + va)
    out: dict[int, ScalarPolynomial] = {}
    for p, ca in a.coeffs.items():
        for q, cb in b.coeffs.items():
            for k in range(0, order - p - q + 1):
                acc = ScalarPolynomial()
                for w1, c1 in ca.items():
                    for w2, c2 in cb.items():
                        acc = acc + q_bracket(k, w1, w2) * (c1 * c2)
                if acc:
                    s = p + q + k
                    acc = acc * Fraction(1, factorial(k))
                    out[s] = out[s] + acc if s in out else acc
    return ScalarSeries(out, order)
