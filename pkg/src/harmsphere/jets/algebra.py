"""Exact algebra for radial jet expansions.

Two coefficient rings live here:

* ``EndoPolynomial`` -- noncommutative polynomials in the curvature jets
  ``R^(k)`` acting on the orthogonal complement of the radial direction.
  A word is a tuple of nonnegative ints, ``(0, 2)`` meaning ``R_u R''_u``;
  the empty word is the identity ``I_u``.
* ``ScalarPolynomial`` -- commutative polynomials in the named generators
  ``n, C, H, L, T2, Q0`` plus residual trace monomials.

``LaurentSeries`` is a truncated Laurent series in ``r`` over either ring
(and over plain floats, see :mod:`harmsphere.spectra`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Any, Callable, Iterable, Mapping

Word = tuple[int, ...]
IDENTITY: Word = ()

GENERATORS = ("n", "C", "H", "L", "T2", "Q0")


class TruncationError(ValueError):
    """Requested a coefficient beyond the known order of a series."""


def jet(k: int) -> Word:
    """The single-letter word ``R_u^(k)``."""
    if k < 0:
        raise ValueError("jet order must be nonnegative")
    return (k,)


def word_str(word: Word) -> str:
    return "I" if not word else " ".join(f"R{k}" for k in word)


def _parse_word(text: str) -> Word:
    text = text.strip()
    if text == "I":
        return ()
    return tuple(int(tok[1:]) for tok in text.split())


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# noncommutative polynomials


class EndoPolynomial:
    """Finite Q-linear combination of jet words."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, Any] | None = None):
        clean: dict[Word, Fraction] = {}
        for w, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[tuple(w)] = clean.get(tuple(w), Fraction(0)) + c
        self._terms = {w: c for w, c in clean.items() if c}

    @classmethod
    def identity(cls) -> EndoPolynomial:
        return cls({IDENTITY: 1})

    @classmethod
    def word(cls, word: Word, coeff: Any = 1) -> EndoPolynomial:
        return cls({tuple(word): coeff})

    @property
    def terms(self) -> dict[Word, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, EndoPolynomial):
            return self._terms == other._terms
        if isinstance(other, Number) and other == 0:
            return not self._terms
        return NotImplemented

    def __add__(self, other: EndoPolynomial) -> EndoPolynomial:
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return EndoPolynomial(out)

    def __neg__(self) -> EndoPolynomial:
        return EndoPolynomial({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: EndoPolynomial) -> EndoPolynomial:
        return self + (-other)

    def __mul__(self, other: Any) -> EndoPolynomial:
        if isinstance(other, EndoPolynomial):
            out: dict[Word, Fraction] = {}
            for w1, c1 in self._terms.items():
                for w2, c2 in other._terms.items():
                    w = w1 + w2
                    out[w] = out.get(w, Fraction(0)) + c1 * c2
            return EndoPolynomial(out)
        c = Fraction(other)
        return EndoPolynomial({w: c * v for w, v in self._terms.items()})

    def __rmul__(self, other: Any) -> EndoPolynomial:
        return self * other

    def flat(self) -> EndoPolynomial:
        """Drop every word that contains a curvature jet."""
        return EndoPolynomial({w: c for w, c in self._terms.items() if not w})

    def __repr__(self) -> str:
        return f"EndoPolynomial({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        items = sorted(self._terms.items(), key=lambda t: (len(t[0]), t[0]))
        return _join_terms((c, word_str(w) if w else "") for w, c in items)


def _join_terms(pairs: Iterable[tuple[Fraction, str]]) -> str:
    out = []
    for i, (c, mono) in enumerate(pairs):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_frac_str(mag)}*{mono}"
        else:
            body = _frac_str(mag)
        if i == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# ---------------------------------------------------------------------------
# scalar polynomials


@dataclass(frozen=True)
class CyclicTrace:
    """Residual ``Tr(word)``; ``word`` is already in canonical form."""

    word: Word

    def __str__(self) -> str:
        return f"tr({word_str(self.word)})"


@dataclass(frozen=True)
class QBracket:
    """Residual ``sum_i Tr(F o R^(order)(e_i, .) G e_i)``."""

    order: int
    left: Word
    right: Word

    def __str__(self) -> str:
        return f"Q{self.order}({word_str(self.left)} | {word_str(self.right)})"


TraceMonomial = CyclicTrace | QBracket
Generator = Any  # str from GENERATORS, or a TraceMonomial
Monomial = tuple[tuple[Generator, int], ...]


def _gen_key(g: Generator) -> tuple:
    if isinstance(g, str):
        return (0, GENERATORS.index(g), "")
    return (1, 0, str(g))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: dict[Generator, int] = dict(a)
    for g, e in b:
        exps[g] = exps.get(g, 0) + e
    return tuple(sorted(exps.items(), key=lambda t: _gen_key(t[0])))


def _mono_str(m: Monomial) -> str:
    return "*".join(str(g) if e == 1 else f"{g}^{e}" for g, e in m)


def is_residual(g: Generator) -> bool:
    return not isinstance(g, str)


class ScalarPolynomial:
    """Commutative polynomial with exact rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Any] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                m = tuple(sorted(((g, e) for g, e in m if e), key=lambda t: _gen_key(t[0])))
                clean[m] = clean.get(m, Fraction(0)) + c
        self._terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def const(cls, c: Any) -> ScalarPolynomial:
        return cls({(): c})

    @classmethod
    def gen(cls, g: Generator, coeff: Any = 1) -> ScalarPolynomial:
        if isinstance(g, str) and g not in GENERATORS:
            raise ValueError(f"unknown generator {g!r}")
        return cls({((g, 1),): coeff})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def generators(self) -> set[Generator]:
        return {g for m in self._terms for g, _ in m}

    def residuals(self) -> set[Generator]:
        return {g for g in self.generators() if is_residual(g)}

    def coefficient_of(self, *gens: Generator) -> Fraction:
        """Coefficient of the monomial that is the product of ``gens``."""
        m = _mono_mul((), tuple((g, 1) for g in gens))
        return self._terms.get(m, Fraction(0))

    def part_with(self, g: Generator) -> ScalarPolynomial:
        """Sum of the terms whose monomial contains ``g``."""
        return ScalarPolynomial({m: c for m, c in self._terms.items() if any(x == g for x, _ in m)})

    def without(self, *gens: Generator) -> ScalarPolynomial:
        return ScalarPolynomial(
            {m: c for m, c in self._terms.items() if not any(x in gens for x, _ in m)}
        )

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ScalarPolynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == ScalarPolynomial.const(other)
        return NotImplemented

    def _coerce(self, other: Any) -> ScalarPolynomial:
        if isinstance(other, ScalarPolynomial):
            return other
        return ScalarPolynomial.const(other)

    def __add__(self, other: Any) -> ScalarPolynomial:
        if isinstance(other, LaurentSeries):
            return NotImplemented
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return ScalarPolynomial(out)

    __radd__ = __add__

    def __neg__(self) -> ScalarPolynomial:
        return ScalarPolynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Any) -> ScalarPolynomial:
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> ScalarPolynomial:
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> ScalarPolynomial:
        if isinstance(other, LaurentSeries):
            return NotImplemented
        other = self._coerce(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return ScalarPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> ScalarPolynomial:
        out = ScalarPolynomial.const(1)
        for _ in range(k):
            out = out * self
        return out

    def evaluate(
        self,
        values: Mapping[Generator, Any],
        residual: Callable[[Generator], Any] | None = None,
    ) -> Any:
        """Substitute numbers for generators.

        Missing named generators raise ``KeyError``. Residual monomials are
        passed to ``residual``; without it they raise ``KeyError`` too.
        """
        total: Any = 0
        for m, c in self._terms.items():
            term: Any = c
            for g, e in m:
                if g in values:
                    val = values[g]
                elif is_residual(g) and residual is not None:
                    val = residual(g)
                else:
                    raise KeyError(f"no value bound for generator {g}")
                term = term * val**e
            total = total + term
        return total

    def __repr__(self) -> str:
        return f"ScalarPolynomial({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"

        def key(item):
            m, _ = item
            return (sum(e for _, e in m), [(_gen_key(g), e) for g, e in m])

        items = sorted(self._terms.items(), key=key)
        return _join_terms((c, _mono_str(m)) for m, c in items)


_FACTOR = re.compile(r"(tr\([^)]*\)|Q\d+\([^)]*\)|[A-Za-z][A-Za-z0-9]*|\d+(?:/\d+)?)(?:\^(\d+))?")


def _parse_generator(tok: str) -> Generator:
    if tok.startswith("tr("):
        return CyclicTrace(_parse_word(tok[3:-1]))
    if tok.startswith("Q") and "(" in tok:
        order = int(tok[1 : tok.index("(")])
        left, right = tok[tok.index("(") + 1 : -1].split("|")
        return QBracket(order, _parse_word(left), _parse_word(right))
    if tok not in GENERATORS:
        raise ValueError(f"unknown generator {tok!r}")
    return tok


def parse_polynomial(text: str) -> ScalarPolynomial:
    """Inverse of ``str(ScalarPolynomial)``."""
    text = text.strip()
    if text == "0":
        return ScalarPolynomial()
    # split on binary +/- (no +/- ever occurs inside generator names)
    pieces = re.split(r"\s([+-])\s", text)
    signs = ["+"] + pieces[1::2]
    out = ScalarPolynomial()
    for sign, body in zip(signs, pieces[0::2]):
        body = body.strip()
        if body.startswith("-"):
            sign = "-" if sign == "+" else "+"
            body = body[1:]
        coeff = Fraction(1)
        mono: list[tuple[Generator, int]] = []
        for part in _split_factors(body):
            m = _FACTOR.fullmatch(part)
            if m is None:
                raise ValueError(f"cannot parse factor {part!r}")
            tok, exp = m.group(1), int(m.group(2) or 1)
            if tok[0].isdigit():
                coeff *= Fraction(tok) ** exp
            else:
                mono.append((_parse_generator(tok), exp))
        out = out + ScalarPolynomial({tuple(mono): coeff if sign == "+" else -coeff})
    return out


def _split_factors(body: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


# ---------------------------------------------------------------------------
# truncated Laurent series


class LaurentSeries:
    """Laurent series in ``r`` known exactly through power ``order``.

    Coefficients may be any ring element supporting ``+``, ``*`` and truth
    testing (zero is falsy). Products are noncommutative-safe: ``a * b``
    multiplies coefficients as ``ca * cb``.

    A product is known through ``min(a.order + val(b), b.order + val(a))``,
    which is the honest bound when valuations are negative.
    """

    __slots__ = ("order", "_coeffs")

    def __init__(self, coeffs: Mapping[int, Any], order: int):
        self.order = int(order)
        self._coeffs = {int(p): c for p, c in coeffs.items() if p <= order and c}

    # subclasses override to build a zero coefficient
    @staticmethod
    def _zero() -> Any:
        return 0

    def _new(self, coeffs: Mapping[int, Any], order: int):
        return type(self)(coeffs, order)

    @property
    def coeffs(self) -> dict[int, Any]:
        return dict(self._coeffs)

    def powers(self) -> list[int]:
        return sorted(self._coeffs)

    def valuation(self) -> int:
        return min(self._coeffs) if self._coeffs else self.order + 1

    def coefficient(self, power: int) -> Any:
        if power > self.order:
            raise TruncationError(f"power {power} exceeds truncation order {self.order}")
        return self._coeffs.get(power, self._zero())

    __getitem__ = coefficient

    def truncate(self, order: int):
        return self._new(self._coeffs, min(order, self.order))

    def is_zero(self) -> bool:
        return not self._coeffs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self.order == other.order and self._coeffs == other._coeffs

    def __add__(self, other: Any):
        if isinstance(other, LaurentSeries):
            order = min(self.order, other.order)
            out = {p: c for p, c in self._coeffs.items() if p <= order}
            for p, c in other._coeffs.items():
                if p <= order:
                    out[p] = out[p] + c if p in out else c
            return self._new(out, order)
        if self.order < 0:
            raise TruncationError("cannot add a constant to a series truncated below r^0")
        out = dict(self._coeffs)
        out[0] = out[0] + other if 0 in out else other
        return self._new(out, self.order)

    def __radd__(self, other: Any):
        return self + other

    def __neg__(self):
        return self._new({p: -c for p, c in self._coeffs.items()}, self.order)

    def __sub__(self, other: Any):
        return self + (-other)

    def __rsub__(self, other: Any):
        return (-self) + other

    def __mul__(self, other: Any):
        if isinstance(other, LaurentSeries):
            va, vb = self.valuation(), other.valuation()
            order = min(self.order + vb, other.order + va)
            out: dict[int, Any] = {}
            for p, a in self._coeffs.items():
                for q, b in other._coeffs.items():
                    s = p + q
                    if s <= order:
                        prod = a * b
                        out[s] = out[s] + prod if s in out else prod
            return self._new(out, order)
        return self._new({p: c * other for p, c in self._coeffs.items()}, self.order)

    def __rmul__(self, other: Any):
        if isinstance(other, LaurentSeries):
            return other * self
        return self._new({p: other * c for p, c in self._coeffs.items()}, self.order)

    def __pow__(self, k: int):
        if k < 1:
            raise ValueError("only positive integer powers")
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def derivative(self):
        return self._new({p - 1: c * p for p, c in self._coeffs.items() if p}, self.order - 1)

    def shift(self, k: int):
        """Multiply by ``r**k``."""
        return self._new({p + k: c for p, c in self._coeffs.items()}, self.order + k)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(order={self.order}, {self})"

    def __str__(self) -> str:
        body = "; ".join(f"{p}: {self._coeffs[p]}" for p in self.powers())
        return f"sum({body})"


class EndoSeries(LaurentSeries):
    """Series whose coefficients are ``EndoPolynomial``."""

    __slots__ = ()

    @staticmethod
    def _zero() -> EndoPolynomial:
        return EndoPolynomial()

    def flat(self) -> EndoSeries:
        return EndoSeries({p: c.flat() for p, c in self._coeffs.items()}, self.order)


class ScalarSeries(LaurentSeries):
    """Series whose coefficients are ``ScalarPolynomial``.

    ``str`` gives the textual form ``sum(power: polynomial; ...)`` with
    fractions written ``p/q``; :func:`parse_scalar_series` reads it back.
    """

    __slots__ = ()

    @staticmethod
    def _zero() -> ScalarPolynomial:
        return ScalarPolynomial()

    def __add__(self, other: Any):
        if not isinstance(other, (LaurentSeries, ScalarPolynomial)):
            other = ScalarPolynomial.const(other)
        return super().__add__(other)

    def __mul__(self, other: Any):
        if isinstance(other, (int, Fraction)):
            other = ScalarPolynomial.const(other)
        return super().__mul__(other)

    def __rmul__(self, other: Any):
        if isinstance(other, (int, Fraction)):
            other = ScalarPolynomial.const(other)
        return super().__rmul__(other)

    def to_text(self) -> str:
        return f"order {self.order}: {self}"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coefficients": {
                str(p): {(_mono_str(m) or "1"): _frac_str(c) for m, c in self._coeffs[p].items()}
                for p in self.powers()
            },
        }


def coefficient(s: LaurentSeries, power: int) -> Any:
    """Coefficient of ``r**power``; zero if absent, error past truncation."""
    return s.coefficient(power)


def parse_scalar_series(text: str, order: int | None = None) -> ScalarSeries:
    """Read ``sum(p: poly; ...)`` or ``order N: sum(...)``."""
    text = text.strip()
    m = re.fullmatch(r"order\s+(-?\d+):\s*(sum\(.*\))", text, flags=re.S)
    if m:
        order, text = int(m.group(1)), m.group(2)
    if not (text.startswith("sum(") and text.endswith(")")):
        raise ValueError("expected sum(...)")
    body = text[4:-1].strip()
    coeffs: dict[int, ScalarPolynomial] = {}
    if body:
        for entry in body.split(";"):
            p, poly = entry.split(":", 1)
            coeffs[int(p)] = parse_polynomial(poly)
    if order is None:
        order = max(coeffs) if coeffs else 0
    return ScalarSeries(coeffs, order)
