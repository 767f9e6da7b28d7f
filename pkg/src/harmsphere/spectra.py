"""Heat invariants of small geodesic spheres and balls in harmonic spaces.

The symbolic series from :mod:`harmsphere.jets` are bound to the numbers of
a concrete space. Averages over a geodesic sphere are taken by substituting
the sphere means of the two direction-dependent generators ``T2`` and
``Q0``; this is exact as long as they enter linearly, which is checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Any

from . import jets
from .curvio import CurvaturePoint, InvariantReport, invariants, sphere_area
from .jets import LaurentSeries, ScalarPolynomial, ScalarSeries
from .jets.algebra import is_residual

SPHERE_ORDER = 2
BALL_ORDER = 3
VOLUME_ORDER = 6  # Tr(sigma) reduces fully through r^5


class ResidualMonomialError(ValueError):
    """A coefficient contains a trace monomial with no numeric binding."""


class RadialSeries(LaurentSeries):
    """Laurent series in ``r`` with numeric coefficients."""

    __slots__ = ()

    def integrate(self) -> RadialSeries:
        """Antiderivative vanishing at 0 (term-wise)."""
        if -1 in self._coeffs:
            raise ValueError("cannot integrate an r^-1 term")
        return RadialSeries({p + 1: c / Fraction(p + 1) for p, c in self._coeffs.items()}, self.order + 1)

    def inverse(self) -> RadialSeries:
        """``1/s`` for a series with a nonzero leading coefficient."""
        if not self._coeffs:
            raise ZeroDivisionError("series is zero to its known order")
        v = self.valuation()
        rel = self.order - v  # known relative order
        a = [self._coeffs.get(v + j, 0) for j in range(rel + 1)]
        b = [1 / a[0]]
        for j in range(1, rel + 1):
            b.append(-sum(a[i] * b[j - i] for i in range(1, j + 1)) / a[0])
        return RadialSeries({j - v: bj for j, bj in enumerate(b)}, rel - v)

    def __truediv__(self, other: Any) -> RadialSeries:
        if isinstance(other, LaurentSeries):
            return self * other.inverse()
        return RadialSeries({p: c / other for p, c in self._coeffs.items()}, self.order)

    def exp(self) -> RadialSeries:
        """``exp(s)`` for a series with positive valuation (exact for rational input)."""
        if self._coeffs and min(self._coeffs) < 1:
            raise ValueError("exp needs a series with positive valuation")
        N = self.order
        g = [self._coeffs.get(j, 0) for j in range(N + 1)]
        # f' = g' f
        f: list[Any] = [Fraction(1)] + [Fraction(0)] * N
        for m in range(1, N + 1):
            f[m] = sum(j * g[j] * f[m - j] for j in range(1, m + 1)) / m
        return RadialSeries(dict(enumerate(f)), N)

    def to_dict(self) -> dict[int, float]:
        return {p: float(self._coeffs[p]) for p in self.powers()}

    def __call__(self, r: float) -> float:
        return sum(float(c) * r**p for p, c in self._coeffs.items())


# ---------------------------------------------------------------------------
# bindings


def _reference_q0(n, C, H, L):
    """Sphere mean of ``Q0`` for a space with these ``(n, C, H, L)`` and
    ``|nabla R| = 0``: solve the two linear relations between the sextic
    invariants (the ``L`` identity and the Lichnerowicz identity)."""
    N = n * (n + 2) * (n + 4)
    normR2 = Fraction(2, 3) * n * ((n + 2) * H - C * C)
    a = N * L - 32 * n * C**3 - 144 * C * normR2  # = 112 Rhat - 32 rcirc - 27|DR|^2
    b = 2 * C * normR2  # = Rhat + 4 rcirc - |DR|^2
    rcirc0 = (112 * b - a) / 480
    rhat0 = b - 4 * rcirc0
    return (n * C**3 + 2 * rcirc0 - rhat0 / 4) / (n * (n + 2))


@dataclass(frozen=True)
class Bindings:
    """Numbers substituted for the scalar generators.

    ``mean_T2`` and ``mean_Q0`` are sphere means; ``mean_Q0=None`` means
    the value of a space with the same ``(n, C, H, L)`` and ``nabla R = 0``.
    ``policy`` decides what happens to residual trace monomials:
    ``"reject"`` raises, ``"zero"`` drops them.
    """

    n: int
    C: Any
    H: Any
    L: Any
    mean_T2: Any = 0
    mean_Q0: Any = None
    policy: str = "reject"

    def __post_init__(self):
        if self.policy not in ("reject", "zero"):
            raise ValueError("policy must be 'reject' or 'zero'")
        if self.mean_Q0 is None:
            object.__setattr__(self, "mean_Q0", _reference_q0(self.n, self.C, self.H, self.L))

    @classmethod
    def from_invariants(cls, inv: InvariantReport, policy: str = "reject") -> Bindings:
        n = inv.n
        return cls(
            n=n,
            C=inv.C,
            H=inv.H,
            L=inv.L,
            mean_T2=3 * inv.normDR2 / (n * (n + 2) * (n + 4)),
            mean_Q0=(n * inv.C**3 + 2 * inv.rcirc - inv.Rhat / 4) / (n * (n + 2)),
            policy=policy,
        )

    @classmethod
    def from_point(cls, cp: CurvaturePoint, policy: str = "reject") -> Bindings:
        return cls.from_invariants(invariants(cp), policy)

    @classmethod
    def space_form(cls, n: int, k: Any = 0) -> Bindings:
        """Closed form for constant curvature ``k`` (exact if ``k`` is)."""
        return cls(n=n, C=(n - 1) * k, H=(n - 1) * k * k, L=32 * (n - 1) * k**3)

    def symmetric_reference(self) -> Bindings:
        """Same ``(n, C, H, L)``, with ``nabla R = 0``."""
        return replace(self, mean_T2=0, mean_Q0=None)

    def values(self) -> dict[str, Any]:
        return {"n": self.n, "C": self.C, "H": self.H, "L": self.L, "T2": self.mean_T2, "Q0": self.mean_Q0}


_DIRECTIONAL = ("T2", "Q0")


def evaluate(s: ScalarSeries, b: Bindings) -> RadialSeries:
    """Bind every coefficient of ``s`` to numbers."""
    values = b.values()

    def residual(g):
        if b.policy == "reject":
            raise ResidualMonomialError(f"no binding for residual monomial {g}")
        return 0

    out = {}
    for p, poly in s.coeffs.items():
        for mono, _ in poly.items():
            deg = sum(e for g, e in mono if g in _DIRECTIONAL or is_residual(g))
            if deg > 1:
                raise ValueError(
                    f"r^{p} coefficient is nonlinear in direction-dependent generators; "
                    "sphere means cannot be substituted"
                )
        out[p] = poly.evaluate(values, residual)
    return RadialSeries(out, s.order)


# ---------------------------------------------------------------------------
# sphere series


def volume_series(b: Bindings, order: int = VOLUME_ORDER) -> RadialSeries:
    """``v(r) = r^(n-1) theta(r)`` through relative order ``order``.

    Solves ``v'/v = Tr(sigma)`` with ``v ~ r^(n-1)``.
    """
    tr = evaluate(jets.trace_sigma(order - 1), b)
    g = tr - RadialSeries({-1: b.n - 1}, tr.order)
    theta = g.integrate().exp()
    return theta.shift(b.n - 1)


def ball_volume_series(b: Bindings, order: int = VOLUME_ORDER) -> RadialSeries:
    """``int_0^r v``; the ball volume is this times ``omega_{n-1}``."""
    return volume_series(b, order).integrate()


def scalS_series(b: Bindings, order: int = VOLUME_ORDER) -> RadialSeries:
    """Scalar curvature of the geodesic sphere: ``(n-1)C + v''/v``."""
    v = volume_series(b, order)
    return v.derivative().derivative() / v + (b.n - 1) * b.C


def a0_series(b: Bindings, order: int = VOLUME_ORDER) -> RadialSeries:
    return volume_series(b, order) * sphere_area(b.n)


def a1_series(b: Bindings, order: int = VOLUME_ORDER) -> RadialSeries:
    """``a_1 = a_0 scal^S / 6``; depends on the volume function only."""
    return a0_series(b, order) * scalS_series(b, order) / 6


@lru_cache(maxsize=None)
def _gauss_scal_symbolic(order: int) -> ScalarSeries:
    sigma = jets.ledger_series(order + 2)
    tr = jets.series_trace(sigma)
    tr2 = jets.series_trace(sigma * sigma)
    n, C = ScalarPolynomial.gen("n"), ScalarPolynomial.gen("C")
    return (tr * tr - tr2 + (n - 2) * C).truncate(order)


def a1_series_gauss(b: Bindings, order: int = 3) -> RadialSeries:
    """``a_1`` assembled from the Gauss equation
    ``scal^S = scal - 2C + (Tr sigma)^2 - Tr(sigma^2)``, without ``v``."""
    scal = evaluate(_gauss_scal_symbolic(order), b)
    return a0_series(b) * scal / 6


@lru_cache(maxsize=None)
def _sphere_norms(order: int) -> tuple[ScalarSeries, ScalarSeries]:
    return jets.ricS_norm_series(order), jets.rS_norm_series(order)


def mean_ricS_norm(b: Bindings, order: int = SPHERE_ORDER) -> RadialSeries:
    return evaluate(_sphere_norms(order)[0], b)


def mean_rS_norm(b: Bindings, order: int = SPHERE_ORDER) -> RadialSeries:
    return evaluate(_sphere_norms(order)[1], b)


def a2_sphere_series(b: Bindings, order: int = SPHERE_ORDER) -> RadialSeries:
    """``a_2 = a_0 (5 scal^2 - 2 mean|Ric^S|^2 + 2 mean|R^S|^2) / 360``."""
    scal = scalS_series(b, order + 4)
    inner = 5 * (scal * scal) - 2 * mean_ricS_norm(b, order) + 2 * mean_rS_norm(b, order)
    return a0_series(b, order + 4) * inner / 360


def sphere_norm_difference(b: Bindings, order: int = SPHERE_ORDER) -> RadialSeries:
    """Sphere mean of ``|R^S|^2 - |Ric^S|^2``."""
    return mean_rS_norm(b, order) - mean_ricS_norm(b, order)


def distinguisher_sphere(b: Bindings) -> float:
    """``|nabla R|^2``-dependent part of the ``r^2`` coefficient of the mean
    of ``|R^S|^2 - |Ric^S|^2``."""
    here = sphere_norm_difference(b).coefficient(2)
    ref = sphere_norm_difference(b.symmetric_reference()).coefficient(2)
    return here - ref


# ---------------------------------------------------------------------------
# balls

# boundary weights of (Tr sigma)^3, Tr sigma Tr sigma^2, Tr sigma^3
_BOUNDARY_WEIGHTS = {
    "dirichlet": (Fraction(40, 21), Fraction(-88, 7), Fraction(320, 21)),
    "neumann": (Fraction(40, 3), Fraction(8), Fraction(32, 3)),
}


def _check_boundary(boundary: str) -> str:
    key = boundary.lower()
    if key not in _BOUNDARY_WEIGHTS:
        raise ValueError("boundary must be 'dirichlet' or 'neumann'")
    return key


@lru_cache(maxsize=None)
def boundary_integrand_series(boundary: str, order: int = BALL_ORDER) -> ScalarSeries:
    """Boundary integrand of ``a_2`` for a geodesic ball in a harmonic space:
    ``20nC Tr s - 8C Tr s + 16 Tr(R_nu s) + w1 (Tr s)^3 + w2 Tr s Tr s^2 + w3 Tr s^3``."""
    w1, w2, w3 = _BOUNDARY_WEIGHTS[_check_boundary(boundary)]
    rnu_sigma, s3, trtr2 = jets.ball_integrand_series(order)
    tr = jets.trace_sigma(order + 2)
    n, C = ScalarPolynomial.gen("n"), ScalarPolynomial.gen("C")
    out = (20 * n * C - 8 * C) * tr + 16 * rnu_sigma + w1 * (tr * tr * tr) + w2 * trtr2 + w3 * s3
    return out.truncate(order)


def mean_boundary_integrand(b: Bindings, boundary: str, order: int = BALL_ORDER) -> RadialSeries:
    return evaluate(boundary_integrand_series(boundary, order), b)


def interior_constant(b: Bindings) -> Any:
    """``5 scal^2 - 2|Ric|^2 + 2|R|^2`` of the ambient space."""
    n, C, H = b.n, b.C, b.H
    return 5 * (n * C) ** 2 - 2 * n * C * C + Fraction(4, 3) * n * ((n + 2) * H - C * C)


def a2_ball_series(b: Bindings, boundary: str, order: int = BALL_ORDER) -> RadialSeries:
    """``a_2`` of the geodesic ball (Dirichlet or Neumann conditions)."""
    omega = sphere_area(b.n)
    vol_ball = ball_volume_series(b) * omega
    surface = volume_series(b) * omega
    return (vol_ball * interior_constant(b) + surface * mean_boundary_integrand(b, boundary, order)) / 360


def a2_over_a0_ball(b: Bindings, boundary: str, order: int = BALL_ORDER) -> RadialSeries:
    return a2_ball_series(b, boundary, order) / (ball_volume_series(b) * sphere_area(b.n))


def a05_ball_series(b: Bindings, boundary: str) -> RadialSeries:
    """``a_0.5 = -+ (sqrt(pi)/2) vol(boundary)`` (minus for Dirichlet)."""
    sign = -1 if _check_boundary(boundary) == "dirichlet" else 1
    return volume_series(b) * (sign * math.sqrt(math.pi) / 2 * sphere_area(b.n))


def distinguisher_ball(b: Bindings, boundary: str) -> float:
    """``|nabla R|^2``-dependent part of the ``r^3`` coefficient of the
    boundary mean that enters ``a_2`` of the ball."""
    here = mean_boundary_integrand(b, boundary).coefficient(3)
    ref = mean_boundary_integrand(b.symmetric_reference(), boundary).coefficient(3)
    return here - ref


# ---------------------------------------------------------------------------
# reports


def sphere_weight(n: int) -> float:
    return (2 * n + 5) / (16 * n * (n + 2) * (n + 4))


def dirichlet_weight(n: int) -> float:
    return 1 / (42 * n * (n + 2) * (n + 4))


def neumann_weight(n: int) -> float:
    return 1 / (6 * n * (n + 2) * (n + 4))


@dataclass
class HeatReport:
    label: str
    n: int
    C: float
    H: float
    L: float
    nablaR2: float
    bindings: Bindings
    series: dict[str, RadialSeries] = field(default_factory=dict)
    D_sphere: float = 0.0
    D_dirichlet: float = 0.0
    D_neumann: float = 0.0
    D_sphere_series: float = 0.0
    D_dirichlet_series: float = 0.0
    D_neumann_series: float = 0.0

    def flat(self) -> dict[str, Any]:
        """Flat key/value view; series coefficients keyed ``<name>[r^<power>]``."""
        out: dict[str, Any] = {
            "label": self.label,
            "n": self.n,
            "C": self.C,
            "H": self.H,
            "L": self.L,
            "nablaR2": self.nablaR2,
            "mean_T2": float(self.bindings.mean_T2),
            "mean_Q0": float(self.bindings.mean_Q0),
            "D_sphere": self.D_sphere,
            "D_dirichlet": self.D_dirichlet,
            "D_neumann": self.D_neumann,
            "D_sphere_series": self.D_sphere_series,
            "D_dirichlet_series": self.D_dirichlet_series,
            "D_neumann_series": self.D_neumann_series,
        }
        for name, s in self.series.items():
            out[f"{name}.order"] = s.order
            for p, c in s.to_dict().items():
                out[f"{name}[r^{p}]"] = c
        return out

    def to_text(self) -> str:
        return "\n".join(f"{k} = {v}" for k, v in self.flat().items())


def heat_report(
    cp: CurvaturePoint,
    label: str = "",
    sphere_order: int = SPHERE_ORDER,
    ball_order: int = BALL_ORDER,
    inv: InvariantReport | None = None,
) -> HeatReport:
    inv = inv or invariants(cp)
    b = Bindings.from_invariants(inv)
    n = cp.n
    series = {
        "sphere.a0": a0_series(b, sphere_order + 4).truncate(n - 1 + sphere_order),
        "sphere.a1": a1_series(b, sphere_order + 4).truncate(n - 3 + sphere_order),
        "sphere.a2": a2_sphere_series(b, sphere_order),
        "sphere.mean_RicS2": mean_ricS_norm(b, sphere_order),
        "sphere.mean_RS2": mean_rS_norm(b, sphere_order),
        "sphere.mean_RS2_minus_RicS2": sphere_norm_difference(b, sphere_order),
        "ball.a0": (ball_volume_series(b) * sphere_area(n)),
        "ball.a2D": a2_ball_series(b, "dirichlet", ball_order),
        "ball.a2N": a2_ball_series(b, "neumann", ball_order),
        "ball.a2D_over_a0": a2_over_a0_ball(b, "dirichlet", ball_order),
        "ball.a2N_over_a0": a2_over_a0_ball(b, "neumann", ball_order),
        "ball.boundary_mean_D": mean_boundary_integrand(b, "dirichlet", ball_order),
        "ball.boundary_mean_N": mean_boundary_integrand(b, "neumann", ball_order),
    }
    return HeatReport(
        label=label,
        n=n,
        C=inv.C,
        H=inv.H,
        L=inv.L,
        nablaR2=inv.normDR2,
        bindings=b,
        series=series,
        D_sphere=sphere_weight(n) * inv.normDR2,
        D_dirichlet=dirichlet_weight(n) * inv.normDR2,
        D_neumann=neumann_weight(n) * inv.normDR2,
        D_sphere_series=distinguisher_sphere(b),
        D_dirichlet_series=distinguisher_ball(b, "dirichlet"),
        D_neumann_series=distinguisher_ball(b, "neumann"),
    )


VERDICTS = ("dimension-mismatch", "CHL-mismatch", "nablaR-mismatch", "indistinguishable-at-this-order")


@dataclass
class Verdict:
    verdict: str
    deltas: dict[str, float]
    reports: tuple[HeatReport, HeatReport]

    def as_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "deltas": self.deltas,
            "reports": [r.flat() for r in self.reports],
        }


def _differs(a: float, b: float, tol: float) -> bool:
    return abs(a - b) > tol * max(1.0, abs(a), abs(b))


def compare(a: HeatReport, b: HeatReport, tol: float = 1e-9) -> Verdict:
    """Decide what the heat invariants computed here can tell apart.

    Different ``(C, H, L)`` means different volume functions, so the
    spheres are not isospectral; equal ``(C, H, L)`` but different
    ``|nabla R|^2`` shows up in the ``r^2`` term of ``a_2`` of spheres and
    the ``r^3`` boundary term of ``a_2`` of balls.
    """
    deltas: dict[str, float] = {"n": b.n - a.n}
    if a.n != b.n:
        return Verdict("dimension-mismatch", deltas, (a, b))
    for key in ("C", "H", "L", "nablaR2"):
        deltas[key] = getattr(b, key) - getattr(a, key)
    diff_a = a.series["sphere.mean_RS2_minus_RicS2"]
    diff_b = b.series["sphere.mean_RS2_minus_RicS2"]
    deltas["sphere_r2"] = diff_b.coefficient(2) - diff_a.coefficient(2)
    for tag in ("D", "N"):
        ma, mb = a.series[f"ball.boundary_mean_{tag}"], b.series[f"ball.boundary_mean_{tag}"]
        deltas[f"ball_{tag}_r3"] = mb.coefficient(3) - ma.coefficient(3)
    if any(_differs(getattr(a, k), getattr(b, k), tol) for k in ("C", "H", "L")):
        verdict = "CHL-mismatch"
    elif any(abs(deltas[k]) > tol for k in ("sphere_r2", "ball_D_r3", "ball_N_r3")):
        verdict = "nablaR-mismatch"
    else:
        verdict = "indistinguishable-at-this-order"
    return Verdict(verdict, deltas, (a, b))


__all__ = [
    "Bindings",
    "HeatReport",
    "RadialSeries",
    "ResidualMonomialError",
    "Verdict",
    "a05_ball_series",
    "a0_series",
    "a1_series",
    "a1_series_gauss",
    "a2_ball_series",
    "a2_over_a0_ball",
    "a2_sphere_series",
    "ball_volume_series",
    "boundary_integrand_series",
    "compare",
    "distinguisher_ball",
    "distinguisher_sphere",
    "evaluate",
    "heat_report",
    "mean_boundary_integrand",
    "mean_rS_norm",
    "mean_ricS_norm",
    "scalS_series",
    "sphere_norm_difference",
    "dirichlet_weight",
    "neumann_weight",
    "sphere_weight",
    "volume_series",
]
