import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from conftest import MODEL_SPECS, point, report
from numpy.polynomial import polynomial as npoly
from scipy.special import bernoulli

from harmsphere import jets
from harmsphere.curvio import sphere_area
from harmsphere.jets import ScalarSeries, parse_scalar_series
from harmsphere.spectra import (
    Bindings,
    RadialSeries,
    ResidualMonomialError,
    a0_series,
    a05_ball_series,
    a1_series,
    a1_series_gauss,
    a2_ball_series,
    a2_over_a0_ball,
    a2_sphere_series,
    ball_volume_series,
    compare,
    dirichlet_weight,
    distinguisher_ball,
    distinguisher_sphere,
    evaluate,
    heat_report,
    mean_boundary_integrand,
    mean_ricS_norm,
    mean_rS_norm,
    neumann_weight,
    scalS_series,
    sphere_weight,
    volume_series,
)

SYMMETRIC = [s for s in MODEL_SPECS if s != "dr:q=3,p=1,m=1"]


def coth_coeffs(kmax):
    """Laurent coefficients of coth(x): x^(2k-1) -> 4^k B_2k / (2k)!."""
    B = bernoulli(2 * kmax)
    return {2 * k - 1: 4**k * B[2 * k] / math.factorial(2 * k) for k in range(kmax + 1)}


def sinh_power_coeffs(n, k, N):
    """Taylor coefficients of sn_k(r)^(n-1) through r^(n-1+N), where
    sn_k(r) = sinh(sqrt(-k) r)/sqrt(-k) (sin for k > 0)."""
    base = np.zeros(N + 1)
    for j in range(0, N + 1, 2):
        base[j] = float(-k) ** (j // 2) / math.factorial(j + 1)  # sn_k(r)/r
    out = np.array([1.0])
    for _ in range(n - 1):
        out = npoly.polymul(out, base)[: N + 1]
    return {n - 1 + j: c for j, c in enumerate(out)}


# ---------------------------------------------------------------------------
# space forms against closed forms


def test_space_form_trace_is_coth():
    b = Bindings.from_invariants(report("form:n=6,k=-1"))
    t = evaluate(jets.trace_sigma(5), b)
    for p, c in coth_coeffs(3).items():
        assert t.coefficient(p) == pytest.approx(5 * c, abs=1e-12)


@pytest.mark.parametrize("n,k", [(2, -1), (4, -1), (6, Fraction(-1, 4)), (5, 1)])
def test_space_form_volume_is_sinh_power(n, k):
    b = Bindings.space_form(n, k)
    v = volume_series(b)
    for p, c in sinh_power_coeffs(n, k, 6).items():
        assert float(v.coefficient(p)) == pytest.approx(c, abs=1e-12)


def test_exact_bindings_give_exact_series():
    v = volume_series(Bindings.space_form(3, Fraction(-1)))
    assert v.coefficient(4) == Fraction(1, 3)
    assert v.coefficient(6) == Fraction(2, 45)


def test_flat_sphere_scalar_curvature():
    for n in (3, 4, 7):
        s = scalS_series(Bindings.space_form(n, 0))
        assert s.to_dict() == pytest.approx({-2: (n - 1) * (n - 2)})


def round_sphere_norms(n, K):
    m = n - 1
    return m * (m - 1) * K, m * (m - 1) ** 2 * K * K, 2 * m * (m - 1) * K * K


@pytest.mark.parametrize("n,k", [(4, -1), (6, 1), (5, 0)])
def test_space_form_sphere_norms_at_small_radius(n, k):
    b = Bindings.space_form(n, k)
    r = 0.05
    sn = r if k == 0 else (math.sin(math.sqrt(k) * r) / math.sqrt(k) if k > 0 else math.sinh(r))
    scal, ric2, rs2 = round_sphere_norms(n, 1 / sn**2)
    assert scalS_series(b)(r) == pytest.approx(scal, rel=1e-12)
    assert mean_ricS_norm(b)(r) == pytest.approx(ric2, rel=1e-9)
    assert mean_rS_norm(b)(r) == pytest.approx(rs2, rel=1e-9)


def test_flat_sphere_a2_exact():
    n = 6
    b = Bindings.space_form(n, 0)
    scal, ric2, rs2 = round_sphere_norms(n, 1.0)
    a2 = a2_sphere_series(b)
    expected = sphere_area(n) * (5 * scal**2 - 2 * ric2 + 2 * rs2) / 360
    assert a2.to_dict() == pytest.approx({n - 5: expected})


def test_flat_ball_boundary_integrand():
    n = 5
    m = n - 1
    b = Bindings.space_form(n, 0)
    for kind, (w1, w2, w3) in (("dirichlet", (40 / 21, -88 / 7, 320 / 21)), ("neumann", (40 / 3, 8, 32 / 3))):
        M = mean_boundary_integrand(b, kind)
        assert M.to_dict() == pytest.approx({-3: w1 * m**3 + w2 * m * m + w3 * m})


def test_flat_ball_volume():
    n = 4
    vol = ball_volume_series(Bindings.space_form(n, 0)) * sphere_area(n)
    assert vol.to_dict() == pytest.approx({n: math.pi**2 / 2})  # omega_3 / 4


def test_half_order_coefficient_sign():
    b = Bindings.space_form(3, 0)
    d = a05_ball_series(b, "dirichlet").coefficient(2)
    assert d == pytest.approx(-math.sqrt(math.pi) / 2 * 4 * math.pi)
    assert a05_ball_series(b, "neumann").coefficient(2) == pytest.approx(-d)


# ---------------------------------------------------------------------------
# bindings and evaluation


@pytest.mark.parametrize("spec", SYMMETRIC)
def test_reference_q0_reproduces_symmetric_spaces(spec):
    b = Bindings.from_invariants(report(spec))
    ref = b.symmetric_reference()
    assert ref.mean_T2 == 0
    assert float(ref.mean_Q0) == pytest.approx(float(b.mean_Q0), abs=1e-9)


def test_space_form_bindings_match_numeric():
    exact = Bindings.space_form(6, -1)
    num = Bindings.from_invariants(report("form:n=6,k=-1"))
    for key in ("C", "H", "L", "mean_Q0"):
        assert float(getattr(exact, key)) == pytest.approx(getattr(num, key), abs=1e-9)


def test_residual_policy():
    poly = jets.trace_word((0, 3)) + jets.ScalarPolynomial.gen("C")
    s = ScalarSeries({2: poly}, 2)
    b = Bindings.space_form(4, 1)
    with pytest.raises(ResidualMonomialError):
        evaluate(s, b)
    assert evaluate(s, replace(b, policy="zero")).coefficient(2) == pytest.approx(3)
    with pytest.raises(ValueError):
        Bindings(4, 0, 0, 0, policy="ignore")


def test_nonlinear_direction_generators_rejected():
    s = parse_scalar_series("sum(2: T2^2)", 2)
    with pytest.raises(ValueError):
        evaluate(s, Bindings.space_form(4, 1))


def test_radial_series_ops():
    s = RadialSeries({0: 1.0, 2: 0.5}, 4)
    inv = s.inverse()
    assert (s * inv).truncate(4).to_dict() == pytest.approx({0: 1.0})
    e = RadialSeries({1: 1.0}, 6).exp()
    assert e.to_dict() == pytest.approx({k: 1 / math.factorial(k) for k in range(7)})
    with pytest.raises(ValueError):
        RadialSeries({-1: 1.0}, 3).integrate()
    with pytest.raises(ZeroDivisionError):
        RadialSeries({}, 3).inverse()


# ---------------------------------------------------------------------------
# heat invariants on models


@pytest.mark.parametrize("spec", MODEL_SPECS)
def test_a1_two_routes_agree(spec):
    b = Bindings.from_invariants(report(spec))
    n = b.n
    v1, v2 = a1_series(b), a1_series_gauss(b, 3)
    scale = max(1.0, abs(v1.coefficient(n - 3)))
    for p in range(n - 3, n + 1):
        assert abs(v1.coefficient(p) - v2.coefficient(p)) <= 1e-12 * scale


def test_a0_leading_term():
    b = Bindings.from_invariants(report("dr:q=1,p=1"))
    a0 = a0_series(b)
    assert b.n == 4
    assert a0.coefficient(3) == pytest.approx(sphere_area(4))
    assert a0.coefficient(5) == pytest.approx(-sphere_area(4) * b.C / 6)


def test_ball_quotient_leading_term():
    b = Bindings.space_form(4, 0)
    q = a2_over_a0_ball(b, "dirichlet")
    assert q.valuation() == -4
    a2 = a2_ball_series(b, "dirichlet")
    assert a2.coefficient(0) == pytest.approx(sphere_area(4) * (40 / 21 * 27 - 88 / 7 * 9 + 320 / 21 * 3) / 360)


def test_distinguishers_on_dim12_pair():
    sym = Bindings.from_invariants(report("dr:q=3,p=2,m=0"))
    non = Bindings.from_invariants(report("dr:q=3,p=1,m=1"))
    assert distinguisher_sphere(sym) == pytest.approx(0, abs=1e-9)
    assert distinguisher_ball(sym, "dirichlet") == pytest.approx(0, abs=1e-9)
    d = report("dr:q=3,p=1,m=1").normDR2
    assert distinguisher_sphere(non) == pytest.approx(sphere_weight(12) * d, abs=1e-9)
    assert distinguisher_ball(non, "dirichlet") == pytest.approx(dirichlet_weight(12) * d, abs=1e-9)
    assert distinguisher_ball(non, "neumann") == pytest.approx(neumann_weight(12) * d, abs=1e-9)


def test_sphere_weight_from_symbolic_coefficients():
    # the weight is the T2 part (mean 3|DR|^2/N) plus the Q0 part (slope
    # of mean Q0 in |DR|^2) of the r^2 coefficient of |R^S|^2 - |Ric^S|^2
    c = (jets.rS_norm_series(2) - jets.ricS_norm_series(2)).coefficient(2)
    t2 = c.coefficient_of("T2")
    q0 = c.coefficient_of("Q0")
    n = 12
    N = n * (n + 2) * (n + 4)
    weight = float(t2) * 3 / N + float(q0) * _q0_slope(n)
    assert weight == pytest.approx(sphere_weight(n), rel=1e-12)


def _q0_slope(n):
    """d(mean Q0)/d|DR|^2 with n, C, H, L held fixed."""
    # 112 Rhat - 32 rcirc = ... + 27 |DR|^2 ;  Rhat + 4 rcirc = ... + |DR|^2
    A = np.array([[112.0, -32.0], [1.0, 4.0]])
    dRhat, drcirc = np.linalg.solve(A, [27.0, 1.0])
    return (2 * drcirc - dRhat / 4) / (n * (n + 2))


def test_heat_report_and_compare():
    ra = heat_report(point("dr:q=3,p=2,m=0"), "A", inv=report("dr:q=3,p=2,m=0"))
    rb = heat_report(point("dr:q=3,p=1,m=1"), "B", inv=report("dr:q=3,p=1,m=1"))
    assert rb.D_sphere == pytest.approx(rb.D_sphere_series, abs=1e-9)
    assert rb.D_dirichlet == pytest.approx(rb.D_dirichlet_series, abs=1e-9)
    assert rb.D_neumann == pytest.approx(rb.D_neumann_series, abs=1e-9)
    v = compare(ra, rb)
    assert v.verdict == "nablaR-mismatch"
    assert v.deltas["sphere_r2"] == pytest.approx(sphere_weight(12) * 576, abs=1e-9)
    assert v.deltas["ball_D_r3"] == pytest.approx(576 / (42 * 12 * 14 * 16), abs=1e-9)
    assert v.deltas["ball_N_r3"] == pytest.approx(576 / (6 * 12 * 14 * 16), abs=1e-9)
    flat = rb.flat()
    # valuation n - 5 = 7, known through six further powers
    assert flat["sphere.a2.order"] == 13
    assert "ball.a2D[r^12]" in flat
    assert "D_sphere = " in rb.to_text()
    assert compare(ra, ra).verdict == "indistinguishable-at-this-order"


def test_compare_other_verdicts():
    f6 = heat_report(point("flat:n=6"))
    assert compare(f6, heat_report(point("flat:n=4"))).verdict == "dimension-mismatch"
    assert compare(f6, heat_report(point("form:n=6,k=-1"))).verdict == "CHL-mismatch"
