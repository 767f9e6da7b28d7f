from fractions import Fraction

import numpy as np
import pytest
from conftest import point, report
from oracles import loop_norm2, loop_oracle

from harmsphere.curvio import validate
from harmsphere.models import (
    CliffordModuleSpec,
    SpaceSpec,
    clifford_module,
    clifford_residual,
    curvature_point,
    damek_ricci,
    levi_civita,
    parse_space,
    space_form,
)


# ---------------------------------------------------------------------------
# Clifford modules


@pytest.mark.parametrize("q,p,m", [(1, 1, 0), (1, 3, 0), (2, 1, 0), (3, 1, 0), (3, 1, 1), (3, 0, 2), (7, 1, 0), (7, 1, 1)])
def test_clifford_relations(q, p, m):
    J = clifford_module(CliffordModuleSpec(q, p, m))
    assert clifford_residual(J) == 0


def test_quaternion_product_rule():
    J = clifford_module(CliffordModuleSpec(3, 1))
    prod = J[0] @ J[1]
    assert np.array_equal(prod, J[2]) or np.array_equal(prod, -J[2])


def test_two_cl3_modules_are_distinct():
    Jp = clifford_module(CliffordModuleSpec(3, 1))
    Jm = clifford_module(CliffordModuleSpec(3, 0, 1))
    # J1 J2 J3 acts as -+Id on the two modules
    a = Jp[0] @ Jp[1] @ Jp[2]
    b = Jm[0] @ Jm[1] @ Jm[2]
    assert np.allclose(a, -b)
    assert np.allclose(np.abs(a), np.eye(4))


@pytest.mark.parametrize("args", [(4, 1, 0), (1, 1, 1), (3, 0, 0), (3, -1, 2)])
def test_clifford_spec_rejects(args):
    with pytest.raises(ValueError):
        CliffordModuleSpec(*args)


# ---------------------------------------------------------------------------
# Damek-Ricci spaces


def test_degenerate_case_is_hyperbolic_quarter():
    cp = curvature_point(damek_ricci(n=6))
    ref = space_form(6, Fraction(-1, 4))
    assert np.abs(cp.R - ref.R).max() <= 1e-12
    assert np.abs(cp.DR).max() <= 1e-12


@pytest.mark.parametrize("spec", ["dr:q=1,p=1", "dr:q=3,p=1,m=1", "dr:q=3,p=2,m=0"])
def test_curvature_matches_loop_oracle(spec):
    s = parse_space(spec)
    R, DR = loop_oracle(s.q, s.p, s.m or 0)
    cp = point(spec)
    assert np.abs(cp.R - R).max() <= 1e-12
    assert np.abs(cp.DR - DR).max() <= 1e-12


def test_dim12_pair_nabla_r():
    sym, nonsym = point("dr:q=3,p=2,m=0"), point("dr:q=3,p=1,m=1")
    assert sym.n == nonsym.n == 12
    assert np.sum(sym.DR**2) <= 1e-10
    val = float(np.sum(nonsym.DR**2))
    assert val >= 1e-6
    _, DR = loop_oracle(3, 1, 1)
    assert abs(val - loop_norm2(DR)) <= 1e-9 * max(1.0, val)
    assert val == pytest.approx(576, abs=1e-9)  # regression value
    a, b = report("dr:q=3,p=2,m=0"), report("dr:q=3,p=1,m=1")
    for key in ("C", "H", "L"):
        assert abs(getattr(a, key) - getattr(b, key)) <= 1e-9


def test_isotypic_minus_module_is_symmetric():
    c = point("dr:q=3,p=0,m=2")
    assert np.sum(c.DR**2) <= 1e-10


def test_module_swap_invariance():
    # (p, m) and (m, p) differ by flipping the orientation of the center
    a, b = report("dr:q=3,p=2,m=1"), report("dr:q=3,p=1,m=2")
    for key in ("C", "H", "L", "normDR2", "Rhat", "rcirc"):
        assert getattr(a, key) == pytest.approx(getattr(b, key), abs=1e-9)
    assert a.normDR2 > 1e-6


@pytest.mark.parametrize("spec", ["dr:q=1,p=1", "dr:q=1,p=2", "dr:q=3,p=1"])
def test_symmetric_damek_ricci(spec):
    cp = point(spec)
    assert np.abs(cp.DR).max() <= 1e-12


def test_q2_is_not_symmetric():
    cp = point("dr:q=2,p=1")
    assert not validate(cp)
    assert np.sum(cp.DR**2) > 1e-6


def test_complex_hyperbolic_invariants():
    r = report("dr:q=1,p=1")
    assert (r.C, r.H, r.L) == pytest.approx((-1.5, 1.125, -33), abs=1e-12)


def test_octonionic_plane():
    cp = curvature_point(damek_ricci(CliffordModuleSpec(7, 1)))
    assert cp.n == 16
    assert not validate(cp)
    assert np.abs(cp.DR).max() <= 1e-12


def test_jacobi_identity_checked():
    mla = damek_ricci(CliffordModuleSpec(3, 1, 1))
    assert mla.jacobi_residual() <= 1e-12
    G = levi_civita(mla)
    # metric connection: G_ijk = -G_ikj
    assert np.abs(G + G.transpose(0, 2, 1)).max() <= 1e-15


# ---------------------------------------------------------------------------
# space forms and specs


def test_space_form_invariants():
    r = report("form:n=6,k=-1")
    assert (r.C, r.H, r.L) == pytest.approx((-5, 5, -160), abs=1e-12)


def test_space_form_sectional_curvature():
    cp = space_form(5, 2)
    x, y = np.eye(5)[0], np.eye(5)[3]
    assert np.einsum("ijkl,i,j,k,l->", cp.R, x, y, x, y) == pytest.approx(2)


@pytest.mark.parametrize(
    "text,dim",
    [
        ("flat:n=4", 4),
        ("form:n=6,k=-1/4", 6),
        ("dr:q=3,p=1,m=1", 12),
        ("dr:q=1,p=2", 6),
        ("dr:q=2,p=1", 7),
        ("dr:q=0,n=6", 6),
        ("dr:q=7,p=1", 16),
    ],
)
def test_space_spec_round_trip(text, dim):
    s = parse_space(text)
    assert str(s) == text
    assert parse_space(str(s)) == s
    assert s.dim == dim


@pytest.mark.parametrize(
    "text",
    ["flat:n=1", "form:n=4", "form:n=4,k=x", "dr:q=5,p=1", "dr:q=1,p=1,m=1", "sphere:n=3", "dr:q=3,p=1,z=2", "flat:4"],
)
def test_space_spec_rejects(text):
    with pytest.raises(ValueError):
        parse_space(text)


def test_space_spec_build_dimension():
    s = SpaceSpec("dr", q=2, p=1)
    assert s.build().n == s.dim == 7
