"""Curvature at a point of concrete harmonic spaces.

Damek-Ricci spaces are built as metric Lie algebras ``a + v + z`` from
Clifford modules; their Levi-Civita connection comes from the Koszul
formula for left-invariant metrics, and ``nabla R`` is computed
algebraically (left-invariant tensors have constant components).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curvio import CurvaturePoint, validate

JACOBI_TOL = 1e-12


# ---------------------------------------------------------------------------
# Clifford modules


def _cayley_dickson(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Product in the Cayley-Dickson algebra of dimension ``len(x)``."""
    if len(x) == 1:
        return x * y
    h = len(x) // 2
    a, b, c, d = x[:h], x[h:], y[:h], y[h:]
    conj = lambda z: np.concatenate([z[:1], -z[1:]])  # noqa: E731
    return np.concatenate(
        [_cayley_dickson(a, c) - _cayley_dickson(conj(d), b), _cayley_dickson(d, a) + _cayley_dickson(b, conj(c))]
    )


def _left_mult(dim: int, unit: int) -> np.ndarray:
    e = np.eye(dim)
    return np.column_stack([_cayley_dickson(e[unit], e[j]) for j in range(dim)]).round().astype(int)


_ALGEBRA_DIM = {1: 2, 2: 4, 3: 4, 7: 8}


@dataclass(frozen=True)
class CliffordModuleSpec:
    """``q`` = center dimension; ``a_plus``/``a_minus`` multiplicities of the
    two irreducible modules (only ``q`` in {3, 7} has two)."""

    q: int
    a_plus: int
    a_minus: int = 0

    def __post_init__(self):
        if self.q not in _ALGEBRA_DIM:
            raise ValueError(f"unsupported center dimension q={self.q}; use 1, 2, 3 or 7")
        if self.a_plus < 0 or self.a_minus < 0 or self.a_plus + self.a_minus == 0:
            raise ValueError("multiplicities must be nonnegative and not both zero")
        if self.a_minus and self.q not in (3, 7):
            raise ValueError(f"q={self.q} has a single irreducible module")


def clifford_module(spec: CliffordModuleSpec) -> np.ndarray:
    """Maps ``J_1..J_q`` as an array of shape ``(q, dim v, dim v)``.

    Irreducible blocks are left multiplications by imaginary units of
    C, H or O; the second module for ``q`` in {3, 7} is the negated one.
    """
    d = _ALGEBRA_DIM[spec.q]
    base = np.stack([_left_mult(d, i + 1) for i in range(spec.q)])
    blocks = [base] * spec.a_plus + [-base] * spec.a_minus
    size = d * len(blocks)
    J = np.zeros((spec.q, size, size), dtype=int)
    for b, blk in enumerate(blocks):
        J[:, b * d : (b + 1) * d, b * d : (b + 1) * d] = blk
    return J


def clifford_residual(J: np.ndarray) -> int:
    """Max entry of ``J_a J_b + J_b J_a + 2 delta_ab Id`` and of ``J_a + J_a^T``."""
    q, d, _ = J.shape
    worst = int(np.abs(J + J.transpose(0, 2, 1)).max(initial=0))
    for a in range(q):
        for b in range(q):
            anti = J[a] @ J[b] + J[b] @ J[a] + 2 * (a == b) * np.eye(d, dtype=int)
            worst = max(worst, int(np.abs(anti).max()))
    return worst


# ---------------------------------------------------------------------------
# metric Lie algebras


@dataclass(frozen=True)
class MetricLieAlgebra:
    """``c[i, j, k]`` = k-th component of ``[e_i, e_j]`` in an orthonormal basis."""

    c: np.ndarray

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def jacobi_residual(self) -> float:
        c = self.c
        # [[e_i, e_j], e_k] + cyclic
        t = np.einsum("ijp,pkl->ijkl", c, c)
        cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return float(np.abs(cyc).max(initial=0.0))


def damek_ricci(spec: CliffordModuleSpec | None = None, n: int | None = None) -> MetricLieAlgebra:
    """Solvable extension ``a + v + z`` with ``[A, x] = x/2``, ``[A, z] = z``.

    Without ``spec``, builds the degenerate case: abelian ``v`` of
    dimension ``n - 1`` and no center (real hyperbolic space, curvature -1/4).
    """
    if spec is None:
        if n is None or n < 2:
            raise ValueError("degenerate case needs n >= 2")
        J = np.zeros((0, n - 1, n - 1))
    else:
        J = clifford_module(spec).astype(float)
    q, dv = J.shape[0], J.shape[1]
    dim = 1 + dv + q
    v = slice(1, 1 + dv)
    c = np.zeros((dim, dim, dim))
    # <[x, y], z> = <J_z x, y>  ->  c[x, y, z] = J_z[y, x]
    c[v, v, 1 + dv :] = J.transpose(2, 1, 0)
    for a in range(1, 1 + dv):
        c[0, a, a], c[a, 0, a] = 0.5, -0.5
    for z in range(1 + dv, dim):
        c[0, z, z], c[z, 0, z] = 1.0, -1.0
    mla = MetricLieAlgebra(c)
    res = mla.jacobi_residual()
    if res > JACOBI_TOL:
        raise ValueError(f"Jacobi identity fails (residual {res:.3e})")
    return mla


def levi_civita(mla: MetricLieAlgebra) -> np.ndarray:
    """``G[i, j, k] = <nabla_{e_i} e_j, e_k>`` from the Koszul formula."""
    c = mla.c
    return 0.5 * (c - np.einsum("jki->ijk", c) + np.einsum("kij->ijk", c))


def curvature_point(mla: MetricLieAlgebra) -> CurvaturePoint:
    """Curvature and its covariant derivative at the identity."""
    G = levi_civita(mla)
    c = mla.c
    D = G.transpose(0, 2, 1)  # D[i] is the matrix of nabla_{e_i}: D[i][k, j] = G[i, j, k]
    # R(e_i, e_j) = -D_i D_j + D_j D_i + sum_p c_ijp D_p
    DD = np.einsum("iab,jbc->ijac", D, D)
    Rop = -DD + DD.transpose(1, 0, 2, 3) + np.einsum("ijp,pac->ijac", c, D)
    # R_ijkl = <R(e_i, e_j) e_k, e_l> = Rop[i, j][l, k]
    R = Rop.transpose(0, 1, 3, 2)
    # (nabla_m R)_ijkl = -sum_p (G_mip R_pjkl + G_mjp R_ipkl + G_mkp R_ijpl + G_mlp R_ijkp)
    DR = -(
        np.einsum("mip,pjkl->ijklm", G, R)
        + np.einsum("mjp,ipkl->ijklm", G, R)
        + np.einsum("mkp,ijpl->ijklm", G, R)
        + np.einsum("mlp,ijkp->ijklm", G, R)
    )
    cp = CurvaturePoint(mla.dim, R, DR)
    bad = validate(cp)
    if bad:
        raise ValueError(f"curvature fails validation: {bad}")
    return cp


def space_form(n: int, k) -> CurvaturePoint:
    """Constant curvature ``k``: ``R_ijkl = k (d_ik d_jl - d_il d_jk)``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    d = np.eye(n)
    R = float(k) * (np.einsum("ik,jl->ijkl", d, d) - np.einsum("il,jk->ijkl", d, d))
    return CurvaturePoint(n, R, np.zeros((n,) * 5))


# ---------------------------------------------------------------------------
# space specs


@dataclass(frozen=True)
class SpaceSpec:
    """Parsed space description.

    Grammar: ``flat:n=<int>``, ``form:n=<int>,k=<rational>``,
    ``dr:q=<int>,p=<int>,m=<int>``, ``dr:q=<int>,p=<int>`` and ``dr:q=0,n=<int>``.
    """

    kind: str
    n: int | None = None
    k: Fraction | None = None
    q: int | None = None
    p: int | None = None
    m: int | None = None

    def __str__(self) -> str:
        if self.kind == "flat":
            return f"flat:n={self.n}"
        if self.kind == "form":
            return f"form:n={self.n},k={self.k}"
        if self.q == 0:
            return f"dr:q=0,n={self.n}"
        if self.m is None:
            return f"dr:q={self.q},p={self.p}"
        return f"dr:q={self.q},p={self.p},m={self.m}"

    @property
    def dim(self) -> int:
        if self.kind != "dr" or self.q == 0:
            return self.n
        d = _ALGEBRA_DIM[self.q]
        return 1 + d * (self.p + (self.m or 0)) + self.q

    def build(self) -> CurvaturePoint:
        if self.kind == "flat":
            return space_form(self.n, 0)
        if self.kind == "form":
            return space_form(self.n, self.k)
        if self.q == 0:
            return curvature_point(damek_ricci(n=self.n))
        return curvature_point(damek_ricci(CliffordModuleSpec(self.q, self.p, self.m or 0)))


_SPEC_RE = re.compile(r"(flat|form|dr):(.*)")


def parse_space(text: str) -> SpaceSpec:
    m = _SPEC_RE.fullmatch(text.strip())
    if not m:
        raise ValueError(f"cannot parse space spec {text!r}")
    kind, body = m.groups()
    fields: dict[str, str] = {}
    for part in filter(None, body.split(",")):
        if "=" not in part:
            raise ValueError(f"bad field {part!r} in {text!r}")
        key, val = part.split("=", 1)
        fields[key.strip()] = val.strip()

    def need(*keys):
        if set(fields) != set(keys):
            raise ValueError(f"{kind} spec needs exactly fields {keys}, got {tuple(fields)}")

    try:
        if kind == "flat":
            need("n")
            spec = SpaceSpec("flat", n=int(fields["n"]))
        elif kind == "form":
            need("n", "k")
            spec = SpaceSpec("form", n=int(fields["n"]), k=Fraction(fields["k"]))
        else:
            q = int(fields.get("q", -1))
            if q == 0:
                need("q", "n")
                spec = SpaceSpec("dr", n=int(fields["n"]), q=0)
            elif "m" in fields:
                need("q", "p", "m")
                spec = SpaceSpec("dr", q=q, p=int(fields["p"]), m=int(fields["m"]))
            else:
                need("q", "p")
                spec = SpaceSpec("dr", q=q, p=int(fields["p"]))
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse space spec {text!r}: {exc}") from None
    if spec.kind != "dr" and spec.n < 2:
        raise ValueError("n must be >= 2")
    if spec.kind == "dr" and spec.q != 0:
        CliffordModuleSpec(spec.q, spec.p, spec.m or 0)  # validates
    if spec.kind == "dr" and spec.q == 0 and spec.n < 2:
        raise ValueError("n must be >= 2")
    return spec


__all__ = [
    "CliffordModuleSpec",
    "MetricLieAlgebra",
    "SpaceSpec",
    "clifford_module",
    "clifford_residual",
    "curvature_point",
    "damek_ricci",
    "levi_civita",
    "parse_space",
    "space_form",
]
