"""Pointwise curvature data: invariants, harmonic-space identities and
sphere averages.

Components follow ``R_ijkl = <R(e_i, e_j) e_k, e_l>`` with the sign for
which the round sphere of curvature ``k`` has ``R_1212 = k`` and a positive
Jacobi operator. ``DR[i, j, k, l, m]`` is ``(nabla_{e_m} R)_ijkl``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.stats import norm, qmc

STRUCT_TOL = 1e-10
IDENTITY_TOL = 1e-9


class NonHarmonicError(ValueError):
    """Input is not Einstein (or otherwise fails a harmonic-space proxy)."""


@dataclass(frozen=True)
class CurvaturePoint:
    n: int
    R: np.ndarray
    DR: np.ndarray | None = None

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        if R.shape != (self.n,) * 4:
            raise ValueError(f"R must have shape {(self.n,) * 4}, got {R.shape}")
        object.__setattr__(self, "R", R)
        if self.DR is not None:
            DR = np.asarray(self.DR, dtype=float)
            if DR.shape != (self.n,) * 5:
                raise ValueError(f"DR must have shape {(self.n,) * 5}, got {DR.shape}")
            object.__setattr__(self, "DR", DR)

    @property
    def dR(self) -> np.ndarray:
        """``DR`` with absent treated as zero."""
        return self.DR if self.DR is not None else np.zeros((self.n,) * 5)


def validate(cp: CurvaturePoint, tol: float = STRUCT_TOL) -> list[str]:
    """Names of the violated algebraic curvature identities (empty if none)."""
    R = cp.R
    scale = max(1.0, float(np.abs(R).max(initial=0.0)))
    bad = []

    def check(name, residual):
        if residual.size and float(np.abs(residual).max()) > tol * scale:
            bad.append(name)

    check("antisymmetry R_ijkl = -R_jikl", R + R.transpose(1, 0, 2, 3))
    check("antisymmetry R_ijkl = -R_ijlk", R + R.transpose(0, 1, 3, 2))
    check("pair symmetry R_ijkl = R_klij", R - R.transpose(2, 3, 0, 1))
    check("first Bianchi", R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3))
    if cp.DR is not None:
        D = cp.DR
        check("DR antisymmetry in (ij)", D + D.transpose(1, 0, 2, 3, 4))
        check("DR antisymmetry in (kl)", D + D.transpose(0, 1, 3, 2, 4))
        check("DR pair symmetry", D - D.transpose(2, 3, 0, 1, 4))
        check("DR first Bianchi", D + D.transpose(1, 2, 0, 3, 4) + D.transpose(2, 0, 1, 3, 4))
        # R_ijkl;m + R_jmkl;i + R_mikl;j
        check(
            "second Bianchi",
            D + np.einsum("jmkli->ijklm", D) + np.einsum("miklj->ijklm", D),
        )
    return bad


def _unit(u, n: int, tol: float = 1e-9) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (n,):
        raise ValueError(f"direction must have shape ({n},)")
    if abs(np.linalg.norm(u) - 1.0) > tol:
        raise ValueError("direction must be a unit vector")
    return u


def jacobi(cp: CurvaturePoint, u) -> np.ndarray:
    """``R_u = R(u, .) u`` as a symmetric matrix."""
    u = _unit(u, cp.n)
    return np.einsum("ijkl,i,k->jl", cp.R, u, u)


def djacobi(cp: CurvaturePoint, u) -> np.ndarray:
    """``R'_u = (nabla_u R)(u, .) u``."""
    u = _unit(u, cp.n)
    return np.einsum("ijklm,i,k,m->jl", cp.dR, u, u, u)


def _jacobi_batch(R, U):
    return np.einsum("ijkl,bi,bk->bjl", R, U, U, optimize=True)


def _djacobi_batch(D, U, chunk: int = 2048):
    """``R'_u`` for each row of ``U`` as one matrix product against ``u(x)u(x)u``."""
    n = D.shape[0]
    M = D.transpose(1, 3, 0, 2, 4).reshape(n * n, n**3)  # (jl), (ikm)
    out = np.empty((len(U), n, n))
    for s in range(0, len(U), chunk):
        V = U[s : s + chunk]
        W = np.einsum("bi,bk,bm->bikm", V, V, V).reshape(len(V), -1)
        out[s : s + chunk] = (W @ M.T).reshape(len(V), n, n)
    return out


def sample_directions(n: int, count: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors: an unscrambled Halton set and a seeded uniform set."""
    halton = qmc.Halton(d=n, scramble=False).random(count + 1)[1:]
    H = norm.ppf(np.clip(halton, 1e-12, 1 - 1e-12))
    H /= np.linalg.norm(H, axis=1, keepdims=True)
    G = np.random.default_rng(seed).standard_normal((count, n))
    G /= np.linalg.norm(G, axis=1, keepdims=True)
    return H, G


@dataclass(frozen=True)
class InvariantReport:
    n: int
    C: float
    scal: float
    H: float
    L: float
    normR2: float
    normDR2: float
    Rhat: float
    rcirc: float
    ricci_deviation: float
    H_spread: dict = field(default_factory=dict)
    L_spread: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "C": self.C,
            "scal": self.scal,
            "H": self.H,
            "L": self.L,
            "normR2": self.normR2,
            "normDR2": self.normDR2,
            "Rhat": self.Rhat,
            "rcirc": self.rcirc,
            "ricci_deviation": self.ricci_deviation,
            **{f"H_spread.{k}": v for k, v in self.H_spread.items()},
            **{f"L_spread.{k}": v for k, v in self.L_spread.items()},
        }


def ricci(cp: CurvaturePoint) -> np.ndarray:
    return np.einsum("ijkj->ik", cp.R)


def rcirc(R: np.ndarray) -> float:
    return float(np.einsum("ijkl,jalb,aibk->", R, R, R, optimize=True))


def rhat(R: np.ndarray) -> float:
    return float(np.einsum("ijkl,klab,abij->", R, R, R, optimize=True))


def invariants(
    cp: CurvaturePoint, tol: float = IDENTITY_TOL, samples: int = 128, seed: int = 0, strict: bool = True
) -> InvariantReport:
    """Pointwise invariants; ``H`` and ``L`` are averaged over sampled directions.

    With ``strict``, raises :class:`NonHarmonicError` when the Ricci tensor
    is not a multiple of the identity within ``tol`` (relative).
    """
    n, R = cp.n, cp.R
    ric = ricci(cp)
    C = float(np.trace(ric)) / n
    dev = float(np.abs(ric - C * np.eye(n)).max())
    if strict and dev > tol * max(1.0, abs(C)):
        raise NonHarmonicError(f"Ricci deviates from C*Id by {dev:.3e}")
    H_spread, L_spread, Hs, Ls = {}, {}, [], []
    for name, U in zip(("halton", "uniform"), sample_directions(n, samples, seed)):
        Ru = _jacobi_batch(R, U)
        dRu = _djacobi_batch(cp.dR, U)
        h = np.einsum("bij,bji->b", Ru, Ru)
        ell = 32 * np.einsum("bij,bjk,bki->b", Ru, Ru, Ru) - 9 * np.einsum("bij,bji->b", dRu, dRu)
        H_spread[name] = float(h.max() - h.min())
        L_spread[name] = float(ell.max() - ell.min())
        Hs.append(h)
        Ls.append(ell)
    return InvariantReport(
        n=n,
        C=C,
        scal=float(np.trace(ric)),
        H=float(np.concatenate(Hs).mean()),
        L=float(np.concatenate(Ls).mean()),
        normR2=float(np.sum(R * R)),
        normDR2=float(np.sum(cp.dR * cp.dR)),
        Rhat=rhat(R),
        rcirc=rcirc(R),
        ricci_deviation=dev,
        H_spread=H_spread,
        L_spread=L_spread,
    )


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: float
    rhs: float
    passed: bool

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def a_tensor(R: np.ndarray) -> np.ndarray:
    """``A_abcd = sum R_ijkl R_aibk R_cjdl``."""
    return np.einsum("ijkl,aibk,cjdl->abcd", R, R, R, optimize=True)


def a_contractions(cp: CurvaturePoint) -> tuple[float, float, float]:
    """``(sum A_aabb, sum A_abab, sum A_abba)``."""
    A = a_tensor(cp.R)
    return (
        float(np.einsum("aabb->", A)),
        float(np.einsum("abab->", A)),
        float(np.einsum("abba->", A)),
    )


def harmonic_identity_suite(
    cp: CurvaturePoint, tol: float = IDENTITY_TOL, inv: InvariantReport | None = None
) -> list[IdentityCheck]:
    """Pointwise identities every harmonic space satisfies.

    Each check compares two numbers with the mixed tolerance
    ``|lhs - rhs| <= tol * max(1, |lhs|, |rhs|)``.
    """
    inv = inv or invariants(cp, tol=tol, strict=False)
    n, C, H, L = cp.n, inv.C, inv.H, inv.L
    R = cp.R
    out: list[IdentityCheck] = []

    def add(name, lhs, rhs):
        out.append(IdentityCheck(name, float(lhs), float(rhs), _close(lhs, rhs, tol)))

    add("einstein", inv.ricci_deviation, 0.0)
    add("H constant in u", max(inv.H_spread.values()), 0.0)
    add("L constant in u", max(inv.L_spread.values()), 0.0)
    gram = np.einsum("xjkl,yjkl->xy", R, R)
    k = 2 / 3 * ((n + 2) * H - C * C)
    add("(i) <R(x,.).,R(y,.).> = 2/3((n+2)H-C^2)<x,y>", float(np.abs(gram - k * np.eye(n)).max()), 0.0)
    add("(ii) |R|^2 = 2/3 n((n+2)H-C^2)", inv.normR2, n * k)
    add(
        "(iii) 32(nC^3+9/2C|R|^2+7/2Rhat-rcirc)-27|DR|^2 = n(n+2)(n+4)L",
        32 * (n * C**3 + 4.5 * C * inv.normR2 + 3.5 * inv.Rhat - inv.rcirc) - 27 * inv.normDR2,
        n * (n + 2) * (n + 4) * L,
    )
    add(
        "Lichnerowicz 2C|R|^2 - Rhat - 4rcirc + |DR|^2 = 0",
        2 * C * inv.normR2 - inv.Rhat - 4 * inv.rcirc + inv.normDR2,
        0.0,
    )
    aabb, abab, abba = a_contractions(cp)
    add("sum A_aabb = nC^3", aabb, n * C**3)
    add("sum A_abab = rcirc", abab, inv.rcirc)
    add("sum A_abba = rcirc - Rhat/4", abba, inv.rcirc - inv.Rhat / 4)
    return out


# ---------------------------------------------------------------------------
# sphere moments and averages


def sphere_area(n: int) -> float:
    """``omega_{n-1}``, the volume of the unit sphere in R^n."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def sphere_moment(n: int, indices) -> Fraction:
    """Mean of ``prod u_i`` over the unit sphere in R^n, exactly.

    Multiply by :func:`sphere_area` for the integral.
    """
    counts: dict[int, int] = {}
    for i in indices:
        counts[i] = counts.get(i, 0) + 1
    if any(c % 2 for c in counts.values()):
        return Fraction(0)
    num = 1
    for c in counts.values():
        num *= math.prod(range(c - 1, 0, -2))
    den = math.prod(n + 2 * j for j in range(len(indices) // 2))
    return Fraction(num, den)


def fourth_moment(n: int, pattern) -> Fraction:
    """``int u_a u_b u_c u_d du / omega_{n-1}`` for a 4-index ``pattern``."""
    if len(pattern) != 4:
        raise ValueError("pattern must have four indices")
    return sphere_moment(n, pattern)


def _pairings(slots):
    if not slots:
        yield []
        return
    first, rest = slots[0], slots[1:]
    for i, other in enumerate(rest):
        for tail in _pairings(rest[:i] + rest[i + 1 :]):
            yield [(first, other)] + tail


def symmetrized_mean(patterns: list[str], operands: list[np.ndarray], u_slots: str) -> float:
    """Exact sphere mean of a form of even degree in ``u``.

    ``patterns`` are einsum subscripts for ``operands``; letters listed in
    ``u_slots`` stand for contractions with ``u``. The mean is the sum over
    perfect pairings of those slots divided by ``n(n+2)...(n+2d-2)``.
    """
    n = operands[0].shape[0]
    slots = list(u_slots)
    total = 0.0
    for pairing in _pairings(slots):
        sub = {b: a for a, b in pairing}
        pats = ["".join(sub.get(ch, ch) for ch in p) for p in patterns]
        total += float(np.einsum(",".join(pats) + "->", *operands, optimize=True))
    den = math.prod(n + 2 * j for j in range(len(slots) // 2))
    return total / den


def exact_mean_T2(cp: CurvaturePoint) -> float:
    """Sphere mean of ``Tr(R'_u R'_u)`` by moment symmetrization."""
    D = cp.dR
    return symmetrized_mean(["ajbkc", "djekf"], [D, D], "abcdef")


def exact_mean_Q0(cp: CurvaturePoint) -> float:
    """Sphere mean of ``sum_i Tr(R_u o R(e_i, .) R_u e_i)`` by moment symmetrization."""
    R = cp.R
    return symmetrized_mean(["ijkl", "aibk", "cjdl"], [R, R, R], "abcd")


def sphere_average_T2(cp: CurvaturePoint) -> float:
    n = cp.n
    return 3 * float(np.sum(cp.dR * cp.dR)) / (n * (n + 2) * (n + 4))


def sphere_average_Q0(cp: CurvaturePoint, inv: InvariantReport | None = None) -> float:
    n = cp.n
    inv = inv or invariants(cp)
    return (n * inv.C**3 + 2 * inv.rcirc - inv.Rhat / 4) / (n * (n + 2))


def q0_value(R: np.ndarray, Ru: np.ndarray) -> np.ndarray:
    """``sum_i Tr(R_u o R(e_i, .) R_u e_i)`` for a batch of Jacobi matrices."""
    return np.einsum("ijkl,bki,blj->b", R, Ru, Ru, optimize=True)


def monte_carlo_average(
    cp: CurvaturePoint, quantity: str, samples: int = 100_000, seed: int = 0, batch: int = 2000
) -> tuple[float, float]:
    """Seeded Monte Carlo mean and standard error of ``T2`` or ``Q0``.

    Batches draw from child seeds of ``seed``, so the result does not
    depend on how batches are scheduled.
    """
    if quantity not in ("T2", "Q0"):
        raise ValueError("quantity must be 'T2' or 'Q0'")
    n = cp.n
    nb = math.ceil(samples / batch)
    children = np.random.SeedSequence(seed).spawn(nb)
    values = []
    for b, child in enumerate(children):
        size = min(batch, samples - b * batch)
        U = np.random.default_rng(child).standard_normal((size, n))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        if quantity == "T2":
            M = _djacobi_batch(cp.dR, U)
            values.append(np.einsum("bij,bij->b", M, M))
        else:
            values.append(q0_value(cp.R, _jacobi_batch(cp.R, U)))
    v = np.concatenate(values)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))


# ---------------------------------------------------------------------------
# tensor file format


def dump(cp: CurvaturePoint, path: str | Path | None = None) -> str:
    """Text dump: ``n <dim>``, then ``R`` and ``DR`` blocks of 1-based
    nonzero components ``i j k l value`` / ``i j k l m value``."""
    lines = [f"n {cp.n}", "R"]
    for idx in zip(*np.nonzero(cp.R)):
        lines.append(" ".join(str(i + 1) for i in idx) + f" {float(cp.R[idx])!r}")
    if cp.DR is not None:
        lines.append("DR")
        for idx in zip(*np.nonzero(cp.DR)):
            lines.append(" ".join(str(i + 1) for i in idx) + f" {float(cp.DR[idx])!r}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def loads(text: str) -> CurvaturePoint:
    n = None
    R = DR = None
    block = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            n = int(parts[1])
            R = np.zeros((n,) * 4)
            continue
        if parts[0] in ("R", "DR"):
            if n is None:
                raise ValueError(f"line {lineno}: block before header 'n <dim>'")
            block = parts[0]
            if block == "DR" and DR is None:
                DR = np.zeros((n,) * 5)
            continue
        rank = 4 if block == "R" else 5 if block == "DR" else None
        if rank is None or len(parts) != rank + 1:
            raise ValueError(f"line {lineno}: malformed component line {raw!r}")
        idx = tuple(int(p) - 1 for p in parts[:rank])
        if any(i < 0 or i >= n for i in idx):
            raise ValueError(f"line {lineno}: index out of range")
        (R if block == "R" else DR)[idx] = float(parts[rank])
    if n is None:
        raise ValueError("missing header 'n <dim>'")
    return CurvaturePoint(n, R, DR)


def load(path: str | Path) -> CurvaturePoint:
    return loads(Path(path).read_text())


__all__ = [
    "CurvaturePoint",
    "IdentityCheck",
    "InvariantReport",
    "NonHarmonicError",
    "a_contractions",
    "a_tensor",
    "djacobi",
    "dump",
    "exact_mean_Q0",
    "exact_mean_T2",
    "fourth_moment",
    "harmonic_identity_suite",
    "invariants",
    "jacobi",
    "load",
    "loads",
    "monte_carlo_average",
    "sample_directions",
    "sphere_area",
    "sphere_average_Q0",
    "sphere_average_T2",
    "sphere_moment",
    "validate",
]
