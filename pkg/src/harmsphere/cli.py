"""Command-line front end: ``harmsphere {expand,verify,space,compare}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from . import curvio, jets, spectra
from .jets.algebra import _frac_str, word_str
from .models import parse_space

EXPAND_TARGETS = ("sigma", "sigma2", "sigma4", "trace", "ricS", "rS", "ball")
MAX_ORDER = {"sigma": 12, "sigma2": 10, "sigma4": 6, "trace": 10, "ricS": 4, "rS": 4, "ball": 6}
DEFAULT_ORDER = {"sigma": 5, "sigma2": 4, "sigma4": 2, "trace": 5, "ricS": 2, "rS": 2, "ball": 3}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# expand


def _endo_json(s: jets.EndoSeries) -> dict:
    return {
        "order": s.order,
        "coefficients": {
            str(p): {word_str(w): _frac_str(c) for w, c in sorted(s.coeffs[p].items())} for p in s.powers()
        },
    }


def expand(target: str, order: int) -> dict[str, Any]:
    """Named series for ``target``; values are EndoSeries or ScalarSeries."""
    if order > MAX_ORDER[target] or order < -1:
        raise UsageError(f"order for {target} must be in [-1, {MAX_ORDER[target]}]")
    if target == "sigma":
        return {"sigma": jets.ledger_series(order)}
    if target == "sigma2":
        s = jets.ledger_series(order + 2)
        return {"tr(sigma^2)": jets.series_trace(s * s).truncate(order)}
    if target == "sigma4":
        return {"tr(sigma^4)": jets.sigma4_trace(order)}
    if target == "trace":
        return {"tr(sigma)": jets.trace_sigma(order)}
    if target == "ricS":
        return {"|Ric^S|^2": jets.ricS_norm_series(order)}
    if target == "rS":
        return {"|R^S|^2": jets.rS_norm_series(order)}
    rnu, s3, trtr2 = jets.ball_integrand_series(order)
    return {"tr(R_nu sigma)": rnu, "tr(sigma^3)": s3, "tr(sigma) tr(sigma^2)": trtr2}


def cmd_expand(args) -> int:
    order = DEFAULT_ORDER[args.target] if args.order is None else args.order
    out = expand(args.target, order)
    if args.json:
        payload = {
            name: _endo_json(s) if isinstance(s, jets.EndoSeries) else s.to_json() for name, s in out.items()
        }
        print(json.dumps({"target": args.target, "series": payload}, sort_keys=True, indent=2))
    else:
        for name, s in out.items():
            body = f"order {s.order}: {s}" if isinstance(s, jets.EndoSeries) else s.to_text()
            print(f"{name} = {body}")
    return 0


# ---------------------------------------------------------------------------
# loading spaces


def load_point(text: str) -> tuple[str, curvio.CurvaturePoint]:
    """A space spec or the path of a tensor file."""
    path = Path(text)
    if path.is_file():
        try:
            return str(path), curvio.load(path)
        except ValueError as exc:
            raise UsageError(f"{path}: {exc}") from None
    try:
        spec = parse_space(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return str(spec), spec.build()


# ---------------------------------------------------------------------------
# verify


def verify_point(cp: curvio.CurvaturePoint, tol: float, seed: int, samples: int) -> list[tuple[str, bool, str]]:
    """All checks as ``(name, passed, detail)``."""
    rows: list[tuple[str, bool, str]] = []
    bad = curvio.validate(cp, min(tol, curvio.STRUCT_TOL))
    rows.append(("structure", not bad, ", ".join(bad) or "ok"))
    if bad:
        return rows
    inv = curvio.invariants(cp, tol=tol, seed=seed, strict=False)
    for chk in curvio.harmonic_identity_suite(cp, tol, inv):
        rows.append((chk.name, chk.passed, f"lhs={chk.lhs:.12g} rhs={chk.rhs:.12g}"))
    if not all(ok for _, ok, _ in rows):
        return rows
    pairs = [
        ("mean T2", curvio.exact_mean_T2(cp), curvio.sphere_average_T2(cp)),
        ("mean Q0", curvio.exact_mean_Q0(cp), curvio.sphere_average_Q0(cp, inv)),
    ]
    for name, exact, closed in pairs:
        rows.append((f"{name}: symmetrized = closed form", curvio._close(exact, closed, tol), f"{exact:.12g} vs {closed:.12g}"))
        if samples:
            mc, se = curvio.monte_carlo_average(cp, name.split()[1], samples=samples, seed=seed)
            ok = abs(mc - exact) <= 3 * se + tol * max(1.0, abs(exact))
            rows.append((f"{name}: Monte Carlo within 3 SE", ok, f"{mc:.6g} +- {se:.2g}"))
    b = spectra.Bindings.from_invariants(inv)
    v1 = spectra.a1_series(b).truncate(cp.n - 3 + 3)
    v2 = spectra.a1_series_gauss(b, 3).truncate(cp.n - 3 + 3)
    worst = max((abs(v1.coefficient(p) - v2.coefficient(p)) for p in range(cp.n - 3, cp.n + 1)), default=0.0)
    rows.append(("a1 from volume = a1 from Gauss equation", worst <= 1e-12 * max(1.0, abs(v1.coefficient(cp.n - 3))), f"max diff {worst:.3g}"))
    return rows


def cmd_verify(args) -> int:
    label, cp = load_point(args.space)
    rows = verify_point(cp, args.tol, args.seed, args.samples)
    ok = all(passed for _, passed, _ in rows)
    if args.json:
        print(json.dumps({"space": label, "passed": ok, "checks": [{"name": n, "passed": p, "detail": d} for n, p, d in rows]}, indent=2))
    else:
        print(f"space {label}")
        for name, passed, detail in rows:
            print(f"{'PASS' if passed else 'FAIL'}  {name}  [{detail}]")
        print("all checks passed" if ok else "FAILED: " + "; ".join(n for n, p, _ in rows if not p))
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# space


def cmd_space(args) -> int:
    label, cp = load_point(args.space)
    if args.dump:
        curvio.dump(cp, args.dump)
    inv = curvio.invariants(cp, seed=args.seed, strict=False)
    data = {"space": label, **inv.as_dict()}
    if args.json:
        print(json.dumps(data, sort_keys=True, indent=2))
    else:
        for k, v in data.items():
            print(f"{k} = {v}")
    return 0


# ---------------------------------------------------------------------------
# compare


def run_compare(a: str, b: str, order: int, ball_order: int, tol: float, seed: int) -> spectra.Verdict:
    reports = []
    for text in (a, b):
        label, cp = load_point(text)
        inv = curvio.invariants(cp, seed=seed)
        reports.append(spectra.heat_report(cp, label, order, ball_order, inv))
    return spectra.compare(reports[0], reports[1], tol)


def cmd_compare(args) -> int:
    for name, lo, hi in (("order", 0, 4), ("ball-order", 3, 6)):
        value = getattr(args, name.replace("-", "_"))
        if not lo <= value <= hi:
            raise UsageError(f"--{name} must be in [{lo}, {hi}]")
    try:
        v = run_compare(args.a, args.b, args.order, args.ball_order, args.tol, args.seed)
    except curvio.NonHarmonicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(v.as_dict(), sort_keys=True, indent=2))
    else:
        for rep in v.reports:
            print(f"[{rep.label}]")
            print(rep.to_text())
            print()
        for k, d in v.deltas.items():
            print(f"delta {k} = {d}")
        print(f"verdict: {v.verdict}")
    return 0


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="harmsphere", description="Radial expansions and heat invariants of harmonic spaces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("expand", help="print an exact symbolic series")
    e.add_argument("target", choices=EXPAND_TARGETS)
    e.add_argument("--order", type=int, default=None)
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_expand)

    v = sub.add_parser("verify", help="run the structural and harmonic identity checks")
    v.add_argument("space", help="space spec (e.g. dr:q=3,p=1,m=1) or tensor file")
    v.add_argument("--tol", type=float, default=curvio.IDENTITY_TOL)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=20_000, help="Monte Carlo samples (0 to skip)")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("space", help="print the invariants of a space")
    s.add_argument("space")
    s.add_argument("--dump", metavar="FILE", help="write the curvature tensors to FILE")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_space)

    c = sub.add_parser("compare", help="compare heat invariants of two spaces")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--order", type=int, default=spectra.SPHERE_ORDER, help="relative order for spheres")
    c.add_argument("--ball-order", type=int, default=spectra.BALL_ORDER, help="relative order for balls")
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
