"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 numerical-acceptance failure.
Each run writes config.json, summary.json and its CSV tables under --out.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import suites
from .equivariance import RankGapError, expected_dimension, fixed_space, su_symmetric_fixed_space
from .geometry import NAMED_PROFILES, flat_metric, named_metric, ym_residual
from .io import RunConfig, grid_rows, write_csv, write_json, write_run
from .lie import Signature, euclidean
from .reduced import energy, scale
from .solvers import CFLViolation, StepFailure, WaveConfig, evolve_wave, integrate_radial, ode_residual

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class ValidationError(ValueError):
    pass


def _signature(args) -> Signature:
    if getattr(args, "pq", None):
        try:
            p, q = (int(v) for v in args.pq.split(","))
        except ValueError:
            raise ValidationError(f"--pq expects 'p,q', got {args.pq!r}") from None
        return Signature(p, q)
    if getattr(args, "p", None) is not None:
        return Signature(args.p, args.q or 0)
    if getattr(args, "n", None) is None:
        raise ValidationError("give --n or --p/--q")
    return euclidean(args.n)


def _case(args) -> tuple[str, dict]:
    case = args.case.upper()
    sig = _signature(args)
    kw = {"n": sig.n} if sig.is_euclidean and case not in ("SOPQ3", "SOPQ4", "SOPQN") else {"p": sig.p, "q": sig.q}
    try:
        suites.random_ansatz(case, kw, np.random.default_rng(0))
    except (ValueError, KeyError) as e:
        raise ValidationError(str(e)) from None
    return case, kw


def _finish(args, cfg: RunConfig, results, extra=None) -> int:
    summary = write_run(args.out, cfg, [r.to_json() for r in results], extra)
    for r in results:
        print(r.line())
    print(f"wrote {Path(args.out) / 'summary.json'}")
    return EXIT_OK if summary["passed"] else EXIT_NUMERIC


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "seed")}


# ------------------------------------------------------------ classify


def cmd_classify(args) -> int:
    cfg = RunConfig("classify", _params(args), args.seed, args.out).validate()
    group = args.group
    if group == "so":
        if args.n is None or args.n < 3 or args.n > 8:
            raise ValidationError(f"SO(n) classification covers 3 <= n <= 8; n={args.n} is below or above "
                                  "the enumeration")
        sig = euclidean(args.n)
    elif group == "sopq":
        if args.p is None or args.q is None:
            raise ValidationError("sopq needs --p and --q")
        sig = Signature(args.p, args.q)
    else:  # su: symmetric-traceless target
        if args.n is None or args.n < 4:
            raise ValidationError("su classification needs --n >= 4")
        sig = None
    try:
        if sig is None:
            rep, expected = su_symmetric_fixed_space(args.n), 2
        else:
            expected = expected_dimension(sig)
            rep = fixed_space(sig)
    except ValueError as e:
        if isinstance(e, RankGapError):
            print(f"error: {e}", file=sys.stderr)
            return EXIT_NUMERIC
        raise ValidationError(str(e)) from None
    write_json(Path(args.out) / "fixed_space.json", rep.to_json())
    table = Path(args.out) / "dimensions.txt"
    table.parent.mkdir(parents=True, exist_ok=True)
    table.write_text(f"{'case':<12}{'dimension':>10}{'expected':>10}{'gap':>12}\n"
                     f"{rep.case:<12}{rep.dimension:>10}{expected:>10}{rep.gap_ratio:>12.3g}\n")
    res = suites.SuiteResult(f"dimension of {rep.case} fixed space differs from {expected}",
                             abs(rep.dimension - expected), 0.5,
                             detail={"dimension": rep.dimension, "expected": expected, "gap": rep.gap_ratio})
    print(f"{rep.case}: dimension {rep.dimension}")
    return _finish(args, cfg, [res])


# ------------------------------------------------------------ verify


def cmd_verify(args) -> int:
    cfg = RunConfig("verify", _params(args), args.seed, args.out).validate()
    name = args.suite
    corrupt = args.corrupt
    cases = [_case(args)] if args.case else None
    samples = args.samples
    if name == "commutators":
        if corrupt:
            raise ValidationError("the commutator suite has no corrupted variant")
        pq = None
        if args.pq or args.p is not None:
            sig = _signature(args)
            pq = (sig.p, sig.q)
        res = suites.commutators(pq, points=samples or 20, seed=args.seed)
        fails = res.detail["failures"]
        if fails:
            print("failing identities: " + ", ".join(f"{t}:{k}" for t, k, _ in fails), file=sys.stderr)
    elif name == "equivariance":
        res = suites.equivariance(cases, samples or 100, args.seed, corrupt)
    elif name == "curvature":
        res = suites.curvature(cases, samples or 20, seed=args.seed, corrupt=corrupt)
    elif name == "projection":
        res = suites.projection(cases, samples or 20, args.seed, args.metric, corrupt)
    else:
        if corrupt:
            raise ValidationError(f"suite {name} has no corrupted variant")
        res = suites.SUITES[name]()
    if not res.passed:
        worst = res.detail if not isinstance(res.detail, dict) else {
            k: v for k, v in res.detail.items() if k != "tables"}
        print(f"suite {name} failed: {worst}", file=sys.stderr)
    return _finish(args, cfg, [res])


# ------------------------------------------------------------ solve


def cmd_solve(args) -> int:
    cfg = RunConfig("solve", _params(args), args.seed, args.out).validate()
    case = args.case.upper()
    if case not in ("SON", "SOPQN", "SO4", "SOPQ4"):
        raise ValidationError(f"no radial system for case {args.case}")
    n = 4 if case in ("SO4", "SOPQ4") else args.n
    if n is None or n < 3:
        raise ValidationError("--n >= 3 required")
    try:
        sol = integrate_radial(case, args.b, (args.rmin, args.rmax), n=n, p=args.p or 0, a=args.a,
                               rtol=args.rtol, atol=args.atol)
    except StepFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        raise ValidationError(str(e)) from None
    fields = {k: sol.values[k] for k in sorted(sol.values)}
    header, rows = grid_rows(sol.r, fields, {k: sol.derivatives[k] for k in fields})
    write_csv(Path(args.out) / "profile.csv", header, rows)
    rng = np.random.default_rng(args.seed)
    lo, hi = sol.r[0], sol.r[-1]
    rs = np.sort(rng.uniform(lo + 1e-3 * (hi - lo), hi - 1e-3 * (hi - lo), 20))
    ode = float(ode_residual(sol, rs).max())
    detail = {"ode_residual": ode, "stats": sol.stats, "r_end": float(hi)}
    results = [suites.SuiteResult("reduced ODE residual", ode, args.ode_tol, detail=detail)]
    if case in ("SON", "SO4"):
        from .ansatz import make_ansatz
        prof = {k: sol.profile(k) for k in fields}
        a = make_ansatz(case, n=n, **prof)
        met = flat_metric(n)
        worst = 0.0
        for r in rs:
            u = rng.normal(size=n)
            worst = max(worst, float(np.abs(ym_residual(a, met, r * u / np.linalg.norm(u))).max()))
        results.append(suites.SuiteResult("full YM residual on solution", worst, 1e-7))
    return _finish(args, cfg, results)


# ------------------------------------------------------------ evolve


def _metric(args, n):
    return None if args.metric == "flat" else named_metric(args.metric, n)


def cmd_evolve(args) -> int:
    cfg = RunConfig("evolve", _params(args), args.seed, args.out).validate()
    wc = WaveConfig(mode=args.mode, n=args.n, r_min=args.rmin, r_max=args.rmax, N=args.N, cfl=args.cfl,
                    T=args.T, boundary=args.boundary, output_every=args.output_every)
    try:
        wc.validate()
    except (ValueError, CFLViolation) as e:
        raise ValidationError(str(e)) from None
    met = _metric(args, args.n)
    A, c, w = args.amplitude, args.center, args.width

    def bump(r):
        return A * np.exp(-((r - c) / w) ** 2)

    if args.mode == "scalar":
        u0, v0 = (lambda r: 1 + bump(r)), (lambda r: 0 * r)
    elif args.mode == "iso-son":
        u0, v0 = (lambda r: bump(r)), (lambda r: 0 * r)
    else:
        u0 = lambda r: (1 + bump(r), 0.5 * bump(r), args.h3 + 0 * r)  # noqa: E731
        v0 = lambda r: (0 * r, 0 * r, 0 * r)  # noqa: E731
    try:
        run = evolve_wave(u0, v0, wc, met)
    except (CFLViolation, FloatingPointError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    out = Path(args.out)
    series_head = ["t", "E"] + [f"{k}_drift" for k in sorted(run.constraints)]
    cons = [run.constraints[k] for k in sorted(run.constraints)]
    rows = []
    for i, (t, E) in enumerate(zip(run.times, run.energies)):
        rows.append([t, E] + [(float(cv[i - 1]) if i else 0.0) for cv in cons])
    write_csv(out / "timeseries.csv", series_head, rows)
    for k, (t, snap) in enumerate(run.snapshots):
        names = [q for q in snap if not q.endswith("_t")]
        header, data = grid_rows(run.r, {q: snap[q] for q in names}, temporal={q: snap[q + "_t"] for q in names})
        write_csv(out / f"snapshot_{k:04d}.csv", ["t"] + header, np.column_stack([np.full(len(run.r), t), data]))
    detail = {"dt": run.dt, "steps": int(len(run.times) - 1), "E0": float(run.energies[0]),
              "E_final": float(run.energies[-1]), "boundary": args.boundary, "metric": args.metric}
    results = []
    if args.mode == "scalar" and args.boundary == "reflecting":
        results.append(suites.SuiteResult("energy drift", run.energy_drift, args.drift_tol, detail=detail))
    else:
        finite = float(np.all(np.isfinite(run.energies)) or args.mode == "iso-son")
        detail["energy_drift"] = run.energy_drift
        results.append(suites.SuiteResult("finite evolution", finite, 0.5, "above", detail))
    return _finish(args, cfg, results)


# ------------------------------------------------------------ energy


def cmd_energy(args) -> int:
    cfg = RunConfig("energy", _params(args), args.seed, args.out).validate()
    if args.scale <= 0:
        raise ValidationError("--scale must be positive")
    if args.n < 3:
        raise ValidationError("--n >= 3 required")
    lam, n = args.scale, args.n
    r = np.linspace(args.rmin, args.rmax, args.N)
    u = 1 + args.amplitude * np.exp(-((r - args.center) / args.width) ** 2)
    ut = 0.1 * np.exp(-((r - args.center) / args.width) ** 2)
    base = energy(r, u, ut, n)
    rs, sc = scale(r, {"u": u, "u_t": ut}, lam)
    scaled = energy(rs, sc["u"], sc["u_t"], n)
    ratio = scaled.E / (lam ** (n - 4) * base.E)
    header, rows = grid_rows(r, {"u": u}, temporal={"u": ut})
    write_csv(Path(args.out) / "data.csv", header, rows)
    detail = {"E": base.E, "E_scaled": scaled.E, "ratio": ratio, "exponent": n - 4}
    print(f"E = {base.E:.12g}, E^lam = {scaled.E:.12g}, ratio to lam^(n-4) E = {ratio:.12g}")
    return _finish(args, cfg, [suites.SuiteResult("scaling ratio - 1", abs(ratio - 1), 1e-6, detail=detail)])


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eqym", description="Equivariant Yang-Mills reductions: checks and runs")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out):
        p.add_argument("--out", default=f"runs/{out}", help="output directory")
        p.add_argument("--seed", type=int, default=0)

    def case_args(p):
        p.add_argument("--n", type=int)
        p.add_argument("--p", type=int)
        p.add_argument("--q", type=int)
        p.add_argument("--pq", help="signature as 'p,q'")

    p = sub.add_parser("classify", help="dimension of the stabilizer fixed space")
    p.add_argument("--group", choices=("so", "sopq", "su"), required=True)
    case_args(p)
    common(p, "classify")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="run a residual suite")
    p.add_argument("--suite", choices=sorted(suites.SUITES), required=True)
    p.add_argument("--case", help="ansatz case (son, so3, so4, sopq3, sopq4, sopqn, sun, sun-h, iso-son)")
    case_args(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--metric", choices=sorted(NAMED_PROFILES), default="warped")
    p.add_argument("--corrupt", action="store_true", help="negative control: verify a broken ansatz")
    common(p, "verify")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="integrate a radial system from its series start")
    p.add_argument("--case", default="son")
    case_args(p)
    p.add_argument("--b", type=float, default=1.0, help="leading coefficient of g")
    p.add_argument("--a", type=float, default=0.0, help="leading coefficient of f (dimension 4)")
    p.add_argument("--rmin", type=float, default=0.01)
    p.add_argument("--rmax", type=float, default=5.0)
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--atol", type=float, default=1e-12)
    p.add_argument("--ode-tol", type=float, default=1e-8)
    common(p, "solve")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evolve", help="leapfrog evolution of the reduced wave equations")
    p.add_argument("--mode", choices=("scalar", "full", "iso-son"), default="scalar")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--metric", choices=sorted(NAMED_PROFILES), default="flat")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--N", type=int, default=2048)
    p.add_argument("--cfl", type=float, default=0.5)
    p.add_argument("--rmin", type=float, default=0.5)
    p.add_argument("--rmax", type=float, default=10.5)
    p.add_argument("--boundary", choices=("reflecting", "outflow"), default="reflecting")
    p.add_argument("--output-every", type=int, default=0)
    p.add_argument("--amplitude", type=float, default=0.3)
    p.add_argument("--center", type=float, default=5.0)
    p.add_argument("--width", type=float, default=0.7)
    p.add_argument("--h3", type=float, default=0.0, help="initial constant h3 (full mode)")
    p.add_argument("--drift-tol", type=float, default=1e-5)
    common(p, "evolve")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("energy", help="energy of bump data and its scaling ratio")
    p.add_argument("--scale", type=float, default=2.0)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--N", type=int, default=4001)
    p.add_argument("--rmin", type=float, default=0.5)
    p.add_argument("--rmax", type=float, default=10.5)
    p.add_argument("--amplitude", type=float, default=0.3)
    p.add_argument("--center", type=float, default=5.0)
    p.add_argument("--width", type=float, default=0.7)
    common(p, "energy")
    p.set_defaults(func=cmd_energy)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse uses 2 for usage errors already
        return int(e.code or 0)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
