"""Residual suites shared by the CLI and the acceptance tests.

Every suite returns a :class:`SuiteResult`; ``passed`` compares ``value``
against ``tol`` in the direction given by ``mode`` ("below" or "above").
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import equivariance as eqv
from .ansatz import (PROFILE_NAMES, TIME_CASES, constant, corrupted_evaluator,
                     equivariance_residual, make_ansatz, random_profile, random_spacetime_profile)
from .geometry import (MetricSpec, ansatz_field, curvature_closed, curvature_fd, default_metric, flat_metric,
                       form_basis, hodge_path_prediction, hodge_path_residual, hodge_star, named_metric,
                       ym_residual)
from .group import random_group_element
from .identities import all_tables, failures, sopq_table
from .lie import Signature, euclidean
from .reduced import ComplexProfile, ReducedState, constraint_residuals, energy, projected_lhs, reduced_lhs, scale
from .solvers import WaveConfig, convergence_factor, evolve_wave, integrate_radial


@dataclass
class SuiteResult:
    name: str
    value: float
    tol: float
    mode: str = "below"
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return self.value < self.tol if self.mode == "below" else self.value > self.tol

    def line(self) -> str:
        rel = "<" if self.mode == "below" else ">"
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.value:.3e} (need {rel} {self.tol:g})"

    def to_json(self) -> dict:
        return {"name": self.name, "value": float(self.value), "tol": self.tol, "mode": self.mode,
                "passed": bool(self.passed), "detail": _plain(self.detail)}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


# ------------------------------------------------------------ case registry

# every ansatz case with the signatures exercised by default
CASE_REGISTRY = [
    ("SO3", {"n": 3}), ("SO4", {"n": 4}), ("SON", {"n": 5}), ("SON", {"n": 6}),
    ("SOPQ3", {"p": 1, "q": 2}), ("SOPQ3", {"p": 2, "q": 1}),
    ("SOPQ4", {"p": 1, "q": 3}), ("SOPQ4", {"p": 2, "q": 2}), ("SOPQ4", {"p": 3, "q": 1}),
    ("SOPQN", {"p": 2, "q": 3}), ("SOPQN", {"p": 1, "q": 4}), ("SOPQN", {"p": 3, "q": 3}),
    ("SUN", {"n": 4}), ("SUN", {"n": 5}), ("SUN-H", {"n": 4}), ("SUN-H", {"n": 6}), ("ISO-SON", {"n": 5}),
]

# the systems whose projected residual is compared against the reduced equations
PROJECTION_CASES = [
    ("SON", {"n": 5}), ("SON", {"n": 6}), ("SO4", {"n": 4}),
    ("SOPQ4", {"p": 1, "q": 3}), ("SOPQ4", {"p": 2, "q": 2}),
    ("ISO-SON", {"n": 4}), ("ISO-SON", {"n": 5}), ("SUN-H", {"n": 4}), ("SUN-H", {"n": 5}), ("SUN-H", {"n": 6}),
]


def case_label(case: str, kw: dict) -> str:
    return f"{case}(p={kw['p']},q={kw['q']})" if "p" in kw else f"{case}(n={kw['n']})"


def random_ansatz(case: str, kw: dict, rng, profiles: dict | None = None):
    td = case in TIME_CASES
    prof = {k: (random_spacetime_profile(rng) if td else random_profile(rng)) for k in PROFILE_NAMES[case]}
    prof.update(profiles or {})
    return make_ansatz(case, **kw, **prof)


def metric_for(a, name: str = "warped") -> MetricSpec:
    return named_metric(name, a.n) if a.time_dependent else default_metric(a)


def sample_point(sig: Signature, rng, image_of=None):
    """Random x with x^T I x > 0.3 on the future sheet; optionally require L x to qualify too."""
    while True:
        x = rng.normal(size=sig.n)
        if sig.norm2(x) <= 0.3 or (sig.p == 1 and sig.q and x[0] <= 0):
            continue
        if image_of is not None:
            y = image_of.matrix @ x
            if sig.norm2(y) <= 0 or (sig.p == 1 and sig.q and y[0] <= 0):
                continue
        return x


# ------------------------------------------------------------ classification


def classification() -> SuiteResult:
    t0 = time.perf_counter()
    worst, gaps, dims = 0, [], {}
    cases = [euclidean(n) for n in eqv.EXPECTED_SO] + [Signature(p, q) for p, q in eqv.EXPECTED_SOPQ]
    for sig in cases:
        rep = eqv.fixed_space(sig)
        exp = eqv.expected_dimension(sig)
        dims[rep.case] = (rep.dimension, exp)
        worst += rep.dimension != exp
        gaps.append(rep.gap_ratio)
    elapsed = time.perf_counter() - t0
    detail = {"dimensions": dims, "min_gap": float(min(gaps)), "seconds": elapsed,
              "note": "so+(1,1): the full R^2 (x) so(1,1), dimension 2"}
    ok_gap = min(gaps) >= eqv.GAP_MIN and elapsed < 10
    return SuiteResult("classification mismatches", worst + (0 if ok_gap else 1), 0.5, detail=detail)


def closed_forms() -> SuiteResult:
    worst, per = 0.0, {}
    cases = [euclidean(n) for n in eqv.EXPECTED_SO] + [Signature(p, q) for p, q in eqv.EXPECTED_SOPQ]
    for sig in cases:
        rep = eqv.fixed_space(sig)
        ang = float(np.max(eqv.principal_angles(rep.basis, eqv.closed_form_basis(sig))))
        per[rep.case] = ang
        worst = max(worst, ang)
    for n in (4, 5, 6):
        rep = eqv.su_symmetric_fixed_space(n)
        ang = float(np.max(eqv.principal_angles(rep.basis, eqv.su_symmetric_closed_form(n))))
        per[rep.case] = ang
        worst = max(worst, ang)
    return SuiteResult("closed-form principal angle", worst, 1e-7, detail=per)


# ------------------------------------------------------------ identities


def commutators(pq: tuple | None = None, points: int = 20, seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed)
    if pq is not None:
        tables = {f"sopq{pq}": sopq_table(Signature(*pq), rng, points)}
    else:
        tables = all_tables(rng, points)
    worst = max(max(d.values()) for d in tables.values())
    return SuiteResult("commutator tables", worst, 1e-10,
                       detail={"tables": tables, "failures": failures(tables)})


# ------------------------------------------------------------ equivariance


def equivariance(cases=None, samples: int = 100, seed: int = 0, corrupt: bool = False) -> SuiteResult:
    rng = np.random.default_rng(seed)
    per = {}
    for case, kw in cases or CASE_REGISTRY:
        a = random_ansatz(case, kw, rng)
        sig = a.signature
        worst = 0.0
        for _ in range(samples):
            lam = random_group_element(sig, rng)
            x = sample_point(sig, rng, image_of=lam)
            t = float(rng.normal()) if a.time_dependent else 0.0
            ev = corrupted_evaluator(a, t) if corrupt else None
            worst = max(worst, equivariance_residual(a, lam, x, t, evaluator=ev))
        per[case_label(case, kw)] = worst
    name = "equivariance residual" + (" (corrupted ansatz)" if corrupt else "")
    return SuiteResult(name, max(per.values()), 1e-9, detail=per)


# ------------------------------------------------------------ curvature


def curvature(cases=None, points: int = 20, step: float = 1e-5, seed: int = 0, corrupt: bool = False
              ) -> SuiteResult:
    rng = np.random.default_rng(seed)
    per = {}
    for case, kw in cases or CASE_REGISTRY:
        a = random_ansatz(case, kw, rng)
        fd_field = ansatz_field(a)
        if corrupt:
            base = fd_field
            fd_field = lambda y, base=base: base(y) * (1 + 0.01 * y[-1])  # noqa: E731
        worst = 0.0
        for _ in range(points):
            x = sample_point(a.signature, rng)
            t = float(rng.normal()) if a.time_dependent else 0.0
            y = np.concatenate([[t], x]) if a.time_dependent else x
            Fc = curvature_closed(a, x, t)
            Ff = curvature_fd(fd_field, y, step)
            worst = max(worst, float(np.abs(Ff - Fc).max() / max(np.abs(Fc).max(), 1e-300)))
        per[case_label(case, kw)] = worst
    return SuiteResult("curvature closed vs FD (relative)", max(per.values()), 1e-6, detail=per)


# ------------------------------------------------------------ reduction


def projection(cases=None, samples: int = 20, seed: int = 0, metric: str = "warped",
               corrupt: bool = False) -> SuiteResult:
    """Generator-projected YM residual against the reduced-equation left-hand sides."""
    rng = np.random.default_rng(seed)
    per = {}
    for case, kw in cases or PROJECTION_CASES:
        a = random_ansatz(case, kw, rng)
        met = metric_for(a, metric)
        worst, misfit = 0.0, 0.0
        for _ in range(samples):
            x = sample_point(a.signature, rng)
            t = float(rng.normal()) if a.time_dependent else 0.0
            r = float(np.sqrt(a.signature.norm2(x)))
            proj = projected_lhs(a, met, x, t)
            red = reduced_lhs(ReducedState.from_ansatz(a, r, t), met)
            if corrupt:
                red = {k: v * 1.01 + 1e-3 for k, v in red.items()}
            misfit = max(misfit, proj.pop("misfit"))
            proj.pop("time", None)
            for k, v in red.items():
                worst = max(worst, abs(proj[k] - v) / max(abs(v), 1.0))
        per[case_label(case, kw)] = {"relative": worst, "misfit": misfit}
    value = max(max(d["relative"], d["misfit"]) for d in per.values())
    return SuiteResult("projection vs reduced LHS (relative)", value, 1e-8, detail=per)


# ------------------------------------------------------------ solver


def solver(seed: int = 0, points: int = 20) -> SuiteResult:
    rng = np.random.default_rng(seed)
    sol = integrate_radial("SON", 1.0, (0.01, 5.0), n=5, rtol=1e-10, atol=1e-12)
    a = make_ansatz("SON", n=5, g=sol.profile("g"))
    met = flat_metric(5)
    worst = 0.0
    for _ in range(points):
        r = rng.uniform(0.05, 4.95)
        u = rng.normal(size=5)
        x = r * u / np.linalg.norm(u)
        worst = max(worst, float(np.abs(ym_residual(a, met, x)).max()))
    s4 = integrate_radial("SO4", 1.0, (0.01, 3.0), p=4, a=0.0)
    n4 = integrate_radial("SON", 1.0, (0.01, 3.0), n=4)
    grid = np.linspace(0.01, 3.0, 400)
    diff = float(np.max(np.abs(s4.state_at(grid)[0] - n4.state_at(grid)[0])))
    zero_f = float(np.max(np.abs(s4.values["f"])))
    detail = {"ym_residual": worst, "so4_vs_son4": diff, "so4_f_max": zero_f, "steps": sol.stats["steps"]}
    value = max(worst / 1e-7, diff / 1e-10)  # normalised: < 1 passes both parts
    return SuiteResult("solver self-consistency (normalised)", value, 1.0, detail=detail)


# ------------------------------------------------------------ Hodge


def hodge(seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed)
    sign_worst = 0.0
    for N in range(1, 6):
        for p in range(1, N + 1):
            met = flat_metric(N, p, N - p)
            y = rng.normal(size=N)
            sdet = float(np.prod(met.signature.eps))
            for k in range(N + 1):
                for _, w in form_basis(k, N):
                    ss = hodge_star(hodge_star(w, k, met, y), N - k, met, y)
                    sign_worst = max(sign_worst, float(np.abs(ss - (-1) ** (k * (N - k)) * sdet * w).max()))
    path_worst, per = 0.0, {}
    cases = [("SON", {"n": 3}), ("SON", {"n": 5}), ("SO4", {"n": 4}), ("SO3", {"n": 3}),
             ("SOPQ3", {"p": 1, "q": 2}), ("SOPQ4", {"p": 1, "q": 3}), ("SOPQ4", {"p": 2, "q": 2}),
             ("SOPQN", {"p": 2, "q": 3})]
    for case, kw in cases:
        a = random_ansatz(case, kw, rng)
        met = default_metric(a)
        w = 0.0
        for _ in range(3):
            x = sample_point(a.signature, rng)
            R = ym_residual(a, met, x)
            H = hodge_path_residual(a, met, x)
            P = hodge_path_prediction(R, met, x)
            w = max(w, float(np.abs(H - P).max() / max(np.abs(H).max(), 1e-300)))
        per[case_label(case, kw)] = w
        path_worst = max(path_worst, w)
    return SuiteResult("Hodge sign law and path residual", max(sign_worst, path_worst), 1e-8,
                       detail={"sign_law": sign_worst, "path": per})


# ------------------------------------------------------------ wave


def bump_data(amplitude: float = 0.3, center: float = 5.0, width: float = 0.7):
    return (lambda r: 1 + amplitude * np.exp(-((r - center) / width) ** 2)), (lambda r: 0 * r)


def wave(N: int = 2048, conv_N: int = 256) -> SuiteResult:
    u0, v0 = bump_data()
    run = evolve_wave(u0, v0, WaveConfig(mode="scalar", n=5, N=N, cfl=0.5, T=1.0))
    conv = convergence_factor(u0, v0, WaveConfig(mode="scalar", n=5, N=conv_N, cfl=0.5, T=1.0))
    drift = run.energy_drift
    detail = {"drift": drift, "E0": float(run.energies[0]), "convergence": conv, "dt": run.dt}
    value = max(drift / 1e-5, abs(conv["factor"] - 4) / 0.5)
    return SuiteResult("wave drift and convergence (normalised)", value, 1.0, detail=detail)


# ------------------------------------------------------------ scaling


def scaling(N: int = 512, T: float = 0.5) -> SuiteResult:
    """E^lam(t) = lam^{n-4} E(t / lam) for matched-grid runs of scaled data."""
    per = {}
    for n in (4, 5):
        u0, v0 = bump_data(0.2, 4.0, 0.8)
        base_cfg = WaveConfig(mode="scalar", n=n, r_min=0.5, r_max=10.5, N=N, cfl=0.5, T=T, output_every=8)
        base = evolve_wave(u0, v0, base_cfg)
        for lam in (0.5, 2.0):
            cfg = WaveConfig(**{**base_cfg.__dict__, "r_min": lam * base_cfg.r_min, "r_max": lam * base_cfg.r_max,
                                "T": lam * T})
            run = evolve_wave(lambda r, lam=lam: u0(r / lam), lambda r, lam=lam: v0(r / lam) / lam, cfg)
            rel_series = float(np.max(np.abs(run.energies - lam ** (n - 4) * base.energies))
                               / np.max(np.abs(base.energies)))
            # quadrature check on one snapshot: the continuum energy of scaled samples
            t_b, snap = base.snapshots[-1]
            rs, sc = scale(base.r, {"u": snap["u"], "u_t": snap["u_t"]}, lam)
            E_b = energy(base.r, snap["u"], snap["u_t"], n).E
            E_s = energy(rs, sc["u"], sc["u_t"], n).E
            rel_quad = abs(E_s - lam ** (n - 4) * E_b) / abs(E_b)
            per[f"n={n},lam={lam}"] = {"series": rel_series, "quadrature": rel_quad,
                                       "steps": int(len(run.times) - 1), "base_steps": int(len(base.times) - 1)}
    value = max(max(d["series"], d["quadrature"]) for d in per.values())
    return SuiteResult("energy scaling law (relative)", value, 1e-6, detail=per)


# ------------------------------------------------------------ exact solutions


def fixed_points(n: int = 5) -> SuiteResult:
    r = np.linspace(0.2, 6.0, 200)
    per = {}
    met = named_metric("warped", n)
    for label, h, h3 in [("h=0,h3=0.7", 0 * r + 0j, 0.7 + 0 * r), ("|h|=1,h3=0", np.exp(0.4j) + 0 * r, 0 * r)]:
        cp = ComplexProfile(r, h, h3, h_r=0 * r, h_rr=0 * r, h3_r=0 * r)
        res = constraint_residuals(cp, n, met)
        a = make_ansatz("SUN-H", n=n, h1=constant(float(np.real(h[0]))), h2=constant(float(np.imag(h[0]))),
                        h3=constant(float(h3[0])))
        full = max(float(np.abs(ym_residual(a, met, x, 0.3)).max())
                   for x in np.random.default_rng(1).normal(size=(5, n)))
        per[label] = {k: v for k, v in res.items() if k in ("hwave", "h3wave", "timeq", "complextime")}
        per[label]["full_ym"] = full
    # static data h = rho e^{i phi}, phi = arctan r, h3 = -r phi'
    rho = 1 + 0.2 * np.exp(-r * r)
    rho_r = -0.4 * r * np.exp(-r * r)
    phi, phi_r = np.arctan(r), 1 / (1 + r * r)
    h = rho * np.exp(1j * phi)
    h_r = (rho_r + 1j * rho * phi_r) * np.exp(1j * phi)
    cp = ComplexProfile(r, h, -r * phi_r, h_r=h_r)
    per["static arctan"] = {"static_relation": constraint_residuals(cp, n, met)["static_relation"]}
    value = max(max(d.values()) for d in per.values())
    return SuiteResult("exact-solution residuals", value, 1e-12, detail=per)


# ------------------------------------------------------------ spin


def spin(seed: int = 0, samples: int = 20) -> SuiteResult:
    from .spin import (lift_field, random_spin_element, spin_equivariance_residual, spin_lambda_d,
                       spin_lambda_inv)
    from .ansatz import ansatz_eval
    from .lie import basis_for

    rng = np.random.default_rng(seed)
    round_worst, inflation = 0.0, 0.0
    for p, q in [(3, 0), (4, 0), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)]:
        sig = Signature(p, q)
        for m in basis_for(sig).elements:
            round_worst = max(round_worst, float(np.abs(spin_lambda_d(spin_lambda_inv(m, sig), sig) - m).max()))
        case = {3: "SOPQ3", 4: "SOPQ4"}.get(sig.n, "SOPQN")
        a = random_ansatz(case, {"p": p, "q": q}, rng)

        def field(x, a=a, sig=sig):
            return lift_field(ansatz_eval(a, x), sig)

        for _ in range(samples):
            s = random_spin_element(sig, rng)
            lam = s.cover()
            x = sample_point(sig, rng, image_of=lam)
            base = equivariance_residual(a, lam, x)
            lifted = spin_equivariance_residual(field, s, x)
            inflation = max(inflation, lifted / max(base, 1e-13))  # floor: roundoff level
    value = max(round_worst / 1e-13, inflation / 10)
    return SuiteResult("spin lift (normalised)", value, 1.0,
                       detail={"roundtrip": round_worst, "inflation": inflation})


SUITES = {
    "classification": classification, "closed-form": closed_forms, "commutators": commutators,
    "equivariance": equivariance, "curvature": curvature, "projection": projection, "solver": solver,
    "hodge": hodge, "wave": wave, "scaling": scaling, "fixed-points": fixed_points, "spin": spin,
}
