"""Named verification suites behind the command-line ``verify`` command.

Each suite runs a battery of properties over a configured parameter grid
and reports the worst violation per property.  All randomness flows from
the configured seed, so reports are reproducible; the reduction over
samples is an exact max, so they do not depend on evaluation order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import cubes as cb
from . import kernels as kr
from . import maps as mp
from .errors import DomainError
from .genmaps import random_map_admissible_on, random_tame_map
from .replace import admissible_replace
from .retract import RetractionParams, approx_retraction, deformation_retraction_homotopy, deformation_schedule
from .tame import (
    ToleranceConfig,
    check_fiber_constant,
    check_tame,
    concat_homotopy,
    concat_maps,
    extend_tame,
    extend_to_jdelta,
    seam_report,
    tame_replace,
)

__all__ = ["SuiteConfig", "PropertyResult", "SUITE_NAMES", "run_suite", "report_schema_version"]

SCHEMA_VERSION = "1.0.0"


def report_schema_version() -> str:
    return SCHEMA_VERSION


def _plain(value):
    """Coerce numpy scalars and containers to JSON-native types."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


@dataclass(frozen=True)
class PropertyResult:
    name: str
    params: dict
    worst: float
    tol: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": _plain(self.params),
            "worst": float(self.worst),
            "tol": float(self.tol),
            "passed": bool(self.passed),
        }


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    ns: tuple[int, ...] = (1, 2, 3)
    eps_list: tuple[float, ...] = (0.1, 0.25, 0.4)
    grid_res: int = 33
    eq_tol: float = 1e-9
    deriv_tol: float = 1e-6
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if self.suite not in SUITE_NAMES and self.suite != "all":
            raise DomainError(f"unknown suite {self.suite!r}; known: {sorted(SUITE_NAMES)}")
        if any(not 1 <= n <= 4 for n in self.ns):
            raise DomainError(f"dimensions must be within 1..4, got {self.ns}")
        if self.grid_res < 3:
            raise DomainError("grid resolution must be at least 3")

    @property
    def tolerances(self) -> ToleranceConfig:
        return ToleranceConfig(self.eq_tol, self.deriv_tol, self.grid_res)


def _sample_ts(seed: int, count: int = 1000) -> np.ndarray:
    rng = np.random.default_rng(seed)
    half = count // 2
    return np.concatenate([np.linspace(-0.5, 1.5, half), rng.uniform(-0.5, 1.5, count - half)])


SMASH_PAIRS = ((0.1, 0.25), (0.05, 0.5), (0.0, 0.3), (0.2, 0.45), (0.15, 0.3))


def _simpson_integral(fn, a: float, b: float, panels: int = 4096) -> float:
    """Composite Simpson rule; the independent oracle for kernel integrals."""
    xs = np.linspace(a, b, 2 * panels + 1)
    ys = np.array([fn(float(x)) for x in xs])
    h = (b - a) / (2 * panels)
    return float(h / 3.0 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-2:2].sum()))


def _riemann_smash_F1(sigma: float, tau: float, panels: int = 10**6) -> float:
    """Midpoint Riemann value of the smash integral form at t = 1."""
    x = (np.arange(panels) + 0.5) / panels
    integrand = kr.lambda_many((tau * x - sigma) / (tau - sigma))
    return float(integrand.mean() + (tau + sigma) / (2.0 * tau))


def _kernels_suite(cfg: SuiteConfig) -> list[PropertyResult]:
    out = []
    ts = _sample_ts(cfg.seed)
    lam = kr.lambda_many(ts)
    lam_m = kr.lambda_many(1.0 - ts)
    out.append(
        PropertyResult(
            "lambda-symmetry", {"samples": len(ts)}, float(np.max(np.abs(lam_m - (1 - lam)))), 1e-12,
            bool(np.max(np.abs(lam_m - (1 - lam))) <= 1e-12),
        )
    )
    order = np.sort(ts)
    drops = -np.diff(kr.lambda_many(order))
    worst = float(max(0.0, drops.max())) if len(drops) else 0.0
    out.append(PropertyResult("lambda-monotone", {"samples": len(ts)}, worst, 1e-12, worst <= 1e-12))
    integral = _simpson_integral(kr.lambda_, 0.0, 1.0)
    gap = abs(integral - 0.5)
    out.append(PropertyResult("lambda-integral-half", {"panels": 4096}, gap, 1e-8, gap <= 1e-8))
    worst_fd = 0.0
    for t0, sgn in ((0.0, 1.0), (1.0, -1.0)):
        prev = None
        for h in (1e-2, 1e-3):
            d = abs(kr.lambda_(t0 + sgn * h) - kr.lambda_(t0)) / h
            if prev is not None and d > prev:
                worst_fd = max(worst_fd, d - prev)
            prev = d
    out.append(PropertyResult("lambda-flat-ends", {"steps": [1e-2, 1e-3]}, worst_fd, 0.0, worst_fd <= 0.0))

    for sigma, tau in SMASH_PAIRS:
        p = kr.SmashParams(sigma, tau)
        tv = kr.smash_T_many(p, ts)
        tv_m = kr.smash_T_many(p, 1.0 - ts)
        sym = float(np.max(np.abs(tv_m - (1.0 - tv))))
        out.append(
            PropertyResult("smash-symmetry", {"sigma": sigma, "tau": tau}, sym, 1e-9, sym <= 1e-9)
        )
        tsort = kr.smash_T_many(p, order)
        mono = float(max(0.0, (-np.diff(tsort)).max()))
        out.append(
            PropertyResult("smash-monotone", {"sigma": sigma, "tau": tau}, mono, 1e-9, mono <= 1e-9)
        )
        band = np.linspace(tau, 1.0 - tau, 101)
        ident = float(np.max(np.abs(kr.smash_T_many(p, band) - band)))
        out.append(
            PropertyResult("smash-identity-band", {"sigma": sigma, "tau": tau}, ident, 1e-9, ident <= 1e-9)
        )
        if sigma > 0:
            flat = np.concatenate([np.linspace(-0.3, sigma, 41), np.linspace(1 - sigma, 1.3, 41)])
            vals = kr.smash_T_many(p, flat)
            expected = np.where(flat <= 0.5, 0.0, 1.0)
            worst_flat = float(np.max(np.abs(vals - expected)))
            out.append(
                PropertyResult(
                    "smash-flat-bands-exact", {"sigma": sigma, "tau": tau}, worst_flat, 0.0, worst_flat <= 0.0
                )
            )
        fv = tau * kr.smash_F(p, 0.5 / tau)
        seam = abs(fv - (1.0 - fv))
        out.append(
            PropertyResult("smash-seam-half", {"sigma": sigma, "tau": tau}, seam, 1e-9, seam <= 1e-9)
        )
    for sigma, tau in ((0.1, 0.25), (0.05, 0.5), (0.0, 0.3)):
        oracle = _riemann_smash_F1(sigma, tau)
        got = kr.smash_F(kr.SmashParams(sigma, tau), 1.0)
        gap = abs(got - oracle)
        out.append(
            PropertyResult("smash-F-riemann-oracle", {"sigma": sigma, "tau": tau}, gap, 1e-8, gap <= 1e-8)
        )
    return out


def _grid(n: int, res: int) -> np.ndarray:
    axes = [np.linspace(0.0, 1.0, res)] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _retract_suite(cfg: SuiteConfig) -> list[PropertyResult]:
    out = []
    for n in cfg.ns:
        for eps in cfg.eps_list:
            R = approx_retraction(RetractionParams.from_eps(n, eps))
            pts = _grid(n, 21)
            dist = float(cb.dist_to_complex(cb.j_complex(n), R.eval_many(pts)).max())
            out.append(
                PropertyResult("retraction-containment", {"n": n, "eps": eps}, dist, 1e-9, dist <= 1e-9)
            )
            ch = cb.region_grid(cb.chamber_region(cb.j_complex(n), eps), 9)
            dev = float(np.max(np.abs(R.eval_many(ch) - ch))) if len(ch) else 0.0
            out.append(
                PropertyResult("retraction-chamber-identity", {"n": n, "eps": eps}, dev, 1e-12, dev <= 1e-12)
            )
    for n in [n for n in cfg.ns if n >= 2]:
        eps = 0.3
        H = deformation_retraction_homotopy(n, eps)
        delta = deformation_schedule(n, eps)["retraction_eps"]
        pts = _grid(n, 9 if n >= 3 else 21)
        z = np.concatenate([pts, np.zeros((len(pts), 1))], axis=1)
        o = np.concatenate([pts, np.ones((len(pts), 1))], axis=1)
        dev0 = float(np.max(np.abs(H.map.eval_many(z) - pts)))
        out.append(PropertyResult("deformation-identity-at-0", {"n": n, "eps": eps}, dev0, 1e-12, dev0 <= 1e-12))
        dist1 = float(cb.dist_to_complex(cb.j_complex(n), H.map.eval_many(o)).max())
        out.append(PropertyResult("deformation-containment-at-1", {"n": n, "eps": eps}, dist1, 1e-9, dist1 <= 1e-9))
        ch = cb.region_grid(cb.chamber_region(cb.j_complex(n), delta), 7)
        worst = 0.0
        for u in (0.0, 0.25, 0.5, 0.75, 1.0):
            su = np.concatenate([ch, np.full((len(ch), 1), u)], axis=1)
            worst = max(worst, float(np.max(np.abs(H.map.eval_many(su) - ch))))
        out.append(PropertyResult("deformation-chamber-fixed", {"n": n, "eps": eps}, worst, 1e-12, worst <= 1e-12))
        region = cb.j_delta_region(n, delta)
        rp = cb.region_grid(region, 9)
        worst_in = 0.0
        for u in (0.25, 0.5, 0.75, 1.0):
            su = np.concatenate([rp, np.full((len(rp), 1), u)], axis=1)
            worst_in = max(worst_in, float(cb.dist_to_region(region, H.map.eval_many(su)).max()))
        out.append(
            PropertyResult("deformation-collar-region-stable", {"n": n, "eps": eps}, worst_in, 1e-9, worst_in <= 1e-9)
        )
    try:
        RetractionParams(2, eps=0.2, sigma=0.05, eps_prime=0.3)
        rejected = 1.0
    except DomainError:
        rejected = 0.0
    out.append(PropertyResult("retraction-bad-params-rejected", {}, rejected, 0.0, rejected <= 0.0))
    return out


def _tame_suite(cfg: SuiteConfig) -> list[PropertyResult]:
    out = []
    tol = cfg.tolerances
    for eps in (0.05, 0.1, 0.25):
        rep = check_tame(mp.Coord(1, 1).on_unit_box(), cb.full_cube(1), eps, tol, cfg.seed)
        witness_gap = 1.0
        if not rep.passed and rep.witness is not None:
            depth = abs(rep.witness.point[rep.witness.axis - 1] - rep.witness.alpha)
            witness_gap = abs(rep.worst_violation - depth)
        out.append(
            PropertyResult("identity-not-tame", {"eps": eps}, witness_gap, 1e-12, witness_gap <= 1e-12)
        )
    g, H = tame_replace(mp.Coord(1, 1).on_unit_box(), 0.1, 0.25)
    rep = check_tame(g, cb.full_cube(1), 0.1, tol, cfg.seed)
    out.append(
        PropertyResult("taming-produces-tame", {"sigma": 0.1, "eps": 0.25}, rep.worst_violation, tol.eq_tol, rep.passed)
    )
    ch = cb.region_grid(cb.chamber_region(cb.full_cube(1), 0.25), 9)
    worst = 0.0
    for u in (0.0, 0.5, 1.0):
        su = np.concatenate([ch, np.full((len(ch), 1), u)], axis=1)
        worst = max(worst, float(np.max(np.abs(H.map.eval_many(su) - ch))))
    out.append(PropertyResult("taming-relative-to-chamber", {"sigma": 0.1, "eps": 0.25}, worst, tol.eq_tol, worst <= tol.eq_tol))

    for i, n in enumerate([n for n in cfg.ns if n <= 3][:3]):
        eps, sigma = 0.25, 0.1
        rng = np.random.default_rng(cfg.seed + 100 + i)
        f = random_tame_map(rng, n, eps, space_eps=0.5 * (eps + 0.5))
        gext = extend_tame(f, eps=eps, sigma=sigma, cfg=tol, seed=cfg.seed)
        pts = cb.complex_grid(cb.j_complex(n), min(cfg.grid_res, 17))
        gap = float(np.max(np.abs(gext.eval_many(pts) - f.on_unit_box().eval_many(pts))))
        out.append(PropertyResult("extension-restriction", {"n": n, "eps": eps}, gap, tol.eq_tol, gap <= tol.eq_tol))
        quick = ToleranceConfig(tol.eq_tol, tol.deriv_tol, min(cfg.grid_res, 17))
        rep = check_tame(gext, cb.full_cube(n), sigma, quick, cfg.seed)
        out.append(PropertyResult("extension-tame", {"n": n, "sigma": sigma}, rep.worst_violation, tol.eq_tol, rep.passed))
        bottom = cb.CubicalComplex(n, (cb.Face(n, ((n, 0),)),))
        repb = check_tame(gext, bottom, 0.5 * (sigma + eps), quick, cfg.seed)
        out.append(
            PropertyResult("extension-bottom-tame", {"n": n}, repb.worst_violation, tol.eq_tol, repb.passed)
        )

    rng = np.random.default_rng(cfg.seed + 200)
    f1 = random_tame_map(rng, 2, 0.25)
    g1, h1 = tame_replace(f1, 0.1, 0.25)
    g2, h2 = tame_replace(g1, 0.05, 0.1)
    hh = concat_homotopy(h1, h2, tol)
    val, fd, ok = seam_report(hh.map, tol)
    out.append(PropertyResult("concat-seam-value", {"n": 2}, val, tol.eq_tol, val <= tol.eq_tol))
    out.append(PropertyResult("concat-seam-derivative", {"n": 2}, fd, tol.deriv_tol, fd <= tol.deriv_tol))

    rng = np.random.default_rng(cfg.seed + 300)
    base = random_tame_map(rng, 2, 0.2)
    c0 = base.eval([0.0, 0.0])
    flat = mp.add(
        mp.const(tuple(c0), 2),
        mp.mul(
            mp.lambda_map(mp.affine_row(2, {1: 5.0}, -1.0)),
            mp.lambda_map(mp.affine_row(2, {1: -5.0}, 4.0)),
            mp.lambda_map(mp.affine_row(2, {2: 5.0}, -1.0)),
            mp.lambda_map(mp.affine_row(2, {2: -5.0}, 4.0)),
            mp.add(base, mp.const(tuple(-c0), 2)),
        ),
    )
    star = concat_maps(flat, flat, tol)
    bpts = cb.complex_grid(cb.boundary_complex(2), min(cfg.grid_res, 17))
    worst = float(np.max(np.abs(star.eval_many(bpts) - np.asarray(c0))))
    out.append(PropertyResult("concat-constant-boundary", {"n": 2}, worst, tol.eq_tol, worst <= tol.eq_tol))

    p = kr.SmashParams(0.2, 0.35)
    fc = mp.tup(*[mp.smash_map(p, mp.coord(k, 2)) for k in (1, 2)]).on_unit_box()
    rep = check_fiber_constant(fc, 0.2, 0.35, ToleranceConfig(tol.eq_tol, tol.deriv_tol, 9), cfg.seed)
    out.append(PropertyResult("fiber-constant-smash", {"eps": 0.2}, rep.worst_violation, tol.eq_tol, rep.passed))

    rng = np.random.default_rng(cfg.seed + 400)
    for n in [n for n in cfg.ns if 2 <= n <= 3][:2]:
        eps = 0.3
        # exactly eps-tame, hence eps-admissible; push onto the collared region
        f = random_tame_map(rng, n, eps)
        fe = extend_to_jdelta(f, eps, cfg=ToleranceConfig(tol.eq_tol, tol.deriv_tol, 9), seed=cfg.seed)
        pts = cb.complex_grid(cb.j_complex(n), 9)
        gap = float(np.max(np.abs(fe.eval_many(pts) - f.on_unit_box().eval_many(pts))))
        out.append(PropertyResult("jdelta-agrees-on-walls", {"n": n, "eps": eps}, gap, tol.eq_tol, gap <= tol.eq_tol))
    return out


def _replace_suite(cfg: SuiteConfig) -> list[PropertyResult]:
    out = []
    cases = [
        (2, cb.boundary_complex(2), cb.CubicalComplex(2, (cb.Face(2, ((1, 0),)),)), cfg.seed + 1),
        (2, cb.boundary_complex(2), cb.CubicalComplex(2, (cb.Face(2, ((2, 1),)),)), cfg.seed + 2),
        (3, cb.boundary_complex(3), cb.CubicalComplex(3, (cb.Face(3, ((1, 0),)),)), cfg.seed + 3),
    ]
    eps = 0.2
    tol = cfg.tolerances
    for n, K, L, seed in cases:
        rng = np.random.default_rng(seed)
        f = random_map_admissible_on(rng, n, L, eps)
        quick = ToleranceConfig(tol.eq_tol, tol.deriv_tol, min(cfg.grid_res, 17 if n == 3 else 33))
        g, H, trace = admissible_replace(f, K, L, eps, quick, seed=seed)
        out.append(
            PropertyResult(
                "replace-admissible",
                {"n": n, "L": L.describe(), "eps": eps},
                trace.final_report.worst_violation,
                tol.eq_tol,
                trace.final_report.passed,
            )
        )
        pts = cb.complex_grid(K, quick.grid_res)
        f_unit = f.on_unit_box()
        e0 = float(np.max(np.abs(H.slice(0.0).eval_many(pts) - f_unit.eval_many(pts))))
        e1 = float(np.max(np.abs(H.slice(1.0).eval_many(pts) - g.eval_many(pts))))
        worst = max(e0, e1)
        out.append(
            PropertyResult("replace-endpoints", {"n": n, "L": L.describe()}, worst, tol.eq_tol, worst <= tol.eq_tol)
        )
        lpts = cb.complex_grid(L, quick.grid_res)
        fl = f_unit.eval_many(lpts)
        worst = 0.0
        for u in (0.0, 0.25, 0.5, 0.75, 1.0):
            su = np.concatenate([lpts, np.full((len(lpts), 1), u)], axis=1)
            worst = max(worst, float(np.max(np.abs(H.map.eval_many(su) - fl))))
        out.append(
            PropertyResult("replace-relative-on-L", {"n": n, "L": L.describe()}, worst, tol.eq_tol, worst <= tol.eq_tol)
        )
    return out


SUITES = {
    "kernels": _kernels_suite,
    "retract": _retract_suite,
    "tame": _tame_suite,
    "replace": _replace_suite,
}
SUITE_NAMES = frozenset(SUITES)


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("TAMECUBE_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(cfg: SuiteConfig) -> dict:
    """Execute a suite (or all of them) and assemble the JSON report."""
    names = sorted(SUITES) if cfg.suite == "all" else [cfg.suite]
    cap = _thread_cap()
    if cap > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=min(cap, len(names))) as pool:
            batches = list(pool.map(lambda s: SUITES[s](cfg), names))
    else:
        batches = [SUITES[s](cfg) for s in names]
    results = [r for batch in batches for r in batch]
    failures = sum(1 for r in results if not r.passed)
    return {
        "schema": SCHEMA_VERSION,
        "suite": cfg.suite,
        "config": {
            "ns": list(cfg.ns),
            "eps": list(cfg.eps_list),
            "grid_res": cfg.grid_res,
            "eq_tol": cfg.eq_tol,
            "deriv_tol": cfg.deriv_tol,
            "seed": cfg.seed,
        },
        "results": [r.to_json() for r in results],
        "failures": failures,
        "passed": failures == 0,
    }
