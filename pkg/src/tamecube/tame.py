"""Collar-constancy checking and the operators built on it.

A map on a subset of I^n is eps-tame when its value at a point equals its
value at the orthogonal projection onto any face whose coordinate is
within eps, whenever that projection stays in the subset.  Admissibility
grades the width by the dimension of the face being tested.  Checks are
grid-based: structured grids per maximal face or box plus seeded
pseudo-random points, compared with exact max reduction so the worst
violation and its witness are deterministic.

The operators: ``tame_replace`` composes with a coordinatewise smash to
produce a tame map together with the straight-line homotopy; ``extend_tame``
extends a tame map from the walls-plus-top complex over the whole cube via
an approximate retraction with time-modulated band widths;
``extend_to_jdelta`` pushes a map outward onto the collared boundary
region; the concatenation operators splice homotopies and maps with flat
seams at 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as _dc_replace

import numpy as np

from .cubes import (
    BoxRegion,
    CubicalComplex,
    Face,
    complex_grid,
    complex_random,
    dist_to_complex,
    dist_to_region,
    full_cube,
    intersect_complex_face,
    intersect_region_face,
    j_complex,
    positive_faces,
    region_grid,
    region_random,
    MEMBERSHIP_TOL,
)
from .errors import DimensionError, DomainError, TamenessError
from .kernels import SmashParams
from .maps import (
    Homotopy,
    PiecewiseAxis,
    SmoothMap,
    affine_row,
    add,
    compose,
    coord,
    lambda_map,
    mul,
    one_minus,
    piecewise,
    smash_map,
    smashdyn_map,
    tup,
    unit_box,
)
from .retract import RetractionParams, approx_retraction

__all__ = [
    "ToleranceConfig",
    "Witness",
    "TamenessReport",
    "check_tame",
    "check_admissible",
    "tame_replace",
    "extend_tame",
    "jdelta_collar",
    "extend_to_jdelta",
    "concat_homotopy",
    "concat_maps",
    "check_fiber_constant",
    "seam_report",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Comparison tolerances and per-axis grid resolution for the checkers."""

    eq_tol: float = 1e-9
    deriv_tol: float = 1e-6
    grid_res: int = 33

    def __post_init__(self):
        if not (self.eq_tol > 0 and self.deriv_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.grid_res < 3:
            raise DomainError("grid_res must be at least 3")


DEFAULT_TOLERANCES = ToleranceConfig()


@dataclass(frozen=True)
class Witness:
    point: tuple[float, ...]
    axis: int
    alpha: int


@dataclass(frozen=True)
class TamenessReport:
    """Verdict of a tameness or admissibility check."""

    passed: bool
    eps_tested: float
    worst_violation: float
    witness: Witness | None
    samples_checked: int
    per_face: tuple | None = None

    def to_json(self) -> dict:
        w = None
        if self.witness is not None:
            w = {
                "point": list(self.witness.point),
                "axis": self.witness.axis,
                "alpha": self.witness.alpha,
            }
        return {
            "passed": self.passed,
            "eps": self.eps_tested,
            "worst": self.worst_violation,
            "witness": w,
            "samples": self.samples_checked,
        }


def _sample_domain(K, res: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if isinstance(K, CubicalComplex):
        grid = complex_grid(K, res)
        extra = complex_random(K, res, rng)
    elif isinstance(K, BoxRegion):
        grid = region_grid(K, res)
        extra = region_random(K, res, rng)
    else:
        raise DimensionError(f"cannot sample a {type(K).__name__}")
    if len(extra):
        return np.concatenate([grid, extra], axis=0)
    return grid


def _distance(K, pts: np.ndarray) -> np.ndarray:
    if isinstance(K, CubicalComplex):
        return dist_to_complex(K, pts)
    return dist_to_region(K, pts)


def check_tame(
    f: SmoothMap,
    K,
    eps: float,
    cfg: ToleranceConfig | None = None,
    seed: int = 0,
) -> TamenessReport:
    """Grid check that f is eps-tame on K (a complex, region, or full cube).

    For every sampled point, axis, and side with the coordinate within eps
    of the face value and the projection inside K, compares the two values
    in max norm.  The worst discrepancy, its witness, and the number of
    comparisons are reported.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    if not 0.0 < eps <= 0.5:
        raise DomainError(f"tameness width must satisfy 0 < eps <= 1/2, got {eps!r}")
    n = K.ambient_dim
    if f.in_dim != n:
        raise DimensionError(f"map has in_dim {f.in_dim}, domain has ambient {n}")
    pts = _sample_domain(K, cfg.grid_res, seed)
    if len(pts) == 0:
        return TamenessReport(True, eps, 0.0, None, 0)
    vals = f.eval_many(pts)
    worst = 0.0
    witness = None
    comparisons = 0
    for j in range(1, n + 1):
        col = pts[:, j - 1]
        for alpha in (0, 1):
            near = np.abs(col - alpha) <= eps
            if not np.any(near):
                continue
            P = pts[near]
            Q = P.copy()
            Q[:, j - 1] = float(alpha)
            inside = _distance(K, Q) <= MEMBERSHIP_TOL
            if not np.any(inside):
                continue
            gap = np.max(
                np.abs(vals[near][inside] - f.eval_many(Q[inside])), axis=1
            )
            comparisons += len(gap)
            k = int(np.argmax(gap))
            if gap[k] > worst:
                worst = float(gap[k])
                witness = Witness(tuple(float(v) for v in P[inside][k]), j, alpha)
    passed = worst <= cfg.eq_tol
    return TamenessReport(passed, eps, worst, witness if not passed else None, comparisons)


def check_admissible(
    f: SmoothMap,
    K,
    eps: float,
    cfg: ToleranceConfig | None = None,
    seed: int = 0,
) -> TamenessReport:
    """Check graded tameness: width eps**dim(F) on K meet F, per positive face F."""
    cfg = cfg or DEFAULT_TOLERANCES
    if not 0.0 < eps <= 0.5:
        raise DomainError(f"admissibility width must satisfy 0 < eps <= 1/2, got {eps!r}")
    n = K.ambient_dim
    worst = 0.0
    witness = None
    samples = 0
    breakdown = []
    for F in positive_faces(n):
        if isinstance(K, CubicalComplex):
            KF = intersect_complex_face(K, F)
            if KF.is_empty:
                continue
        else:
            KF = intersect_region_face(K, F)
            if not KF.boxes:
                continue
        rep = check_tame(f, KF, eps ** F.dim, cfg, seed)
        samples += rep.samples_checked
        breakdown.append((F.describe(), eps ** F.dim, rep.worst_violation, rep.passed))
        if rep.worst_violation > worst:
            worst = rep.worst_violation
            witness = rep.witness
    passed = worst <= cfg.eq_tol
    return TamenessReport(
        passed, eps, worst, witness if not passed else None, samples, tuple(breakdown)
    )


def _coordwise_smash(params: SmashParams, n: int) -> SmoothMap:
    return tup(*[smash_map(params, coord(k, n)) for k in range(1, n + 1)])


def _bottom_rim_face(n: int, j: int, v: int) -> Face:
    return Face(n, ((j, v), (n, 0)))


def tame_replace(f: SmoothMap, sigma: float, eps: float) -> tuple[SmoothMap, Homotopy]:
    """Flatten f along all collars of width sigma, keeping it fixed on the chamber.

    Returns the flattened map g and the straight-line homotopy from f to g;
    the homotopy is constant wherever the coordinatewise smash is the
    identity, in particular on the eps-chamber.
    """
    if not 0.0 < sigma < eps <= 0.5:
        raise DomainError(
            f"need 0 < sigma < eps <= 1/2, got sigma={sigma!r}, eps={eps!r}"
        )
    n = f.in_dim
    params = SmashParams(sigma, eps)
    g = _dc_replace(compose(f, _coordwise_smash(params, n)), domain=unit_box(n))
    dim = n + 1
    u = coord(dim, dim)
    moved = [
        add(
            mul(one_minus(u), coord(k, dim)),
            mul(u, smash_map(params, coord(k, dim))),
        )
        for k in range(1, n + 1)
    ]
    H = _dc_replace(compose(f, tup(*moved)), domain=unit_box(dim))
    return g, Homotopy(H)


def extend_tame(
    f: SmoothMap,
    eps: float,
    sigma: float,
    eps_prime: float | None = None,
    sigma_prime: float | None = None,
    *,
    cfg: ToleranceConfig | None = None,
    seed: int = 0,
    check_input: bool = True,
) -> SmoothMap:
    """Extend an eps-tame map on the walls-plus-top complex over the whole cube.

    The result is sigma-tame everywhere and sigma_prime-tame on the bottom
    face.  Default auxiliary widths: eps_prime = (eps + 1/2)/2 and
    sigma_prime = (sigma + eps)/2.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    n = f.in_dim
    if eps_prime is None:
        eps_prime = 0.5 * (eps + 0.5)
    if sigma_prime is None:
        sigma_prime = 0.5 * (sigma + eps)
    if not 0.0 < sigma < eps < eps_prime <= 0.5:
        raise DomainError(
            f"need 0 < sigma < eps < eps_prime <= 1/2, got "
            f"sigma={sigma!r}, eps={eps!r}, eps_prime={eps_prime!r}"
        )
    if not sigma < sigma_prime < eps_prime:
        raise DomainError(
            f"need sigma < sigma_prime < eps_prime, got "
            f"sigma={sigma!r}, sigma_prime={sigma_prime!r}, eps_prime={eps_prime!r}"
        )
    if check_input:
        rep = check_tame(f, j_complex(n), eps, cfg, seed)
        if not rep.passed:
            raise TamenessError(
                f"input map is not {eps}-tame on the walls-plus-top complex "
                f"(worst violation {rep.worst_violation:.3e})",
                rep,
            )
        if n >= 2:
            # the wider bottom-boundary tameness is what lets the relaxed
            # widths near the bottom reproduce f on the walls there
            rim = CubicalComplex(
                n,
                tuple(
                    _bottom_rim_face(n, j, v) for j in range(1, n) for v in (0, 1)
                ),
            )
            rim_rep = check_tame(f, rim, eps_prime, cfg, seed)
            if not rim_rep.passed:
                raise TamenessError(
                    f"input map is not {eps_prime}-tame on the bottom rim "
                    f"(worst violation {rim_rep.worst_violation:.3e})",
                    rim_rep,
                )
    R = approx_retraction(RetractionParams.from_eps(n, eps)).without_domain()
    # widths relax from (sigma', eps') at the bottom to (sigma, eps) once the
    # smashed time leaves its flat band; driving the ramp by the smashed time
    # (not the raw time) freezes the widths on both collars, which is what
    # makes the result exactly sigma-tame in the time direction
    squashed_time = smash_map(SmashParams(sigma, eps), coord(n, n))
    ramp = lambda_map(compose(affine_row(1, {1: -1.0 / sigma}, 1.0), squashed_time))
    a_u = compose(affine_row(1, {1: sigma_prime - sigma}, sigma), ramp)
    b_u = compose(affine_row(1, {1: eps_prime - eps}, eps), ramp)
    args = [smashdyn_map(coord(k, n), a_u, b_u) for k in range(1, n)]
    args.append(squashed_time)
    g = compose(f, R, tup(*args))
    return _dc_replace(g, domain=unit_box(n))


def jdelta_collar(n: int, eps: float) -> tuple[float, float, float]:
    """(flat width, identity-band start, collar depth) for the boundary push-out.

    The graded widths are (eps^(n-1), eps^(n-2)); when the identity band
    start would exceed 1/2 (only at n = 2) both exponents shift up by one.
    The collar depth always equals the flat width so the collar collapses
    onto the boundary exactly.
    """
    if n < 2:
        raise DomainError("collar widths need dimension >= 2")
    if not 0.0 < eps <= 0.5:
        raise DomainError(f"need 0 < eps <= 1/2, got {eps!r}")
    if n == 2:
        return eps**2, eps, eps**2
    return eps ** (n - 1), eps ** (n - 2), eps ** (n - 1)


def extend_to_jdelta(
    f: SmoothMap,
    eps: float,
    *,
    cfg: ToleranceConfig | None = None,
    seed: int = 0,
    check_input: bool = True,
) -> SmoothMap:
    """Extend an eps-admissible map on walls-plus-top over the collared boundary.

    On the bottom-face collar the map factors through a coordinatewise
    smash that collapses the collar onto the walls; elsewhere it is f.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    n = f.in_dim
    if check_input:
        rep = check_admissible(f, j_complex(n), eps, cfg, seed)
        if not rep.passed:
            raise TamenessError(
                f"input map is not {eps}-admissible on the walls-plus-top complex "
                f"(worst violation {rep.worst_violation:.3e})",
                rep,
            )
    if n == 1:
        return f
    flat, band, delta = jdelta_collar(n, eps)
    params = SmashParams(flat, band)
    bottom = compose(
        f, tup(*[smash_map(params, coord(k, n)) for k in range(1, n)], coord(n, n))
    )
    out = piecewise(n, (delta,), (bottom, f))
    return _dc_replace(out, domain=unit_box(n))


def _grid_points(n: int, res: int) -> np.ndarray:
    axes = [np.linspace(0.0, 1.0, res)] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _max_gap(f: SmoothMap, g: SmoothMap, pts: np.ndarray) -> float:
    if len(pts) == 0:
        return 0.0
    return float(np.max(np.abs(f.eval_many(pts) - g.eval_many(pts))))


def concat_homotopy(F: Homotopy, G: Homotopy, cfg: ToleranceConfig | None = None) -> Homotopy:
    """Splice two homotopies end to start, reparametrized to be flat at the seam."""
    cfg = cfg or DEFAULT_TOLERANCES
    n = F.space_dim
    if G.space_dim != n or F.map.out_dim != G.map.out_dim:
        raise DimensionError("homotopies do not share space and target dimensions")
    res = min(cfg.grid_res, 9) if n >= 3 else cfg.grid_res
    gap = _max_gap(F.slice(1.0), G.slice(0.0), _grid_points(n, res))
    if gap > cfg.eq_tol:
        raise DomainError(
            f"homotopy endpoints disagree by {gap:.3e} (> eq_tol {cfg.eq_tol})"
        )
    dim = n + 1
    xs = [coord(k, dim) for k in range(1, n + 1)]
    first = compose(F.map, tup(*xs, lambda_map(affine_row(dim, {dim: 3.0}, 0.0))))
    second = compose(G.map, tup(*xs, lambda_map(affine_row(dim, {dim: 3.0}, -2.0))))
    H = piecewise(dim, (0.5,), (first, second))
    return Homotopy(_dc_replace(H, domain=unit_box(dim)))


def concat_maps(phi: SmoothMap, psi: SmoothMap, cfg: ToleranceConfig | None = None) -> SmoothMap:
    """Splice two maps along the first coordinate, flat at the seam.

    Requires the value of phi on the face t1 = 1 to match psi on t1 = 0.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    n = phi.in_dim
    if psi.in_dim != n or phi.out_dim != psi.out_dim:
        raise DimensionError("maps do not share input and target dimensions")
    if n == 1:
        gap = float(np.max(np.abs(phi.eval([1.0]) - psi.eval([0.0]))))
    else:
        rest = _grid_points(n - 1, min(cfg.grid_res, 9) if n >= 4 else cfg.grid_res)
        at1 = np.concatenate([np.ones((len(rest), 1)), rest], axis=1)
        at0 = np.concatenate([np.zeros((len(rest), 1)), rest], axis=1)
        gap = float(np.max(np.abs(phi.eval_many(at1) - psi.eval_many(at0))))
    if gap > cfg.eq_tol:
        raise DomainError(f"face values disagree by {gap:.3e} (> eq_tol {cfg.eq_tol})")
    rest_coords = [coord(k, n) for k in range(2, n + 1)]
    first = compose(
        phi, tup(lambda_map(affine_row(n, {1: 3.0}, 0.0)), *rest_coords)
    )
    second = compose(
        psi, tup(lambda_map(affine_row(n, {1: 3.0}, -2.0)), *rest_coords)
    )
    out = piecewise(1, (0.5,), (first, second))
    return _dc_replace(out, domain=unit_box(n))


def check_fiber_constant(
    f: SmoothMap,
    eps: float,
    tau: float,
    cfg: ToleranceConfig | None = None,
    seed: int = 0,
) -> TamenessReport:
    """Certify that f is constant along the collapsed collars of width eps.

    This is exactly what makes f factor through the coordinatewise smash
    with widths (eps, tau): the smash collapses [0, eps] and [1-eps, 1]
    per coordinate and is injective in between.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    if not 0.0 < eps < tau <= 0.5:
        raise DomainError(f"need 0 < eps < tau <= 1/2, got eps={eps!r}, tau={tau!r}")
    pre = check_tame(f, full_cube(f.in_dim), eps, cfg, seed)
    if not pre.passed:
        raise TamenessError(
            f"map is not {eps}-tame on the cube (worst {pre.worst_violation:.3e})", pre
        )
    n = f.in_dim
    rng = np.random.default_rng(seed)
    pts = _sample_domain(full_cube(n), cfg.grid_res, seed)
    vals = f.eval_many(pts)
    worst = 0.0
    witness = None
    comparisons = 0
    for j in range(1, n + 1):
        col = pts[:, j - 1]
        for alpha in (0, 1):
            band = np.abs(col - alpha) <= eps
            if not np.any(band):
                continue
            P = pts[band]
            offsets = [0.0, eps / 3.0, 2.0 * eps / 3.0, eps, float(rng.uniform(0, eps))]
            for off in offsets:
                Q = P.copy()
                Q[:, j - 1] = off if alpha == 0 else 1.0 - off
                gap = np.max(np.abs(vals[band] - f.eval_many(Q)), axis=1)
                comparisons += len(gap)
                k = int(np.argmax(gap))
                if gap[k] > worst:
                    worst = float(gap[k])
                    witness = Witness(tuple(float(v) for v in P[k]), j, alpha)
    passed = worst <= cfg.eq_tol
    return TamenessReport(passed, eps, worst, witness if not passed else None, comparisons)


def seam_report(
    pw: PiecewiseAxis, cfg: ToleranceConfig | None = None, h: float = 1e-4
) -> tuple[float, float, bool]:
    """Worst value gap and one-sided derivative gap across all breakpoints.

    This is the smoothness gate for spliced constructions: neighbouring
    pieces must agree at the breakpoint to eq_tol and their one-sided
    finite differences to deriv_tol.
    """
    cfg = cfg or DEFAULT_TOLERANCES
    n = pw.in_dim
    res = min(cfg.grid_res, 9) if n >= 3 else cfg.grid_res
    if n == 1:
        rest = np.zeros((1, 0))
    else:
        rest = _grid_points(n - 1, res)
    worst_val = 0.0
    worst_fd = 0.0
    for i, b in enumerate(pw.breakpoints):
        left, right = pw.pieces[i], pw.pieces[i + 1]
        at_b = np.insert(rest, pw.axis - 1, b, axis=1)
        before = np.insert(rest, pw.axis - 1, b - h, axis=1)
        after = np.insert(rest, pw.axis - 1, b + h, axis=1)
        lv, rv = left.eval_many(at_b), right.eval_many(at_b)
        worst_val = max(worst_val, float(np.max(np.abs(lv - rv))))
        dl = (lv - left.eval_many(before)) / h
        dr = (right.eval_many(after) - rv) / h
        worst_fd = max(worst_fd, float(np.max(np.abs(dl - dr))))
    passed = worst_val <= cfg.eq_tol and worst_fd <= cfg.deriv_tol
    return worst_val, worst_fd, passed
