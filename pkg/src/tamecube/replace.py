"""Skeleton-induction replacement of a smooth map by a graded-tame one.

Starting from a smooth map on a cubical complex K that is already
eps-admissible on a subcomplex L, this produces a homotopy, constant on
L, to a map that is eps-admissible on all of K.  The algorithm first
flattens the map with a coordinatewise smash, then walks the skeleta of
K: every face not inside L gets its partial homotopy extended over
face x time through the walls-plus-top extension, with the flat width
graded as a power of eps in the face dimension.

The union of the per-face extensions is represented as a nested
piecewise tree that routes a point to a face containing it, with
breakpoints inside the common flat collar of all pieces; on the complex
this routing is value-exact because every piece is collar-constant at
that width.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as _dc_replace

import numpy as np

from .cubes import CubicalComplex, Face, full_cube, skeleton
from .errors import DimensionError, DomainError, ReplacementError, TamenessError
from .maps import (
    Affine,
    Homotopy,
    SmoothMap,
    compose,
    constant_homotopy,
    embed_time,
    piecewise,
    unit_box,
)
from .tame import (
    TamenessReport,
    ToleranceConfig,
    check_admissible,
    check_tame,
    concat_homotopy,
    extend_tame,
    tame_replace,
)

__all__ = [
    "FaceChart",
    "face_chart",
    "ExtensionStep",
    "ReplacementTrace",
    "admissible_replace",
]

MAX_RETRIES = 8


@dataclass(frozen=True)
class FaceChart:
    """Affine identification of (face x time) with a cube carrying the walls-plus-top pair.

    ``forward`` maps chart coordinates (s_1..s_j, w) into ambient
    (t_1..t_n, u) with the face's pinned values filled in and w = 1 - u,
    so the boundary-and-start data of the face sits exactly on the
    walls-plus-top complex of the chart cube.  ``inverse`` projects back;
    inverse o forward is the identity exactly.
    """

    forward: SmoothMap
    inverse: SmoothMap


def face_chart(F: Face, n: int) -> FaceChart:
    if F.ambient_dim != n:
        raise DimensionError(f"face has ambient {F.ambient_dim}, expected {n}")
    j = F.dim
    if j == 0:
        raise DomainError("a vertex needs no chart; use the constant homotopy")
    free = F.free_axes
    pins = dict(F.pinned)
    fwd_rows = []
    fwd_off = []
    for axis in range(1, n + 1):
        row = [0.0] * (j + 1)
        if axis in pins:
            fwd_off.append(float(pins[axis]))
        else:
            row[free.index(axis)] = 1.0
            fwd_off.append(0.0)
        fwd_rows.append(tuple(row))
    fwd_rows.append(tuple([0.0] * j + [-1.0]))
    fwd_off.append(1.0)
    forward = Affine(tuple(fwd_rows), tuple(fwd_off))
    inv_rows = []
    inv_off = []
    for axis in free:
        row = [0.0] * (n + 1)
        row[axis - 1] = 1.0
        inv_rows.append(tuple(row))
        inv_off.append(0.0)
    inv_rows.append(tuple([0.0] * n + [-1.0]))
    inv_off.append(1.0)
    inverse = Affine(tuple(inv_rows), tuple(inv_off))
    return FaceChart(forward=forward, inverse=inverse)


@dataclass(frozen=True)
class ExtensionStep:
    face: str
    dim: int
    sigma: float
    input_eps: float
    eps_prime: float
    sigma_prime: float
    retries: int
    face_check_worst: float

    def to_json(self) -> dict:
        return {
            "face": self.face,
            "dim": self.dim,
            "sigma": self.sigma,
            "input_eps": self.input_eps,
            "eps_prime": self.eps_prime,
            "sigma_prime": self.sigma_prime,
            "retries": self.retries,
            "face_check_worst": self.face_check_worst,
        }


@dataclass(frozen=True)
class ReplacementTrace:
    taming_sigma: float
    taming_eps: float
    steps: tuple[ExtensionStep, ...]
    final_report: TamenessReport

    def to_json(self) -> dict:
        return {
            "taming_sigma": self.taming_sigma,
            "taming_eps": self.taming_eps,
            "steps": [s.to_json() for s in self.steps],
            "final": self.final_report.to_json(),
        }


def _route_union(
    complex_: CubicalComplex, formulas: dict[Face, SmoothMap], collar: float, fallback: SmoothMap
) -> SmoothMap:
    """Piecewise tree evaluating, on the complex, the union of per-face formulas.

    Split axes carry breakpoints at (collar, 1-collar); a leaf signature
    pins the non-middle axes and the leaf evaluates the formula of the
    first maximal face containing that pinned face.  Off the complex the
    value is whichever formula the routing lands on; nothing samples
    there.
    """
    n = complex_.ambient_dim
    split_axes = sorted({a for f in complex_.maximal_faces for a, _ in f.pinned})

    def build(axis_pos: int, pins: tuple[tuple[int, int], ...]) -> SmoothMap:
        if axis_pos == len(split_axes):
            leaf = Face(n, pins)
            for M in complex_.maximal_faces:
                if leaf.subface_of(M):
                    return formulas[M]
            return fallback
        axis = split_axes[axis_pos]
        low = build(axis_pos + 1, pins + ((axis, 0),))
        mid = build(axis_pos + 1, pins)
        high = build(axis_pos + 1, pins + ((axis, 1),))
        if low is mid and mid is high:
            return mid
        return piecewise(axis, (collar, 1.0 - collar), (low, mid, high))

    return build(0, ())


def admissible_replace(
    f: SmoothMap,
    K: CubicalComplex,
    L: CubicalComplex,
    eps: float,
    cfg: ToleranceConfig | None = None,
    seed: int = 0,
) -> tuple[SmoothMap, Homotopy, ReplacementTrace]:
    """Homotope f, relative to L, to a map that is eps-admissible on K.

    Returns (g, H, trace); H runs from f at time 0 to g at time 1 and is
    constant in time on L.  Requires f to be eps-admissible on L.
    """
    cfg = cfg or ToleranceConfig()
    n = K.ambient_dim
    if f.in_dim != n:
        raise DimensionError(f"map has in_dim {f.in_dim}, complex has ambient {n}")
    if not 0.0 < eps < 0.5:
        raise DomainError(
            f"replacement needs 0 < eps < 1/2 (the edge-step width eps**1 must "
            f"stay below the auxiliary cap 1/2), got {eps!r}"
        )
    if not L.is_subcomplex_of(K):
        raise DomainError("L is not a subcomplex of K")
    # cheap internal config for per-step verification; the caller's cfg is
    # used for the final admissibility report
    quick = ToleranceConfig(eq_tol=cfg.eq_tol, deriv_tol=cfg.deriv_tol, grid_res=min(cfg.grid_res, 11))
    if not L.is_empty:
        pre = check_admissible(f, L, eps, quick, seed)
        if not pre.passed:
            raise TamenessError(
                f"input map is not {eps}-admissible on L "
                f"(worst violation {pre.worst_violation:.3e})",
                pre,
            )
    if K.is_empty or K.dim == 0 or K.is_subcomplex_of(L):
        g = _dc_replace(f, domain=unit_box(n))
        final = check_admissible(g, K, eps, cfg, seed) if not K.is_empty else TamenessReport(
            True, eps, 0.0, None, 0
        )
        return g, constant_homotopy(f), ReplacementTrace(0.0, 0.0, (), final)

    dim_l = max(L.dim, 1)
    eps0 = eps**dim_l
    sigma0 = 0.5 * eps0
    f0, h_tame = tame_replace(f, sigma0, eps0)

    cert = sigma0
    union = constant_homotopy(f0).map
    fallback = union
    formulas: dict[Face, SmoothMap] = {M: union for M in L.maximal_faces}
    steps: list[ExtensionStep] = []
    current = L
    for j in range(1, K.dim + 1):
        faces_j = [
            F
            for F in K.faces(min_dim=j)
            if F.dim == j and not any(F.subface_of(M) for M in L.maximal_faces)
        ]
        faces_j.sort(key=lambda F: F.pinned)
        sigmas_used = []
        for F in faces_j:
            chart = face_chart(F, n)
            data = compose(union, chart.forward)
            eps_hat = cert
            eps_p = min(eps ** (j - 1), 0.5)
            sigma_p = eps**j
            sigma_j = 0.5 * min(eps ** (j + 1), eps_hat)
            last_exc: Exception | None = None
            ext = None
            retries = 0
            worst = float("nan")
            for attempt in range(MAX_RETRIES + 1):
                retries = attempt
                try:
                    candidate = extend_tame(
                        data,
                        eps=eps_hat,
                        sigma=sigma_j,
                        eps_prime=eps_p,
                        sigma_prime=sigma_p,
                        cfg=quick,
                        seed=seed,
                    )
                except TamenessError as exc:
                    last_exc = exc
                    eps_hat *= 0.5
                    sigma_j = min(sigma_j, 0.5 * eps_hat)
                    continue
                g_face = compose(candidate, embed_time(j, 0.0))
                rep = check_tame(g_face, full_cube(j), sigma_p, quick, seed)
                worst = rep.worst_violation
                if rep.passed:
                    ext = candidate
                    break
                last_exc = TamenessError(
                    f"face map not {sigma_p}-tame (worst {rep.worst_violation:.3e})", rep
                )
                sigma_j *= 0.5
            if ext is None:
                raise ReplacementError(
                    f"extension over face {F.describe()} (dim {j}) failed after "
                    f"{MAX_RETRIES} retries: {last_exc}"
                )
            formulas[F] = compose(ext, chart.inverse)
            sigmas_used.append(sigma_j)
            steps.append(
                ExtensionStep(
                    face=F.describe(),
                    dim=j,
                    sigma=sigma_j,
                    input_eps=eps_hat,
                    eps_prime=eps_p,
                    sigma_prime=sigma_p,
                    retries=retries,
                    face_check_worst=worst,
                )
            )
        if sigmas_used:
            cert = min(cert, min(sigmas_used))
        current = L.union(skeleton(K, j)) if not L.is_empty else skeleton(K, j)
        union = _route_union(current, formulas, cert, fallback)

    h_ind = Homotopy(_dc_replace(union, domain=unit_box(n + 1)))
    H = concat_homotopy(h_tame, h_ind, cfg)
    g = h_ind.slice(1.0)
    final = check_admissible(g, K, eps, cfg, seed)
    trace = ReplacementTrace(sigma0, eps0, tuple(steps), final)
    return g, H, trace
