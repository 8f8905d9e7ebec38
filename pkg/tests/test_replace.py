import numpy as np
import pytest

from tamecube.cubes import (
    CubicalComplex,
    Face,
    boundary_complex,
    complex_grid,
    full_cube,
    skeleton,
)
from tamecube.errors import DomainError, TamenessError
from tamecube.genmaps import random_map_admissible_on, random_smooth_map, random_tame_map
from tamecube.maps import Coord, compose
from tamecube.replace import admissible_replace, face_chart
from tamecube.tame import ToleranceConfig, check_admissible

QUICK = ToleranceConfig(grid_res=11)
MID = ToleranceConfig(grid_res=17)


def test_face_chart_round_trip():
    rng = np.random.default_rng(0)
    for n, pins in ((2, ((2, 0),)), (3, ((1, 1),)), (3, ((2, 0), (3, 1)))):
        F = Face(n, pins)
        if F.dim == 0:
            continue
        ch = face_chart(F, n)
        pts = rng.uniform(size=(50, F.dim + 1))
        back = compose(ch.inverse, ch.forward)
        assert np.array_equal(back.eval_many(pts), pts)


def test_face_chart_carries_face_start_to_chart_bottom():
    F = Face(2, ((2, 0),))
    ch = face_chart(F, 2)
    # chart point (s, w=1) lands on the face at original time u = 0
    out = ch.forward.eval([0.3, 1.0])
    assert tuple(out) == (0.3, 0.0, 0.0)
    # chart bottom w = 0 is the face at time 1, where the new map lives
    out = ch.forward.eval([0.3, 0.0])
    assert tuple(out) == (0.3, 0.0, 1.0)


def test_face_chart_rejects_vertices():
    with pytest.raises(DomainError):
        face_chart(Face(2, ((1, 0), (2, 0))), 2)


def test_replace_trivial_when_L_is_K():
    K = boundary_complex(2)
    f = random_tame_map(np.random.default_rng(0), 2, 0.2)
    g, H, trace = admissible_replace(f, K, K, 0.2, QUICK)
    pts = complex_grid(K, 11)
    assert np.array_equal(g.eval_many(pts), f.on_unit_box().eval_many(pts))
    assert trace.steps == ()
    up = np.concatenate([pts, np.full((len(pts), 1), 0.37)], axis=1)
    assert np.array_equal(H.map.eval_many(up), f.on_unit_box().eval_many(pts))


def test_replace_zero_dimensional_complex():
    K = skeleton(boundary_complex(2), 0)
    f = random_smooth_map(np.random.default_rng(1), 2)
    g, H, trace = admissible_replace(f, K, CubicalComplex(2, ()), 0.2, QUICK)
    assert trace.steps == ()
    pts = complex_grid(K, 3)
    assert np.array_equal(g.eval_many(pts), f.eval_many(pts))


def test_replace_interval_identity():
    f = Coord(1, 1).on_unit_box()
    K = full_cube(1)
    g, H, trace = admissible_replace(f, K, CubicalComplex(1, ()), 0.25, MID)
    assert trace.final_report.passed
    assert check_admissible(g, K, 0.25, MID).passed


@pytest.mark.parametrize(
    "n,l_pins",
    [(2, ((1, 0),)), (2, ((2, 1),)), (3, ((1, 0),)), (3, ((3, 1),))],
)
def test_replace_boundary_cases(n, l_pins):
    eps = 0.2
    K = boundary_complex(n)
    L = CubicalComplex(n, (Face(n, l_pins),))
    rng = np.random.default_rng(10 * n + l_pins[0][0])
    f = random_map_admissible_on(rng, n, L, eps)
    cfg = QUICK if n == 3 else MID
    g, H, trace = admissible_replace(f, K, L, eps, cfg, seed=3)
    assert trace.final_report.passed
    # endpoints
    pts = complex_grid(K, cfg.grid_res)
    f_u = f.on_unit_box()
    assert np.max(np.abs(H.slice(0.0).eval_many(pts) - f_u.eval_many(pts))) <= 1e-9
    assert np.max(np.abs(H.slice(1.0).eval_many(pts) - g.eval_many(pts))) <= 1e-9
    # relative to L
    lpts = complex_grid(L, cfg.grid_res)
    fl = f_u.eval_many(lpts)
    for u in (0.0, 0.25, 0.5, 0.75, 1.0):
        su = np.concatenate([lpts, np.full((len(lpts), 1), u)], axis=1)
        assert np.max(np.abs(H.map.eval_many(su) - fl)) <= 1e-9


def test_replace_with_empty_L():
    K = boundary_complex(2)
    f = random_smooth_map(np.random.default_rng(3), 2, out_dim=2)
    g, H, trace = admissible_replace(f, K, CubicalComplex(2, ()), 0.2, MID)
    assert trace.final_report.passed
    assert check_admissible(g, K, 0.2, ToleranceConfig(grid_res=33)).passed


def test_trace_structure():
    n = 3
    K = boundary_complex(n)
    L = CubicalComplex(n, (Face(n, ((1, 0),)),))
    f = random_map_admissible_on(np.random.default_rng(4), n, L, 0.2)
    g, H, trace = admissible_replace(f, K, L, 0.2, QUICK)
    dims = [s.dim for s in trace.steps]
    assert dims == sorted(dims)
    # every face of K of dimension <= dim K outside L appears exactly once
    expected = {
        F.describe()
        for j in (1, 2)
        for F in K.faces(min_dim=j)
        if F.dim == j and not any(F.subface_of(M) for M in L.maximal_faces)
    }
    assert {s.face for s in trace.steps} == expected
    assert len(trace.steps) == len(expected)
    js = trace.to_json()
    assert set(js) == {"taming_sigma", "taming_eps", "steps", "final"}
    # processed faces stay graded-tame at their own exponent
    for s in trace.steps:
        assert s.sigma < 0.2**s.dim
        assert s.face_check_worst <= 1e-9


def test_replace_validations():
    K = boundary_complex(2)
    L = CubicalComplex(2, (Face(2, ((1, 0),)),))
    f = random_smooth_map(np.random.default_rng(5), 2)
    with pytest.raises(TamenessError):
        # the second coordinate is the identity along L, hence not tame there
        admissible_replace(Coord(2, 2).on_unit_box(), K, L, 0.2, QUICK)
    with pytest.raises(DomainError):
        admissible_replace(f, K, CubicalComplex(2, ()), 0.5, QUICK)
    bad_L = CubicalComplex(2, (Face(2, ()),))  # the full square is not in K
    with pytest.raises(DomainError):
        admissible_replace(f, K, bad_L, 0.2, QUICK)


def test_overlapping_faces_agree():
    # formulas of adjacent processed faces agree on their shared edge
    n = 2
    K = boundary_complex(n)
    L = CubicalComplex(n, ())
    f = random_smooth_map(np.random.default_rng(6), n)
    g, H, trace = admissible_replace(f, K, L, 0.2, MID)
    corners = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    for u in (0.0, 0.5, 1.0):
        su = np.concatenate([corners, np.full((4, 1), u)], axis=1)
        vals = H.map.eval_many(su)
        assert np.all(np.isfinite(vals))
    assert check_admissible(g, K, 0.2, ToleranceConfig(grid_res=33)).passed
