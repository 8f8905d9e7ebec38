import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tamecube.errors import DomainError
from tamecube.kernels import (
    QuadratureConfig,
    SmashParams,
    gamma,
    lambda_,
    lambda_many,
    smash_F,
    smash_T,
    smash_T_dyn_many,
    smash_T_many,
)

P = SmashParams(0.1, 0.25)


def test_gamma_piecewise():
    assert gamma(0.0) == 0.0
    assert gamma(-3.7) == 0.0
    assert gamma(1.0) == pytest.approx(math.exp(-1.0), abs=1e-15)


def test_gamma_rejects_non_finite():
    with pytest.raises(DomainError):
        gamma(float("nan"))
    with pytest.raises(DomainError):
        lambda_(float("inf"))


def test_lambda_endpoints_and_midpoint():
    assert lambda_(0.0) == 0.0
    assert lambda_(-2.0) == 0.0
    assert lambda_(1.0) == 1.0
    assert lambda_(0.5) == pytest.approx(0.5, abs=1e-15)
    assert lambda_(0.25) + lambda_(0.75) == pytest.approx(1.0, abs=1e-14)


@given(st.floats(-0.5, 1.5))
@settings(max_examples=200, deadline=None)
def test_lambda_symmetry(t):
    assert abs(lambda_(1.0 - t) - (1.0 - lambda_(t))) <= 1e-12


@given(st.floats(-0.5, 1.5), st.floats(-0.5, 1.5))
@settings(max_examples=200, deadline=None)
def test_lambda_monotone(a, b):
    lo, hi = min(a, b), max(a, b)
    assert lambda_(lo) <= lambda_(hi) + 1e-12


def test_lambda_integral_against_simpson():
    panels = 4096
    xs = np.linspace(0.0, 1.0, 2 * panels + 1)
    ys = lambda_many(xs)
    h = 1.0 / (2 * panels)
    integral = h / 3.0 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-2:2].sum())
    assert integral == pytest.approx(0.5, abs=1e-8)


def test_lambda_flat_at_ends():
    for t0, sgn in ((0.0, 1.0), (1.0, -1.0)):
        slopes = [abs(lambda_(t0 + sgn * h) - lambda_(t0)) / h for h in (1e-2, 1e-3)]
        assert slopes[1] <= slopes[0]
        assert slopes[1] <= 1e-6


def test_smash_params_validation():
    with pytest.raises(DomainError):
        SmashParams(0.3, 0.2)
    with pytest.raises(DomainError):
        SmashParams(0.2, 0.2)
    with pytest.raises(DomainError):
        SmashParams(-0.1, 0.2)
    with pytest.raises(DomainError):
        SmashParams(0.1, 0.6)
    SmashParams(0.0, 0.3)  # zero flat width is allowed


def test_smash_F_examples():
    assert smash_F(P, 0.3) == 0.0  # below sigma/tau = 0.4
    assert smash_F(P, 1.3) == 1.3
    assert smash_F(P, 1.0) == pytest.approx(1.0, abs=1e-10)


def test_smash_F_quadrature_path_matches_shortcut():
    # value just below 1 must approach the exact short-circuit at 1
    assert smash_F(P, 1.0 - 1e-9) == pytest.approx(1.0, abs=1e-8)
    assert smash_F(P, 0.4 + 1e-9) == pytest.approx(0.0, abs=1e-10)


def test_smash_F_monotone():
    ts = np.linspace(-0.2, 1.2, 141)
    vals = [smash_F(P, float(t)) for t in ts]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_smash_F_riemann_oracle():
    for sigma, tau in ((0.1, 0.25), (0.05, 0.5), (0.0, 0.3)):
        x = (np.arange(200000) + 0.5) / 200000
        oracle = float(
            lambda_many((tau * x - sigma) / (tau - sigma)).mean()
            + (tau + sigma) / (2.0 * tau)
        )
        assert smash_F(SmashParams(sigma, tau), 1.0) == pytest.approx(oracle, abs=1e-8)


def test_smash_T_examples():
    assert smash_T(P, 0.5) == 0.5
    assert smash_T(P, 0.05) == 0.0
    assert smash_T(P, 0.93) == 1.0
    assert smash_T(P, 0.3) == 0.3  # identity band


def test_smash_T_bands_exact():
    for t in np.linspace(-0.5, 0.1, 20):
        assert smash_T(P, float(t)) == 0.0
    for t in np.linspace(0.9, 1.5, 20):
        assert smash_T(P, float(t)) == 1.0
    for t in np.linspace(0.25, 0.75, 21):
        assert smash_T(P, float(t)) == float(t)


@pytest.mark.parametrize("sigma,tau", [(0.1, 0.25), (0.05, 0.5), (0.0, 0.3), (0.2, 0.45), (0.15, 0.3)])
def test_smash_T_symmetry_and_monotone(sigma, tau):
    p = SmashParams(sigma, tau)
    ts = np.linspace(-0.5, 1.5, 401)
    vals = smash_T_many(p, ts)
    mirror = smash_T_many(p, 1.0 - ts)
    assert np.max(np.abs(mirror - (1.0 - vals))) <= 1e-9
    order = np.sort(ts)
    ovals = smash_T_many(p, order)
    assert np.all(np.diff(ovals) >= -1e-9)
    assert np.all(vals >= 0.0) and np.all(vals <= 1.0)


def test_smash_T_seam_consistency():
    for sigma, tau in ((0.1, 0.25), (0.05, 0.5), (0.2, 0.45)):
        p = SmashParams(sigma, tau)
        fv = tau * smash_F(p, 0.5 / tau)
        assert abs(fv - (1.0 - fv)) <= 1e-9


def test_smash_scalar_vector_agree():
    ts = np.linspace(-0.2, 1.2, 57)
    vec = smash_T_many(P, ts)
    scal = np.array([smash_T(P, float(t)) for t in ts])
    assert np.array_equal(vec, scal)


def test_smash_dyn_matches_fixed_params():
    ts = np.linspace(0.0, 1.0, 31)
    sig = np.full_like(ts, P.sigma)
    tau = np.full_like(ts, P.tau)
    assert np.array_equal(smash_T_dyn_many(ts, sig, tau), smash_T_many(P, ts))


def test_smash_dyn_rejects_bad_schedule():
    with pytest.raises(DomainError):
        smash_T_dyn_many(np.array([0.5]), np.array([0.3]), np.array([0.2]))


def test_quadrature_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureConfig(max_depth=0)


def test_quadrature_error_carries_estimate():
    from tamecube.errors import QuadratureError

    cfg = QuadratureConfig(abs_tol=1e-16, max_depth=1)
    with pytest.raises(QuadratureError) as err:
        smash_F(P, 0.7, cfg)
    assert err.value.achieved > 0.0


def test_kernels_thread_safe():
    from concurrent.futures import ThreadPoolExecutor

    ts = np.linspace(-0.2, 1.2, 301)

    def work(_):
        return [smash_T(P, float(t)) for t in ts]

    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(work, range(8)))
    assert all(r == results[0] for r in results)
