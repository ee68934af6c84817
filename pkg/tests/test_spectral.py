import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpqlab import (
    InvalidInput,
    InvalidParameter,
    UnsupportedModel,
    apply_spectral_function,
    build_model,
    build_su2,
    embedding_constant,
    heat_decay_bound,
    heisenberg_trace_exact,
    homogeneous_symbol_trace,
    laplacian_data,
    rearrangement_of_symbol,
    rockland_count,
    spectral_counting,
    spectral_weak_norm,
    weak_norm,
)
from lpqlab.groups import geometric_lambda_grid
from lpqlab.spectral import (
    empirical_heat_bound,
    fit_homogeneous_law,
    law_only,
    loglog_fit,
    odd_zeta,
    random_spectral_data,
)
from scipy.special import zeta

C1 = math.pi**2 / 16


def test_su2_counting():
    m = build_su2(3)
    assert spectral_counting(laplacian_data(m), 2.0) == 5.0
    # with the bare Laplacian the trivial representation is a zero mode
    assert spectral_counting(laplacian_data(m, shift=0.0), 2.0) == 4.0
    assert spectral_counting(laplacian_data(m), 0.5) == 0.0


def test_counting_is_open_and_monotone():
    L = laplacian_data(build_su2(2))
    us = np.linspace(0.1, 12, 400)
    counts = [spectral_counting(L, u) for u in us]
    assert all(a <= b for a, b in zip(counts, counts[1:]))
    # at an eigenvalue the count excludes it; just above it includes it
    v = 1 + 0.75
    assert spectral_counting(L, v) == 1.0 and spectral_counting(L, v + 1e-12) == 5.0
    with pytest.raises(InvalidParameter):
        spectral_counting(L, 0.0)


def test_exact_heisenberg_trace():
    assert abs(heisenberg_trace_exact(1, 1.0) - C1) <= 1e-15
    assert math.isclose(heisenberg_trace_exact(1, 2.0), 4 * C1)
    assert math.isclose(heisenberg_trace_exact(2, 1.0), (7 / 8 * zeta(3)) ** 2 / 3, rel_tol=1e-15)
    # direct partial sums agree with the zeta identity
    k = np.arange(2_000_000)
    assert math.isclose(odd_zeta(3), float(np.sum((2.0 * k + 1) ** -3.0)), rel_tol=1e-12)


def test_heisenberg_grid_converges():
    L = laplacian_data(build_model({"kind": "heisenberg_spectral", "n": 1, "cells": 500, "K": 200}))
    errs = [abs(spectral_counting(L, s) / heisenberg_trace_exact(1, s) - 1) for s in (1.0, 10.0, 100.0)]
    finer = laplacian_data(build_model({"kind": "heisenberg_spectral", "n": 1, "cells": 4000, "K": 400}))
    errs_fine = [abs(spectral_counting(finer, s) / heisenberg_trace_exact(1, s) - 1) for s in (1.0, 10.0, 100.0)]
    assert max(errs_fine) < max(errs) and max(errs_fine) < 0.01


def test_rockland():
    grid = geometric_lambda_grid(1, 1e-4, 1e3, 2000)
    ss = np.geomspace(1e2, 1e4, 9)
    slope, _, _ = loglog_fit(ss, [rockland_count(1, 2, grid, 400, s) for s in ss])
    assert abs(slope - 1.0) <= 0.02
    slope1, _, _ = loglog_fit(ss / 100, [rockland_count(1, 1, grid, 400, s) for s in ss / 100])
    assert abs(slope1 - 2.0) <= 0.02
    assert rockland_count(1, 2, grid, 400, 1e-30) == 0.0


def test_apply_spectral_function():
    m = build_su2(1.5)
    L = laplacian_data(m)
    ident = apply_spectral_function(L, lambda u: u)
    assert all(np.allclose(np.diag(b), v) for b, v in zip(ident.blocks, L.values))
    heat = apply_spectral_function(L, lambda u: np.exp(-0.2 * u))
    assert np.allclose(np.diag(heat.blocks[2]), np.exp(-0.2 * 3.0))
    with pytest.raises(InvalidInput):
        apply_spectral_function(L, lambda u: np.where(u > 2.5, np.nan, u))


@given(st.integers(0, 2**31 - 1), st.sampled_from([1.0, 2.0, 4.0]))
def test_two_routes_agree(seed, rr):
    m = build_su2(2)
    L = random_spectral_data(m, np.random.default_rng(seed))
    for phi in (lambda u: np.exp(-np.asarray(u)), lambda u: (1 + np.asarray(u)) ** -2.0):
        a = spectral_weak_norm(L, phi, rr)
        b = weak_norm(rearrangement_of_symbol(apply_spectral_function(L, phi)), rr)
        assert abs(a - b) <= 1e-9 * b


def test_non_monotone_phi_falls_back():
    L = laplacian_data(build_su2(2))
    phi = lambda u: np.abs(np.sin(np.asarray(u)))
    val, route = spectral_weak_norm(L, phi, 2.0, return_route=True)
    assert route == "rearrangement"
    assert math.isclose(val, weak_norm(rearrangement_of_symbol(apply_spectral_function(L, phi)), 2.0))


def test_law_weak_norm_closed_form():
    L = law_only(2.0, C1)
    for t in (0.05, 0.3, 2.0):
        got = spectral_weak_norm(L, lambda u: np.exp(-t * u), 2.0)
        assert math.isclose(got, (math.pi / 4) / (t * math.e), rel_tol=1e-9)


def test_cutoff_below_first_eigenvalue_gives_zero():
    L = laplacian_data(build_su2(2))
    assert spectral_weak_norm(L, lambda u: np.where(np.asarray(u) < 0.5, 1.0, 0.0), 2.0) == 0.0


def test_heat_bound():
    L = law_only(2.0, C1)
    for t in (0.1, 1.0):
        assert math.isclose(heat_decay_bound(L, t, 4 / 3, 4), (math.pi / 4) / (t * math.e), rel_tol=1e-14)
    assert heat_decay_bound(L, 0.3, 2, 2) == 1.0
    sub = law_only(2.0, 1.0)
    ts = np.geomspace(1e-3, 1, 7)
    for p, q in ((4 / 3, 4), (1.5, 2.5)):
        slope, _, _ = loglog_fit(ts, [heat_decay_bound(sub, t, p, q) for t in ts])
        assert abs(slope + 2.0 * (1 / p - 1 / q)) <= 1e-12
    with pytest.raises(UnsupportedModel):
        heat_decay_bound(random_spectral_data(build_su2(1), np.random.default_rng(0)), 1.0, 4 / 3, 4)


def test_su2_heat_slope_has_weyl_exponent():
    L = laplacian_data(build_su2(80))
    ts = np.geomspace(1e-3, 1e-1, 15)
    slope, _, _ = loglog_fit(ts, [empirical_heat_bound(L, t, 4 / 3, 4) for t in ts])
    assert abs(slope / -0.75 - 1) <= 0.03


def test_embedding_constant():
    a, C = 2.0, C1
    L = law_only(a, C)
    r_inv = 1 / (4 / 3) - 1 / 4
    thr = a * r_inv
    assert math.isclose(embedding_constant(L, thr, 4 / 3, 4), C**r_inv)
    assert embedding_constant(L, thr - 0.05, 4 / 3, 4) == math.inf
    gammas = [thr, thr + 0.05, thr + 0.5, thr + 3.0]
    vals = [embedding_constant(L, g, 4 / 3, 4) for g in gammas]
    assert all(x >= y for x, y in zip(vals, vals[1:])) and vals[-1] <= C**r_inv
    # closed form against a dense scan in u
    u = np.geomspace(1e-6, 1e6, 200001)
    scan = np.max(C**r_inv * u ** thr * (1 + u) ** -(thr + 0.5))
    assert math.isclose(vals[2], scan, rel_tol=1e-8)


def test_embedding_constant_on_counted_spectrum():
    L = laplacian_data(build_su2(20))
    gs = [0.75, 1.0, 2.0, 5.0]
    vals = [embedding_constant(L, g, 4 / 3, 4) for g in gs]
    assert all(x >= y for x, y in zip(vals, vals[1:]))
    assert embedding_constant(L, 0.7, 4 / 3, 4) == math.inf


def test_homogeneous_traces():
    slope, C = fit_homogeneous_law(lambda r: r**2, 2, np.geomspace(0.1, 10, 20), R=4.0)
    assert abs(slope - 1) <= 0.02 and abs(C / math.pi - 1) <= 0.02
    slope1, C1_ = fit_homogeneous_law(lambda r: r, 1, np.geomspace(0.1, 10, 20), R=12.0)
    assert abs(slope1 - 1) <= 0.02 and abs(C1_ - 2) <= 0.02
    t1, t4 = homogeneous_symbol_trace(lambda r: r**2, 3, [1.0, 4.0], R=3.0)
    assert abs(t4 / t1 - 4**1.5) <= 0.01 * 4**1.5
    with pytest.raises(InvalidParameter):
        homogeneous_symbol_trace(lambda r: r, 1, 20.0, R=2.0)


def test_loglog_fit_contract():
    t = np.geomspace(0.01, 10, 9)
    slope, _, res = loglog_fit(t, 3.0 / t)
    assert abs(slope + 1) <= 1e-12 and res <= 1e-12
    assert abs(loglog_fit(t, np.full(9, 2.0))[0]) <= 1e-12
    with pytest.raises(InvalidInput):
        loglog_fit(t, -t)
